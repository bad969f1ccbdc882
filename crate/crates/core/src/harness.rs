//! Experiment grid, parallel trial runner, summary statistics and CSV output.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::policy::{run_world, PolicyError, PolicyKind, PolicyParams, MAX_STEPS};
use crate::sim::{generate_field, mix_seed, FailureField, FarmConfig, FieldPattern, Geometry, WorldState};

pub const TRIALS_HEADER: [&str; 7] = ["policy", "field", "autonomy", "fleet", "seed", "completion", "working"];
pub const SUMMARY_HEADER: [&str; 8] = [
    "group",
    "policy",
    "level",
    "trials",
    "completion_mean",
    "completion_sd",
    "working_mean",
    "working_sd",
];
pub const COVERAGE_HEADER: [&str; 6] = ["field", "autonomy", "fleet", "seed", "step", "percent"];

/// Coverage series longer than this are thinned before writing.
pub const COVERAGE_POINTS: usize = 2000;

macro_rules! labelled_enum {
    ($name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn label(self) -> &'static str {
                match self { $($name::$variant => $label),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| v.label() == s)
                    .ok_or_else(|| format!("unknown {} level `{s}`", stringify!($name).to_lowercase()))
            }
        }
    };
}

labelled_enum!(Autonomy { Low => "low", Mid => "mid", High => "high" });
labelled_enum!(Fleet { Small => "small", Mid => "mid", Large => "large" });

impl Autonomy {
    /// Failure-probability clamps `(p_min, p_max)`.
    pub fn clamps(self) -> (f64, f64) {
        match self {
            Autonomy::Low => (0.01, 0.20),
            Autonomy::Mid => (0.01, 0.15),
            Autonomy::High => (0.0, 0.15),
        }
    }
}

impl Fleet {
    pub fn size(self) -> usize {
        match self {
            Fleet::Small => 4,
            Fleet::Mid => 6,
            Fleet::Large => 9,
        }
    }
}

/// Experiment description, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentGrid {
    pub seed: u64,
    pub trials: usize,
    pub patterns: Vec<FieldPattern>,
    pub autonomy: Vec<Autonomy>,
    pub fleets: Vec<Fleet>,
    pub policies: Vec<PolicyKind>,
    pub max_steps: u64,
    pub geometry: Geometry,
    pub params: PolicyParams,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self {
            seed: 2024,
            trials: 10,
            patterns: FieldPattern::ALL.to_vec(),
            autonomy: Autonomy::ALL.to_vec(),
            fleets: vec![Fleet::Mid],
            policies: PolicyKind::ALL.to_vec(),
            max_steps: MAX_STEPS,
            geometry: Geometry::default(),
            params: PolicyParams::default(),
        }
    }
}

impl ExperimentGrid {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let grid: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.params
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        for &fleet in &self.fleets {
            for &autonomy in &self.autonomy {
                self.farm(FieldPattern::UniformNoise, autonomy, fleet)
                    .validate()
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn farm(&self, pattern: FieldPattern, autonomy: Autonomy, fleet: Fleet) -> FarmConfig {
        let (p_min, p_max) = autonomy.clamps();
        FarmConfig {
            rows: self.geometry.rows,
            row_length: self.geometry.row_length,
            free_margin: self.geometry.margin,
            n_robots: fleet.size(),
            p_min,
            p_max,
            field_pattern: pattern,
            seed: mix_seed(&[self.seed, pattern.id() as u64]),
        }
    }

    /// Failure-draw seed of a trial. Every policy, autonomy level and fleet
    /// size sees the same draws for a given pattern and trial index.
    pub fn trial_seed(&self, pattern: FieldPattern, trial: usize) -> u64 {
        mix_seed(&[self.seed, pattern.id() as u64, trial as u64])
    }

    /// All trials in canonical order: pattern, autonomy, fleet, trial, policy.
    pub fn trials(&self) -> Vec<TrialSpec> {
        let mut out = Vec::new();
        for &pattern in &self.patterns {
            for &autonomy in &self.autonomy {
                for &fleet in &self.fleets {
                    for trial in 0..self.trials {
                        for &policy in &self.policies {
                            out.push(TrialSpec {
                                policy,
                                pattern,
                                autonomy,
                                fleet,
                                trial,
                                seed: self.trial_seed(pattern, trial),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSpec {
    pub policy: PolicyKind,
    pub pattern: FieldPattern,
    pub autonomy: Autonomy,
    pub fleet: Fleet,
    pub trial: usize,
    pub seed: u64,
}

impl fmt::Display for TrialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "policy={} field={} autonomy={} fleet={} trial={} seed={}",
            self.policy,
            self.pattern.id(),
            self.autonomy,
            self.fleet,
            self.trial,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub policy: PolicyKind,
    pub field: FieldPattern,
    pub autonomy: Autonomy,
    pub fleet: Fleet,
    pub seed: u64,
    pub completion: u64,
    pub working: u64,
    /// Percent covered after each step; not part of `trials.csv`.
    #[serde(skip)]
    pub coverage: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("trial {spec} failed: {source}")]
    Trial { spec: TrialSpec, source: PolicyError },
    #[error("trial {spec} broke an invariant: {what}")]
    Invariant { spec: TrialSpec, what: String },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl HarnessError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn csv(path: &Path, source: csv::Error) -> Self {
        Self::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Runs one trial; `trace` receives the per-step entity log if given.
pub fn run_trial(
    grid: &ExperimentGrid,
    spec: &TrialSpec,
    field: Arc<FailureField>,
    trace: Option<&mut dyn Write>,
) -> Result<TrialRecord, HarnessError> {
    let farm = grid.farm(spec.pattern, spec.autonomy, spec.fleet);
    let fail = |source: PolicyError| HarnessError::Trial { spec: *spec, source };
    let world = WorldState::with_field(&farm, field, spec.seed).map_err(|e| fail(e.into()))?;
    let outcome = run_world(spec.policy, &grid.params, world, grid.max_steps, trace).map_err(fail)?;
    let invariant = |what: &str| HarnessError::Invariant {
        spec: *spec,
        what: what.to_string(),
    };
    if outcome.working_time > outcome.completion_time {
        return Err(invariant("working time exceeds completion time"));
    }
    if outcome.coverage.last() != Some(&100.0) {
        return Err(invariant("field not fully covered"));
    }
    if outcome.coverage.windows(2).any(|w| w[1] < w[0]) {
        return Err(invariant("coverage decreased"));
    }
    Ok(TrialRecord {
        policy: spec.policy,
        field: spec.pattern,
        autonomy: spec.autonomy,
        fleet: spec.fleet,
        seed: spec.seed,
        completion: outcome.completion_time,
        working: outcome.working_time,
        coverage: outcome.coverage,
    })
}

/// Runs every trial of the grid on `jobs` worker threads (0 = one per core).
/// Records come back in canonical order. With `trace_dir`, each trial writes
/// its entity log to its own file there.
pub fn run_grid(
    grid: &ExperimentGrid,
    jobs: usize,
    trace_dir: Option<&Path>,
) -> Result<Vec<TrialRecord>, HarnessError> {
    grid.validate()?;
    let mut fields: BTreeMap<(FieldPattern, Autonomy), Arc<FailureField>> = BTreeMap::new();
    for &pattern in &grid.patterns {
        for &autonomy in &grid.autonomy {
            let farm = grid.farm(pattern, autonomy, Fleet::Mid);
            fields.insert((pattern, autonomy), Arc::new(generate_field(&farm)));
        }
    }
    if let Some(dir) = trace_dir {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let specs = grid.trials();
    pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let field = fields[&(spec.pattern, spec.autonomy)].clone();
                match trace_dir {
                    None => run_trial(grid, spec, field, None),
                    Some(dir) => {
                        let path = dir.join(format!(
                            "trace_{}_f{}_{}_{}_t{}.log",
                            spec.policy,
                            spec.pattern.id(),
                            spec.autonomy,
                            spec.fleet,
                            spec.trial
                        ));
                        let file = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
                        let mut out = BufWriter::new(file);
                        let record = run_trial(grid, spec, field, Some(&mut out))?;
                        out.flush().map_err(|e| HarnessError::io(&path, e))?;
                        Ok(record)
                    }
                }
            })
            .collect()
    })
}

/// Grouping of a summary row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Autonomy,
    Fleet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub group: Group,
    pub policy: PolicyKind,
    pub level: String,
    pub trials: usize,
    pub completion_mean: f64,
    pub completion_sd: f64,
    pub working_mean: f64,
    pub working_sd: f64,
}

/// Mean and sample standard deviation (zero for a single value). Values are
/// sorted first so the result does not depend on input order.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let mut sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    sq.sort_by(f64::total_cmp);
    (mean, (sq.iter().sum::<f64>() / (n - 1.0)).sqrt())
}

/// Per (policy, autonomy) and per (policy, fleet) statistics of both metrics.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    type Key = (Group, PolicyKind, u8, &'static str);
    let mut groups: BTreeMap<Key, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let keys = [
            (Group::Autonomy, r.policy, r.autonomy as u8, r.autonomy.label()),
            (Group::Fleet, r.policy, r.fleet as u8, r.fleet.label()),
        ];
        for key in keys {
            let entry = groups.entry(key).or_default();
            entry.0.push(r.completion as f64);
            entry.1.push(r.working as f64);
        }
    }
    groups
        .into_iter()
        .map(|((group, policy, _, level), (completion, working))| {
            let (completion_mean, completion_sd) = mean_sd(&completion);
            let (working_mean, working_sd) = mean_sd(&working);
            SummaryRow {
                group,
                policy,
                level: level.to_string(),
                trials: completion.len(),
                completion_mean,
                completion_sd,
                working_mean,
                working_sd,
            }
        })
        .collect()
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| HarnessError::csv(path, e))?;
    w.write_record(header).map_err(|e| HarnessError::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_trials(path: &Path, records: &[TrialRecord]) -> Result<(), HarnessError> {
    write_rows(path, &TRIALS_HEADER, records)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    write_rows(path, &SUMMARY_HEADER, rows)
}

/// Evenly spaced indices into a series of `len` points, at most `max`, always
/// keeping the first and last.
pub fn downsample_indices(len: usize, max: usize) -> Vec<usize> {
    if len <= max {
        return (0..len).collect();
    }
    let mut idx: Vec<usize> = (0..max).map(|k| k * (len - 1) / (max - 1)).collect();
    idx.dedup();
    idx
}

pub fn write_coverage(path: &Path, records: &[&TrialRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    let err = |e| HarnessError::csv(path, e);
    w.write_record(COVERAGE_HEADER).map_err(err)?;
    for r in records {
        for k in downsample_indices(r.coverage.len(), COVERAGE_POINTS) {
            w.write_record([
                r.field.id().to_string(),
                r.autonomy.to_string(),
                r.fleet.to_string(),
                r.seed.to_string(),
                k.to_string(),
                r.coverage[k].to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes `trials.csv`, `summary.csv` and one `coverage_<policy>.csv` per
/// policy in `policies` into `dir`.
pub fn emit_csv(dir: &Path, records: &[TrialRecord], policies: &[PolicyKind]) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    write_trials(&dir.join("trials.csv"), records)?;
    write_summary(&dir.join("summary.csv"), &summarize(records))?;
    for &policy in policies {
        let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.policy == policy).collect();
        write_coverage(&dir.join(format!("coverage_{policy}.csv")), &mine)?;
    }
    Ok(())
}

/// Reads a `trials.csv` back; coverage series are not stored there.
pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    let header = r.headers().map_err(|e| HarnessError::csv(path, e))?;
    if header.iter().ne(TRIALS_HEADER) {
        return Err(HarnessError::Config(format!(
            "{}: unexpected header `{}`",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| HarnessError::csv(path, e)))
        .collect()
}
