use std::collections::BTreeMap;
use std::fs;
use std::sync::Arc;

use proptest::prelude::*;

use rescue_planner::graph::VertexId;
use rescue_planner::harness::{
    emit_csv, mean_sd, read_trials, run_grid, summarize, write_summary, Autonomy, ExperimentGrid, Fleet, TrialRecord,
};
use rescue_planner::policy::{decide, run_policy_trial, PolicyKind, PolicyParams};
use rescue_planner::ptp::solve_dp;
use rescue_planner::sim::{build_planning_graph, FailureField, FarmConfig, FieldPattern, Geometry, WorldState};

/// Two rows, one robot each. Both fail on their first cell; robot 1's row
/// is unreliable afterwards while robot 2's is clean.
fn two_failures() -> WorldState {
    let config = FarmConfig {
        rows: 2,
        row_length: 10,
        free_margin: 1,
        n_robots: 2,
        p_min: 0.0,
        p_max: 1.0,
        ..FarmConfig::default()
    };
    let mut probs = vec![0.5; 10];
    probs.extend(vec![0.0; 10]);
    probs[0] = 1.0;
    probs[10] = 1.0;
    let field = Arc::new(FailureField::from_values(config.geometry(), probs));
    let mut w = WorldState::with_field(&config, field, 1).unwrap();
    w.step(w.control_center()).unwrap();
    assert_eq!(w.failed_robots().collect::<Vec<_>>(), vec![1, 2]);
    w
}

#[test]
fn near_small_versus_far_large() {
    let w = two_failures();
    let params = PolicyParams::default();
    let near = VertexId(1);
    let far = VertexId(2);
    let c = |v| w.travel_cost(VertexId(0), v).unwrap();
    assert!(c(near) < c(far));
    assert!(w.robot_reward(1) < w.robot_reward(2));
    assert_eq!(decide(PolicyKind::GreedyCr, &params, &w).unwrap(), near);
    assert_eq!(decide(PolicyKind::GreedyHr, &params, &w).unwrap(), far);
    // Equal progress: the lowest id wins.
    assert_eq!(decide(PolicyKind::GreedyFtg, &params, &w).unwrap(), near);
    let plan = build_planning_graph(&w, params.mu, params.gamma_p);
    let dp = solve_dp(&plan.snapshot).unwrap();
    let expected = dp.path.first_robot().map_or(w.control_center(), |v| plan.vertices[v.0]);
    assert_eq!(decide(PolicyKind::Ptp, &params, &w).unwrap(), expected);
}

#[test]
fn single_failure_is_chosen_by_every_policy() {
    let config = FarmConfig {
        rows: 2,
        row_length: 10,
        free_margin: 1,
        n_robots: 2,
        ..FarmConfig::default()
    };
    let mut probs = vec![0.0; 20];
    probs[0] = 1.0;
    let field = Arc::new(FailureField::from_values(config.geometry(), probs));
    let mut w = WorldState::with_field(&config, field, 1).unwrap();
    w.step(w.control_center()).unwrap();
    for p in PolicyKind::ALL {
        assert_eq!(decide(p, &PolicyParams::default(), &w).unwrap(), VertexId(1), "{p}");
    }
}

#[test]
fn gittins_choice_survives_reward_rescaling() {
    // Rescaling every reward by the same factor rescales every index.
    let w = two_failures();
    let params = PolicyParams {
        gamma_g: 0.95,
        ..PolicyParams::default()
    };
    let idx = |scale: f64| {
        [1, 2].map(|id| {
            let c = w.travel_cost(VertexId(0), VertexId(id)).unwrap();
            rescue_planner::policy::gittins_index(scale * w.robot_reward(id), c, params.gamma_g)
        })
    };
    let base = idx(1.0);
    for scale in [0.01, 3.0, 250.0] {
        let s = idx(scale);
        assert_eq!(base[0] < base[1], s[0] < s[1]);
    }
}

#[test]
fn distance_rules_ignore_hyperparameters() {
    let w = two_failures();
    let a = decide(PolicyKind::GreedyCr, &PolicyParams::default(), &w).unwrap();
    let b = decide(PolicyKind::GreedyFtg, &PolicyParams::default(), &w).unwrap();
    for (mu, gamma_p, gamma_g) in [(0.0, 0.0, 0.1), (10.0, 3.0, 0.99)] {
        let p = PolicyParams { mu, gamma_p, gamma_g };
        assert_eq!(decide(PolicyKind::GreedyCr, &p, &w).unwrap(), a);
        assert_eq!(decide(PolicyKind::GreedyFtg, &p, &w).unwrap(), b);
    }
}

fn small_grid() -> ExperimentGrid {
    ExperimentGrid {
        trials: 2,
        patterns: vec![FieldPattern::UniformNoise, FieldPattern::BandedGradient],
        autonomy: vec![Autonomy::Low, Autonomy::High],
        fleets: vec![Fleet::Small],
        geometry: Geometry {
            rows: 36,
            row_length: 10,
            margin: 2,
        },
        ..ExperimentGrid::default()
    }
}

#[test]
fn grid_is_deterministic_and_paired() {
    let grid = small_grid();
    let a = run_grid(&grid, 3, None).unwrap();
    let b = run_grid(&grid, 1, None).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 2 * 2 * 2 * 5);
    let mut seeds: BTreeMap<(FieldPattern, Autonomy, u64), usize> = BTreeMap::new();
    for r in &a {
        assert!(r.working <= r.completion);
        assert_eq!(*r.coverage.last().unwrap(), 100.0);
        *seeds.entry((r.field, r.autonomy, r.seed)).or_default() += 1;
    }
    assert!(seeds.values().all(|&k| k == 5));
}

#[test]
fn paired_seeds_share_failure_times_without_rescue() {
    // With the supervisor parked, failures depend on the environment alone.
    let grid = small_grid();
    for spec in grid.trials().chunks(grid.policies.len()) {
        let firsts: Vec<Vec<Option<u64>>> = spec
            .iter()
            .map(|s| {
                let farm = grid.farm(s.pattern, s.autonomy, s.fleet);
                let mut w = WorldState::new(&farm, s.seed).unwrap();
                while w
                    .robots()
                    .iter()
                    .any(|r| r.first_failure().is_none() && r.remaining_plan().len() > 1)
                {
                    if w.failed_robots().count() == w.n() {
                        break;
                    }
                    w.step(w.control_center()).unwrap();
                }
                w.robots().iter().map(|r| r.first_failure()).collect()
            })
            .collect();
        assert!(firsts.windows(2).all(|p| p[0] == p[1]));
        assert!(firsts[0].iter().any(Option::is_some));
    }
}

#[test]
fn zero_failure_trials_match_across_policies() {
    let config = FarmConfig {
        p_min: 0.0,
        p_max: 0.0,
        ..FarmConfig::default()
    };
    let outcomes: Vec<_> = PolicyKind::ALL
        .iter()
        .map(|&p| run_policy_trial(p, &PolicyParams::default(), &config, 5).unwrap())
        .collect();
    assert!(outcomes.windows(2).all(|w| w[0] == w[1]));
    // 6 rows of 40 cells plus 5 two-cell crossings.
    assert_eq!(outcomes[0].completion_time, 250);
    assert_eq!(outcomes[0].working_time, 0);
}

#[test]
fn csv_headers_are_frozen() {
    let dir = tempfile::tempdir().unwrap();
    emit_csv(dir.path(), &[], &[PolicyKind::Ptp]).unwrap();
    let read = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap();
    assert_eq!(
        read("trials.csv"),
        "policy,field,autonomy,fleet,seed,completion,working\n"
    );
    assert_eq!(
        read("summary.csv"),
        "group,policy,level,trials,completion_mean,completion_sd,working_mean,working_sd\n"
    );
    assert_eq!(read("coverage_ptp.csv"), "field,autonomy,fleet,seed,step,percent\n");
}

#[test]
fn trials_csv_round_trips_into_identical_summary() {
    let dir = tempfile::tempdir().unwrap();
    let records = run_grid(&small_grid(), 0, None).unwrap();
    emit_csv(dir.path(), &records, &PolicyKind::ALL).unwrap();
    let parsed = read_trials(&dir.path().join("trials.csv")).unwrap();
    assert_eq!(parsed.len(), records.len());
    let again = dir.path().join("again.csv");
    write_summary(&again, &summarize(&parsed)).unwrap();
    assert_eq!(
        fs::read(dir.path().join("summary.csv")).unwrap(),
        fs::read(&again).unwrap()
    );
    let first = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    let row = first.lines().nth(1).unwrap();
    let r = &records[0];
    assert_eq!(
        row,
        format!(
            "{},{},{},{},{},{},{}",
            r.policy,
            r.field.id(),
            r.autonomy,
            r.fleet,
            r.seed,
            r.completion,
            r.working
        )
    );
}

#[test]
fn trace_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let grid = ExperimentGrid {
        trials: 1,
        patterns: vec![FieldPattern::CornerHotspot],
        autonomy: vec![Autonomy::Mid],
        policies: vec![PolicyKind::GreedyCr],
        ..small_grid()
    };
    let records = run_grid(&grid, 1, Some(dir.path())).unwrap();
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let text = fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap();
    // One supervisor line and one line per robot per state.
    let lines = text.lines().count() as u64;
    assert_eq!(lines, (records[0].completion + 1) * 5);
    assert!(text.starts_with("0, supervisor, 0, 0, idle"));
}

/// Textbook two-pass statistics.
fn naive_stats(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

proptest! {
    #[test]
    fn summary_matches_naive_statistics(values in prop::collection::vec((1u64..5000, 0u64..5000), 1..40)) {
        let records: Vec<TrialRecord> = values
            .iter()
            .map(|&(c, w)| TrialRecord {
                policy: PolicyKind::Gittins,
                field: FieldPattern::CenterRidge,
                autonomy: Autonomy::Mid,
                fleet: Fleet::Large,
                seed: 0,
                completion: c,
                working: w.min(c),
                coverage: Vec::new(),
            })
            .collect();
        let rows = summarize(&records);
        prop_assert_eq!(rows.len(), 2);
        let completion: Vec<f64> = records.iter().map(|r| r.completion as f64).collect();
        let working: Vec<f64> = records.iter().map(|r| r.working as f64).collect();
        let (cm, cs) = naive_stats(&completion);
        let (wm, ws) = naive_stats(&working);
        for row in rows {
            prop_assert!((row.completion_mean - cm).abs() <= 1e-9 * cm.max(1.0));
            prop_assert!((row.completion_sd - cs).abs() <= 1e-7 * cs.max(1.0));
            prop_assert!((row.working_mean - wm).abs() <= 1e-9 * wm.max(1.0));
            prop_assert!((row.working_sd - ws).abs() <= 1e-7 * ws.max(1.0));
        }
        let (m, s) = mean_sd(&completion);
        prop_assert!((m - cm).abs() <= 1e-9 * cm.max(1.0) && (s - cs).abs() <= 1e-7 * cs.max(1.0));
    }
}

#[test]
fn shipped_configs_load() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let default = ExperimentGrid::load(&root.join("default.toml")).unwrap();
    assert_eq!(default, ExperimentGrid::default());
    assert_eq!(default.trials().len(), 750);
    let fleets = ExperimentGrid::load(&root.join("fleets.toml")).unwrap();
    assert_eq!(fleets.trials().len(), 5 * 10 * 3 * 5);
}
