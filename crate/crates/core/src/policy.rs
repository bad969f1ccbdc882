//! Supervisor policies and the closed-loop trial runner.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexId;
use crate::ptp::{BnbSolver, SolveError};
use crate::sim::{build_planning_graph, FarmConfig, RobotStatus, SimError, WorldState};

/// Default cap on trial length.
pub const MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PolicyKind {
    GreedyHr,
    GreedyFtg,
    GreedyCr,
    Gittins,
    Ptp,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::GreedyHr,
        PolicyKind::GreedyFtg,
        PolicyKind::GreedyCr,
        PolicyKind::Gittins,
        PolicyKind::Ptp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::GreedyHr => "greedy-hr",
            PolicyKind::GreedyFtg => "greedy-ftg",
            PolicyKind::GreedyCr => "greedy-cr",
            PolicyKind::Gittins => "gittins",
            PolicyKind::Ptp => "ptp",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown policy `{s}` (expected greedy-hr, greedy-ftg, greedy-cr, gittins or ptp)"))
    }
}

impl From<PolicyKind> for String {
    fn from(p: PolicyKind) -> String {
        p.name().to_string()
    }
}

impl TryFrom<String> for PolicyKind {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Policy hyperparameters. `mu` scales travel time into cost for Greedy-HR
/// and PTP, `gamma_p` weights the PTP progress penalty and `gamma_g` is the
/// Gittins discount.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    pub mu: f64,
    pub gamma_p: f64,
    pub gamma_g: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            mu: 0.1,
            gamma_p: 0.1,
            gamma_g: 0.9,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.mu >= 0.0 && self.gamma_p >= 0.0) {
            return Err(PolicyError::InvalidParams("mu and gamma_p must be nonnegative".into()));
        }
        if !(self.gamma_g > 0.0 && self.gamma_g < 1.0) {
            return Err(PolicyError::InvalidParams("gamma_g must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("invalid policy parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("planner failed: {0}")]
    Solve(#[from] SolveError),
    #[error("trial exceeded {cap} steps")]
    StepCap { cap: u64 },
    #[error("trace output: {0}")]
    Io(#[from] io::Error),
}

/// Gittins index of a robot with reward `reward` at integer travel time `c`.
pub fn gittins_index(reward: f64, c: u32, gamma: f64) -> f64 {
    let norm: f64 = (0..=c).map(|k| gamma.powi(k as i32)).sum();
    gamma.powi(c as i32) * reward / norm
}

/// Index of the best candidate by `score`; ties keep the earliest.
fn argmax_by<T: Copy>(items: &[T], mut score: impl FnMut(T) -> f64) -> Option<T> {
    let mut best: Option<(T, f64)> = None;
    for &item in items {
        let s = score(item);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((item, s));
        }
    }
    best.map(|(item, _)| item)
}

/// Where the supervisor should head next: a failed robot or the control
/// center.
pub fn decide(kind: PolicyKind, params: &PolicyParams, world: &WorldState) -> Result<VertexId, PolicyError> {
    let failed: Vec<usize> = world.failed_robots().collect();
    if failed.is_empty() {
        return Ok(world.control_center());
    }
    let cost = |id: usize| -> u32 {
        world
            .travel_cost(VertexId::SUPERVISOR, VertexId(id))
            .expect("failed robots are world vertices")
    };
    let choice = match kind {
        PolicyKind::GreedyHr => argmax_by(&failed, |id| world.robot_reward(id) - params.mu * cost(id) as f64),
        PolicyKind::GreedyFtg => argmax_by(&failed, |id| -(world.robot(id).traversed() as f64)),
        PolicyKind::GreedyCr => argmax_by(&failed, |id| -(cost(id) as f64)),
        PolicyKind::Gittins => argmax_by(&failed, |id| {
            gittins_index(world.robot_reward(id), cost(id), params.gamma_g)
        }),
        PolicyKind::Ptp => return decide_ptp(params, world),
    };
    Ok(VertexId(choice.expect("at least one failed robot")))
}

fn decide_ptp(params: &PolicyParams, world: &WorldState) -> Result<VertexId, PolicyError> {
    let plan = build_planning_graph(world, params.mu, params.gamma_p);
    let solution = BnbSolver::new(&plan.snapshot).solve()?;
    if let Some(first) = solution.path.first_robot() {
        return Ok(plan.vertices[first.0]);
    }
    // Nobody left to wait for: rescues that do not pay for themselves are
    // still needed to finish the task.
    let stalled = world
        .robots()
        .iter()
        .all(|r| matches!(r.status(), RobotStatus::Failed | RobotStatus::Done));
    if !stalled {
        return Ok(world.control_center());
    }
    let mut solver = BnbSolver::new(&plan.snapshot);
    for v in 1..=plan.snapshot.n() {
        solver = solver.require_visit(v)?;
    }
    let forced = solver.solve()?;
    let first = forced.path.first_robot().expect("all robots are required");
    Ok(plan.vertices[first.0])
}

/// Metrics of one finished trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub completion_time: u64,
    pub working_time: u64,
    /// Percent of the field covered at the end of each step, starting with
    /// the initial state at index 0.
    pub coverage: Vec<f64>,
}

/// Runs `world` to completion under the policy, stepping at most `max_steps`
/// times and optionally writing a trace line per entity per step.
pub fn run_world(
    kind: PolicyKind,
    params: &PolicyParams,
    mut world: WorldState,
    max_steps: u64,
    mut trace: Option<&mut dyn Write>,
) -> Result<TrialOutcome, PolicyError> {
    params.validate()?;
    let mut coverage = vec![world.coverage_percent()];
    if let Some(out) = trace.as_deref_mut() {
        world.write_trace(out)?;
    }
    while !world.is_complete() {
        if world.clock() >= max_steps {
            return Err(PolicyError::StepCap { cap: max_steps });
        }
        let target = decide(kind, params, &world)?;
        world.step(target)?;
        coverage.push(world.coverage_percent());
        if let Some(out) = trace.as_deref_mut() {
            world.write_trace(out)?;
        }
    }
    Ok(TrialOutcome {
        completion_time: world.clock(),
        working_time: world.working_time(),
        coverage,
    })
}

pub fn run_policy_trial(
    kind: PolicyKind,
    params: &PolicyParams,
    config: &FarmConfig,
    seed: u64,
) -> Result<TrialOutcome, PolicyError> {
    run_world(kind, params, WorldState::new(config, seed)?, MAX_STEPS, None)
}
