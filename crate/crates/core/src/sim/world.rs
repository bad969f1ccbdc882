use std::io::{self, Write};
use std::sync::Arc;

use crate::graph::{make_snapshot, DynamicGraph, PriorityParams, StaticSnapshot, TimeFn, VertexId};

use super::field::{generate_field, FailureField};
use super::grid::{Cell, GridMap};
use super::plan::{boustrophedon_plan, start_cell};
use super::rng::FailureStream;
use super::{FarmConfig, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RobotStatus {
    Navigating,
    Failed,
    Done,
}

impl RobotStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RobotStatus::Navigating => "navigating",
            RobotStatus::Failed => "failed",
            RobotStatus::Done => "done",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RobotState {
    id: usize,
    position: Cell,
    plan: Arc<[Cell]>,
    progress: usize,
    status: RobotStatus,
    /// `expected[k]`: expected cells covered after a rescue with `k` plan
    /// cells already done.
    expected: Arc<[f64]>,
    stream: FailureStream,
    first_failure: Option<u64>,
}

impl RobotState {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn position(&self) -> Cell {
        self.position
    }

    pub fn status(&self) -> RobotStatus {
        self.status
    }

    /// Plan cells entered so far.
    pub fn traversed(&self) -> usize {
        self.progress
    }

    pub fn plan(&self) -> &[Cell] {
        &self.plan
    }

    pub fn remaining_plan(&self) -> &[Cell] {
        &self.plan[self.progress..]
    }

    /// Clock value at the end of the step in which the robot first failed.
    pub fn first_failure(&self) -> Option<u64> {
        self.first_failure
    }
}

/// Expected number of cells entered before the next failure when walking
/// cells with the given failure probabilities.
pub fn expected_distance(probs: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut survive = 1.0;
    for &p in probs {
        survive *= 1.0 - p;
        total += survive;
    }
    total
}

#[derive(Debug, Clone)]
pub struct WorldState {
    config: FarmConfig,
    field: Arc<FailureField>,
    map: Arc<GridMap>,
    robots: Vec<RobotState>,
    supervisor: Cell,
    target: VertexId,
    clock: u64,
    covered: Vec<bool>,
    covered_count: usize,
    working_time: u64,
}

impl WorldState {
    pub fn new(config: &FarmConfig, trial_seed: u64) -> Result<Self, SimError> {
        config.validate()?;
        Self::with_field(config, Arc::new(generate_field(config)), trial_seed)
    }

    /// World over a prebuilt field, which must match the configured geometry.
    pub fn with_field(config: &FarmConfig, field: Arc<FailureField>, trial_seed: u64) -> Result<Self, SimError> {
        config.validate()?;
        let geometry = config.geometry();
        if *field.geometry() != geometry {
            return Err(SimError::InvalidConfig("field geometry does not match the farm".into()));
        }
        let robots = (1..=config.n_robots)
            .map(|id| {
                let region = config.region(id);
                let plan: Arc<[Cell]> = boustrophedon_plan(&geometry, region).into();
                let mut expected = vec![0.0; plan.len() + 1];
                for k in (0..plan.len()).rev() {
                    expected[k] = (1.0 - field.probability(plan[k])) * (1.0 + expected[k + 1]);
                }
                RobotState {
                    id,
                    position: start_cell(&geometry, region),
                    plan,
                    progress: 0,
                    status: RobotStatus::Navigating,
                    expected: expected.into(),
                    stream: FailureStream::new(trial_seed, id),
                    first_failure: None,
                }
            })
            .collect();
        Ok(Self {
            config: config.clone(),
            field,
            map: GridMap::shared(geometry),
            robots,
            supervisor: geometry.control_center(),
            target: VertexId::control_center(config.n_robots),
            clock: 0,
            covered: vec![false; geometry.field_cell_count()],
            covered_count: 0,
            working_time: 0,
        })
    }

    pub fn config(&self) -> &FarmConfig {
        &self.config
    }

    pub fn field(&self) -> &FailureField {
        &self.field
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn n(&self) -> usize {
        self.robots.len()
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    /// Robot with vertex id `id` (1-based). Panics if out of range.
    pub fn robot(&self, id: usize) -> &RobotState {
        &self.robots[id - 1]
    }

    pub fn supervisor(&self) -> Cell {
        self.supervisor
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Steps during which the supervisor was away from the control center.
    pub fn working_time(&self) -> u64 {
        self.working_time
    }

    pub fn control_center(&self) -> VertexId {
        VertexId::control_center(self.n())
    }

    /// Ids of currently failed robots, ascending.
    pub fn failed_robots(&self) -> impl Iterator<Item = usize> + '_ {
        self.robots
            .iter()
            .filter(|r| r.status == RobotStatus::Failed)
            .map(|r| r.id)
    }

    pub fn is_complete(&self) -> bool {
        self.supervisor == self.config.geometry().control_center()
            && self.robots.iter().all(|r| r.status == RobotStatus::Done)
    }

    pub fn covered_cells(&self) -> usize {
        self.covered_count
    }

    pub fn coverage_percent(&self) -> f64 {
        100.0 * self.covered_count as f64 / self.covered.len() as f64
    }

    pub fn vertex_cell(&self, v: VertexId) -> Result<Cell, SimError> {
        let n = self.n();
        match v.0 {
            0 => Ok(self.supervisor),
            i if i <= n => Ok(self.robots[i - 1].position),
            i if i == n + 1 => Ok(self.config.geometry().control_center()),
            i => Err(SimError::UnknownVertex(i)),
        }
    }

    /// Shortest travel time in steps between two vertices.
    pub fn travel_cost(&self, from: VertexId, to: VertexId) -> Result<u32, SimError> {
        Ok(self.map.distance(self.vertex_cell(from)?, self.vertex_cell(to)?))
    }

    /// Expected cells covered after rescuing robot `id`; zero unless failed.
    pub fn robot_reward(&self, id: usize) -> f64 {
        let r = self.robot(id);
        match r.status {
            RobotStatus::Failed => r.expected[r.progress],
            _ => 0.0,
        }
    }

    /// Same as [`robot_reward`](Self::robot_reward), recomputed from the field.
    pub fn robot_reward_uncached(&self, id: usize) -> f64 {
        let r = self.robot(id);
        if r.status != RobotStatus::Failed {
            return 0.0;
        }
        let probs: Vec<f64> = r.remaining_plan().iter().map(|&c| self.field.probability(c)).collect();
        expected_distance(&probs)
    }

    /// Advances the world by one time step with the supervisor heading for
    /// `target`, which must be a failed robot or the control center.
    pub fn step(&mut self, target: VertexId) -> Result<(), SimError> {
        if self.is_complete() {
            return Err(SimError::Finished);
        }
        let n = self.n();
        let goal = match target.0 {
            0 => {
                return Err(SimError::InvalidTarget {
                    target: 0,
                    reason: "the supervisor cannot target itself",
                })
            }
            i if i <= n && self.robots[i - 1].status != RobotStatus::Failed => {
                return Err(SimError::InvalidTarget {
                    target: i,
                    reason: "robot is not failed",
                })
            }
            _ => self.vertex_cell(target)?,
        };
        let home = self.config.geometry().control_center();
        let away_before = self.supervisor != home;
        self.clock += 1;

        for r in &mut self.robots {
            if r.status != RobotStatus::Navigating {
                continue;
            }
            let cell = r.plan[r.progress];
            r.position = cell;
            r.progress += 1;
            if let Some(k) = self.field.geometry().field_index(cell) {
                if !self.covered[k] {
                    self.covered[k] = true;
                    self.covered_count += 1;
                }
            }
            // The draw for the final cell is made but cannot stop the robot.
            let u = r.stream.draw(r.progress - 1);
            if r.progress == r.plan.len() {
                r.status = RobotStatus::Done;
            } else if u <= self.field.probability(cell) {
                r.status = RobotStatus::Failed;
                r.first_failure.get_or_insert(self.clock);
            }
        }

        self.supervisor = self.map.next_step(self.supervisor, goal);
        self.target = target;
        for r in &mut self.robots {
            if r.status == RobotStatus::Failed && r.position == self.supervisor {
                r.status = RobotStatus::Navigating;
            }
        }
        if away_before || self.supervisor != home {
            self.working_time += 1;
        }
        Ok(())
    }

    /// One `t, entity, x, y, status` line per entity.
    pub fn write_trace<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        let home = self.config.geometry().control_center();
        let s = self.supervisor;
        let status = if s == home && self.target == self.control_center() {
            "idle".to_string()
        } else {
            format!("target={}", self.target.0)
        };
        writeln!(out, "{}, supervisor, {}, {}, {}", self.clock, s.x, s.y, status)?;
        for r in &self.robots {
            let c = r.position;
            writeln!(
                out,
                "{}, robot{}, {}, {}, {}",
                self.clock,
                r.id,
                c.x,
                c.y,
                r.status.as_str()
            )?;
        }
        Ok(())
    }
}

/// The supervisor's current decision problem: vertex 0 is the supervisor,
/// then the failed robots in id order, then the control center.
#[derive(Debug, Clone)]
pub struct PlanningGraph {
    pub snapshot: StaticSnapshot,
    /// World vertex behind each planning vertex.
    pub vertices: Vec<VertexId>,
}

impl PlanningGraph {
    /// World robot id behind planning vertex `v`, if it is a robot.
    pub fn robot_at(&self, v: usize) -> Option<usize> {
        (1..=self.snapshot.n()).contains(&v).then(|| self.vertices[v].0)
    }
}

/// Builds the planning graph from world state. Robots that are not failed
/// carry no reward and are left out.
pub fn build_planning_graph(world: &WorldState, mu: f64, gamma_p: f64) -> PlanningGraph {
    let failed: Vec<usize> = world.failed_robots().collect();
    let mut vertices = vec![VertexId::SUPERVISOR];
    vertices.extend(failed.iter().map(|&id| VertexId(id)));
    vertices.push(world.control_center());
    let m = vertices.len();

    let rewards = failed
        .iter()
        .map(|&id| TimeFn::Constant(world.robot_reward(id)))
        .collect();
    let mut costs = Vec::with_capacity(m * m);
    for &a in &vertices {
        for &b in &vertices {
            let c = world.travel_cost(a, b).expect("planning vertices exist");
            costs.push(TimeFn::Constant(c as f64));
        }
    }
    let graph = DynamicGraph::new(rewards, costs, 0.0, mu).expect("mu is nonnegative");
    let priority = PriorityParams {
        weight: gamma_p,
        traversed: failed.iter().map(|&id| world.robot(id).traversed() as f64).collect(),
    };
    PlanningGraph {
        snapshot: make_snapshot(&graph, &priority, 0.0),
        vertices,
    }
}
