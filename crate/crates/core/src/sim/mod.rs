//! Grid-farm simulator: failure fields, robot coverage plans, supervisor
//! motion and the planning graph seen by the supervisor policies.

mod field;
mod grid;
mod plan;
mod rng;
mod world;

pub use field::{generate_field, FailureField, FieldPattern};
pub use grid::{Cell, Geometry, GridMap};
pub use plan::{boustrophedon_plan, start_cell, RobotRegion};
pub use rng::{mix_seed, FailureStream};
pub use world::{build_planning_graph, expected_distance, PlanningGraph, RobotState, RobotStatus, WorldState};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid farm configuration: {0}")]
    InvalidConfig(String),
    #[error("vertex {0} does not exist in this world")]
    UnknownVertex(usize),
    #[error("cannot send the supervisor to vertex {target}: {reason}")]
    InvalidTarget { target: usize, reason: &'static str },
    #[error("the task is already complete")]
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FarmConfig {
    pub rows: usize,
    pub row_length: usize,
    pub free_margin: usize,
    pub n_robots: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub field_pattern: FieldPattern,
    /// Seeds the failure field; failure draws use the trial seed instead.
    pub seed: u64,
}

impl Default for FarmConfig {
    fn default() -> Self {
        let g = Geometry::default();
        Self {
            rows: g.rows,
            row_length: g.row_length,
            free_margin: g.margin,
            n_robots: 6,
            p_min: 0.01,
            p_max: 0.20,
            field_pattern: FieldPattern::UniformNoise,
            seed: 0,
        }
    }
}

impl FarmConfig {
    pub fn geometry(&self) -> Geometry {
        Geometry {
            rows: self.rows,
            row_length: self.row_length,
            margin: self.free_margin,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.rows == 0 || self.row_length == 0 {
            return bad("the field needs at least one row of one cell".into());
        }
        if self.free_margin == 0 {
            return bad("free_margin must be at least 1".into());
        }
        if self.n_robots == 0 || !self.rows.is_multiple_of(self.n_robots) {
            return bad(format!(
                "{} rows cannot be split evenly between {} robots",
                self.rows, self.n_robots
            ));
        }
        if !(0.0 <= self.p_min && self.p_min <= self.p_max && self.p_max <= 1.0) {
            return bad(format!(
                "need 0 <= p_min <= p_max <= 1, got [{}, {}]",
                self.p_min, self.p_max
            ));
        }
        Ok(())
    }

    /// Rows owned by robot `id` (1-based).
    pub fn region(&self, id: usize) -> RobotRegion {
        let per = self.rows / self.n_robots;
        RobotRegion {
            first_row: (id - 1) * per,
            row_count: per,
        }
    }
}
