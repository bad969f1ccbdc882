//! Planning graph model.
//!
//! Vertex `0` is the supervisor, vertices `1..=n` are robots and vertex `n + 1`
//! is the control center. Paths always run from the supervisor to the control
//! center and never repeat a vertex.

mod dynamic;
mod instance;
mod time_fn;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

pub use dynamic::{arrival_times, dynamic_value, make_snapshot, DynamicGraph, PriorityParams};
pub use instance::{parse_instance, write_instance};
pub use time_fn::TimeFn;

/// Absolute tolerance used for objective comparisons throughout the crate.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} robots")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("path must start at the supervisor (0) and end at the control center ({expected_end})")]
    InvalidEndpoints { expected_end: usize },
    #[error("vertex {0} appears more than once in the path")]
    RepeatedVertex(usize),
    #[error("expected {expected} entries for {what}, got {got}")]
    WrongLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} at {location} is negative or NaN: {value}")]
    InvalidValue {
        what: &'static str,
        location: String,
        value: f64,
    },
    #[error("terminal vertex {0} must carry zero reward")]
    TerminalReward(usize),
    #[error("malformed instance: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub const SUPERVISOR: VertexId = VertexId(0);

    pub fn control_center(n: usize) -> Self {
        VertexId(n + 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_supervisor(self) -> bool {
        self.0 == 0
    }

    pub fn is_control_center(self, n: usize) -> bool {
        self.0 == n + 1
    }

    pub fn is_robot(self, n: usize) -> bool {
        self.0 >= 1 && self.0 <= n
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A valid, loop-free path from the supervisor to the control center.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(n: usize, vertices: Vec<VertexId>) -> Result<Self, GraphError> {
        let end = n + 1;
        if vertices.len() < 2 || vertices[0].0 != 0 || vertices[vertices.len() - 1].0 != end {
            return Err(GraphError::InvalidEndpoints { expected_end: end });
        }
        let mut seen = vec![false; n + 2];
        for v in &vertices {
            if v.0 > end {
                return Err(GraphError::VertexOutOfRange { vertex: v.0, n });
            }
            if seen[v.0] {
                return Err(GraphError::RepeatedVertex(v.0));
            }
            seen[v.0] = true;
        }
        Ok(Self { vertices })
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self, GraphError> {
        Self::new(n, indices.iter().copied().map(VertexId).collect())
    }

    /// The direct path `(0, n + 1)` that visits no robot.
    pub fn direct(n: usize) -> Self {
        Self {
            vertices: vec![VertexId(0), VertexId(n + 1)],
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn indices(&self) -> Vec<usize> {
        self.vertices.iter().map(|v| v.0).collect()
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0].0, w[1].0))
    }

    /// Robots on the path in visiting order.
    pub fn robots(&self) -> &[VertexId] {
        &self.vertices[1..self.vertices.len() - 1]
    }

    /// First robot to rescue, if any.
    pub fn first_robot(&self) -> Option<VertexId> {
        self.robots().first().copied()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.vertices.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Orders two candidate paths: higher value first, then fewer arcs, then the
/// lexicographically smaller vertex sequence. Values within [`TOLERANCE`] tie.
pub fn compare_candidates(a_value: f64, a: &[usize], b_value: f64, b: &[usize]) -> Ordering {
    if a_value > b_value + TOLERANCE {
        return Ordering::Less;
    }
    if b_value > a_value + TOLERANCE {
        return Ordering::Greater;
    }
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Time-frozen rewards and (already scaled) arc costs.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticSnapshot {
    n: usize,
    rewards: Vec<f64>,
    costs: Vec<f64>,
}

impl StaticSnapshot {
    /// `rewards` has `n + 2` entries, `costs` is a row-major `(n + 2)^2` matrix
    /// whose diagonal is ignored. Infinite costs mark missing arcs.
    pub fn new(rewards: Vec<f64>, mut costs: Vec<f64>) -> Result<Self, GraphError> {
        if rewards.len() < 2 {
            return Err(GraphError::WrongLength {
                what: "rewards",
                expected: 2,
                got: rewards.len(),
            });
        }
        let m = rewards.len();
        let n = m - 2;
        if costs.len() != m * m {
            return Err(GraphError::WrongLength {
                what: "costs",
                expected: m * m,
                got: costs.len(),
            });
        }
        for (i, &r) in rewards.iter().enumerate() {
            if r.is_nan() || r < 0.0 || r.is_infinite() {
                return Err(GraphError::InvalidValue {
                    what: "reward",
                    location: format!("vertex {i}"),
                    value: r,
                });
            }
        }
        if rewards[0] != 0.0 {
            return Err(GraphError::TerminalReward(0));
        }
        if rewards[n + 1] != 0.0 {
            return Err(GraphError::TerminalReward(n + 1));
        }
        for i in 0..m {
            costs[i * m + i] = 0.0;
            for j in 0..m {
                let c = costs[i * m + j];
                if c.is_nan() || c < 0.0 {
                    return Err(GraphError::InvalidValue {
                        what: "cost",
                        location: format!("arc ({i}, {j})"),
                        value: c,
                    });
                }
            }
        }
        Ok(Self { n, rewards, costs })
    }

    /// Robot count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.n + 2
    }

    pub fn control_center(&self) -> usize {
        self.n + 1
    }

    pub fn reward(&self, i: usize) -> f64 {
        self.rewards[i]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.costs[i * (self.n + 2) + j]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Static path value: collected rewards minus traversed arc costs.
    pub fn value(&self, path: &Path) -> f64 {
        static_value(path, self)
    }
}

pub fn static_value(path: &Path, snapshot: &StaticSnapshot) -> f64 {
    let rewards: f64 = path.vertices().iter().map(|v| snapshot.reward(v.0)).sum();
    let costs: f64 = path.arcs().map(|(i, j)| snapshot.cost(i, j)).sum();
    rewards - costs
}
