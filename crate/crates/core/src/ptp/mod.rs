//! Exact solvers for the static traversal problem: choose which robots to
//! visit, and in what order, on the way from the supervisor to the control
//! center so that collected reward minus travel cost is maximal.
//!
//! [`solve_bnb`] is the production solver: branch-and-bound over the
//! integer program with subtour-elimination cuts generated lazily at integral
//! candidates. [`solve_dp`] is an independent subset dynamic program used as
//! an oracle.

mod assignment;
mod bnb;
mod dp;
mod subtour;

use std::time::Duration;

use thiserror::Error;

use crate::graph::{static_value, Path, StaticSnapshot};

pub use bnb::{solve_bnb, BnbNode, BnbSolver};
pub use dp::{solve_dp, DP_MAX_ROBOTS};
pub use subtour::{detect_subtours, extract_path, ArcFlags};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("no finite-cost path reaches the control center")]
    Infeasible,
    #[error("{n} robots exceeds the solver limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("malformed arc selection: {0}")]
    MalformedFlags(String),
    #[error("required vertex {0} is not a robot")]
    NotARobot(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    /// Search nodes (branch-and-bound) or DP states expanded.
    pub nodes: u64,
    /// Distinct subtour cuts added to the lazy pool.
    pub cuts: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtpSolution {
    pub path: Path,
    pub objective: f64,
    /// `node_flags[i]` is `y_i`: whether vertex `i` lies on the path.
    pub node_flags: Vec<bool>,
    /// `x_ij` for every arc.
    pub arc_flags: ArcFlags,
    pub stats: SolveStats,
}

impl PtpSolution {
    pub(crate) fn from_path(path: Path, snapshot: &StaticSnapshot, stats: SolveStats) -> Self {
        let m = snapshot.vertex_count();
        let mut node_flags = vec![false; m];
        for v in path.vertices() {
            node_flags[v.0] = true;
        }
        Self {
            objective: static_value(&path, snapshot),
            arc_flags: ArcFlags::from_path(m, &path),
            node_flags,
            path,
            stats,
        }
    }

    /// Checks the degree, endpoint and subtour constraints of the integer
    /// program against the stored flags.
    pub fn satisfies_constraints(&self) -> bool {
        let m = self.node_flags.len();
        let end = m - 1;
        let out = |i: usize| self.arc_flags.successors(i).count();
        let inc = |i: usize| (0..m).filter(|&k| self.arc_flags.get(k, i)).count();
        let robots_ok = (1..end).all(|i| {
            let y = usize::from(self.node_flags[i]);
            out(i) == y && inc(i) == y && !self.arc_flags.get(i, i)
        });
        robots_ok
            && out(0) == 1
            && inc(0) == 0
            && out(end) == 0
            && inc(end) == 1
            && detect_subtours(&self.arc_flags).is_empty()
    }
}
