//! Branch-and-bound for the profitable tour integer program.
//!
//! The degree constraints are relaxed into a cycle-cover (assignment) problem
//! over the `n + 2` vertices: a robot may be matched to itself, which means
//! "not visited" and costs its forgone reward, and the control center is
//! closed back to the supervisor at zero cost. Every relaxed optimum is
//! integral, so each one is an integral candidate for the lazy
//! subtour-elimination cuts. A candidate whose arcs contain a cycle away from
//! the supervisor violates the cut for that vertex set; the cut is added to
//! the pool and enforced by branching on the cycle's arcs (child `k` forbids
//! arc `k` and fixes arcs `0..k`), which partitions the feasible set.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::time::Instant;

use crate::graph::{compare_candidates, static_value, Path, StaticSnapshot, TOLERANCE};

use super::assignment;
use super::subtour::{detect_subtours, extract_path, ArcFlags};
use super::{PtpSolution, SolveError, SolveStats};

/// A search node: arc variables fixed to one or zero, plus the relaxation
/// bound on every completion of those fixings.
///
/// A self-loop `(i, i)` stands for `1 - y_i`, so fixing it to zero forces a
/// visit to robot `i`.
#[derive(Debug, Clone)]
pub struct BnbNode {
    pub fixed_one: Vec<(usize, usize)>,
    pub fixed_zero: Vec<(usize, usize)>,
    pub bound: f64,
    succ: Vec<usize>,
}

pub struct BnbSolver<'a> {
    snapshot: &'a StaticSnapshot,
    required: Vec<usize>,
    base: Vec<f64>,
    total_reward: f64,
    cut_pool: HashSet<Vec<usize>>,
    stats: SolveStats,
}

pub fn solve_bnb(snapshot: &StaticSnapshot) -> Result<PtpSolution, SolveError> {
    BnbSolver::new(snapshot).solve()
}

impl<'a> BnbSolver<'a> {
    pub fn new(snapshot: &'a StaticSnapshot) -> Self {
        let n = snapshot.n();
        let m = n + 2;
        let end = n + 1;
        let inf = f64::INFINITY;
        let mut base = vec![inf; m * m];
        for i in 0..m {
            for j in 0..m {
                base[i * m + j] = if i == j {
                    if (1..=n).contains(&i) {
                        snapshot.reward(i)
                    } else {
                        inf
                    }
                } else if j == 0 {
                    if i == end {
                        0.0
                    } else {
                        inf
                    }
                } else if i == end {
                    inf
                } else {
                    snapshot.cost(i, j)
                };
            }
        }
        Self {
            snapshot,
            required: Vec::new(),
            base,
            total_reward: snapshot.rewards().iter().sum(),
            cut_pool: HashSet::new(),
            stats: SolveStats::default(),
        }
    }

    /// Forces the solution to visit `robot`.
    pub fn require_visit(mut self, robot: usize) -> Result<Self, SolveError> {
        if !(1..=self.snapshot.n()).contains(&robot) {
            return Err(SolveError::NotARobot(robot));
        }
        if !self.required.contains(&robot) {
            self.required.push(robot);
        }
        Ok(self)
    }

    pub fn solve(mut self) -> Result<PtpSolution, SolveError> {
        let started = Instant::now();
        let snapshot = self.snapshot;
        let n = snapshot.n();

        let mut incumbent: Option<(f64, Path)> = None;
        if self.required.is_empty() {
            let direct = Path::direct(n);
            let value = static_value(&direct, snapshot);
            if value.is_finite() {
                incumbent = Some((value, direct));
            }
        }

        let root_zero: Vec<(usize, usize)> = self.required.iter().map(|&i| (i, i)).collect();
        let mut stack: Vec<BnbNode> = self.make_node(Vec::new(), root_zero).into_iter().collect();

        while let Some(node) = stack.pop() {
            self.stats.nodes += 1;
            if let Some((best, _)) = &incumbent {
                if node.bound < best - TOLERANCE {
                    continue;
                }
            }

            let flags = self.flags_of(&node);
            let subtours = detect_subtours(&flags);
            if subtours.is_empty() {
                let path = extract_path(&flags, snapshot)?;
                let value = static_value(&path, snapshot);
                let better = match &incumbent {
                    None => true,
                    Some((best, best_path)) => {
                        compare_candidates(value, &path.indices(), *best, &best_path.indices()) == Ordering::Less
                    }
                };
                if better {
                    incumbent = Some((value, path));
                }
                continue;
            }

            for cycle in &subtours {
                let mut key = cycle.clone();
                key.sort_unstable();
                if self.cut_pool.insert(key) {
                    self.stats.cuts += 1;
                }
            }
            let cycle = subtours.iter().min_by_key(|c| c.len()).expect("non-empty subtour list");
            let arcs: Vec<(usize, usize)> = (0..cycle.len())
                .map(|k| (cycle[k], cycle[(k + 1) % cycle.len()]))
                .collect();

            let mut children = Vec::with_capacity(arcs.len());
            for k in 0..arcs.len() {
                let mut fixed_one = node.fixed_one.clone();
                fixed_one.extend_from_slice(&arcs[..k]);
                let mut fixed_zero = node.fixed_zero.clone();
                fixed_zero.push(arcs[k]);
                if let Some(child) = self.make_node(fixed_one, fixed_zero) {
                    let keep = match &incumbent {
                        Some((best, _)) => child.bound >= best - TOLERANCE,
                        None => true,
                    };
                    if keep {
                        children.push(child);
                    }
                }
            }
            // Best bound is popped first; ties go to the lower branch index.
            children.reverse();
            children.sort_by(|a, b| a.bound.total_cmp(&b.bound));
            stack.extend(children);
        }

        let (_, path) = incumbent.ok_or(SolveError::Infeasible)?;
        self.stats.elapsed = started.elapsed();
        Ok(PtpSolution::from_path(path, snapshot, self.stats))
    }

    fn make_node(&self, fixed_one: Vec<(usize, usize)>, fixed_zero: Vec<(usize, usize)>) -> Option<BnbNode> {
        let m = self.snapshot.vertex_count();
        let inf = f64::INFINITY;
        let mut cost = self.base.clone();
        for &(i, j) in &fixed_zero {
            cost[i * m + j] = inf;
        }
        for &(i, j) in &fixed_one {
            for k in 0..m {
                if k != j {
                    cost[i * m + k] = inf;
                }
                if k != i {
                    cost[k * m + j] = inf;
                }
            }
        }
        let relaxed = assignment::solve(&cost, m)?;
        let assignment_bound = self.total_reward - relaxed.cost;
        let bound = assignment_bound.min(self.gain_bound(&cost, &fixed_one));
        Some(BnbNode {
            fixed_one,
            fixed_zero,
            bound,
            succ: relaxed.succ,
        })
    }

    /// Sum over robots of reward minus cheapest admissible incoming arc
    /// (only positive terms for optional robots), minus the cheapest arc into
    /// the control center.
    fn gain_bound(&self, cost: &[f64], fixed_one: &[(usize, usize)]) -> f64 {
        let n = self.snapshot.n();
        let m = n + 2;
        let end = n + 1;
        let mut bound = 0.0;
        for i in 1..=n {
            if fixed_one.contains(&(i, i)) {
                continue;
            }
            let cheapest_in = (0..=n)
                .filter(|&k| k != i)
                .map(|k| cost[k * m + i])
                .fold(f64::INFINITY, f64::min);
            let gain = self.snapshot.reward(i) - cheapest_in;
            if cost[i * m + i].is_infinite() {
                bound += gain;
            } else {
                bound += gain.max(0.0);
            }
        }
        let cheapest_close = (0..=n).map(|k| cost[k * m + end]).fold(f64::INFINITY, f64::min);
        bound - cheapest_close
    }

    fn flags_of(&self, node: &BnbNode) -> ArcFlags {
        let m = self.snapshot.vertex_count();
        let end = m - 1;
        let mut flags = ArcFlags::new(m);
        for (i, &j) in node.succ.iter().enumerate() {
            if i != j && i != end {
                flags.set(i, j, true);
            }
        }
        flags
    }
}
