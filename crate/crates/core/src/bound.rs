//! Exhaustive solver for the time-varying problem and the gap bound between
//! the static and dynamic optima.
//!
//! With reward drift at most `alpha` per unit time, cost drift at most `beta`,
//! discount `lambda`, `|r_i - c_ij| <= epsilon` on the static graph and every
//! arc traversal at most `dt_max`, the static optimum differs from the dynamic
//! one by at most
//!
//! ```text
//! (alpha + beta) (n + 1) / (lambda e)  +  sum_{k=0..=n} (1 - exp(-lambda k dt_max)) epsilon
//! ```

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::graph::{
    compare_candidates, make_snapshot, write_instance, DynamicGraph, GraphError, Path, PriorityParams, StaticSnapshot,
    TimeFn, TOLERANCE,
};
use crate::ptp::{solve_dp, SolveError};

/// Largest fleet [`solve_dynamic_exact`] will enumerate.
pub const EXACT_MAX_ROBOTS: usize = 9;
/// Largest fleet [`verify_bound`] accepts.
pub const VERIFY_MAX_ROBOTS: usize = 7;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("{n} robots exceeds the enumeration limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("slope {slope} at {location} exceeds its bound {limit}")]
    SlopeOutOfBounds { location: String, slope: f64, limit: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("gap {gap} exceeds bound {bound}; instance:\n{instance}")]
    Violation { gap: f64, bound: f64, instance: String },
}

/// A graph whose values drift linearly from a base snapshot, clamped at zero.
///
/// Costs serve both as travel times and as value units (`mu = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDynamicGraph {
    base: StaticSnapshot,
    reward_slopes: Vec<f64>,
    cost_slopes: Vec<f64>,
    alpha: f64,
    beta: f64,
    lambda: f64,
}

impl LinearDynamicGraph {
    /// `reward_slopes` has one entry per vertex (terminals must be zero),
    /// `cost_slopes` is a row-major `(n + 2)^2` matrix.
    pub fn new(
        base: StaticSnapshot,
        reward_slopes: Vec<f64>,
        cost_slopes: Vec<f64>,
        alpha: f64,
        beta: f64,
        lambda: f64,
    ) -> Result<Self, BoundError> {
        let m = base.vertex_count();
        if reward_slopes.len() != m {
            return Err(GraphError::WrongLength {
                what: "reward slopes",
                expected: m,
                got: reward_slopes.len(),
            }
            .into());
        }
        if cost_slopes.len() != m * m {
            return Err(GraphError::WrongLength {
                what: "cost slopes",
                expected: m * m,
                got: cost_slopes.len(),
            }
            .into());
        }
        for (what, v) in [("alpha", alpha), ("beta", beta), ("lambda", lambda)] {
            if v.is_nan() || v < 0.0 {
                return Err(GraphError::InvalidValue {
                    what,
                    location: "linear graph".into(),
                    value: v,
                }
                .into());
            }
        }
        for (i, &s) in reward_slopes.iter().enumerate() {
            let terminal = i == 0 || i == m - 1;
            if s.abs() > alpha || (terminal && s != 0.0) {
                return Err(BoundError::SlopeOutOfBounds {
                    location: format!("reward {i}"),
                    slope: s,
                    limit: if terminal { 0.0 } else { alpha },
                });
            }
        }
        for (k, &q) in cost_slopes.iter().enumerate() {
            if q.abs() > beta {
                return Err(BoundError::SlopeOutOfBounds {
                    location: format!("arc ({}, {})", k / m, k % m),
                    slope: q,
                    limit: beta,
                });
            }
        }
        Ok(Self {
            base,
            reward_slopes,
            cost_slopes,
            alpha,
            beta,
            lambda,
        })
    }

    /// Random instance: rewards `U[0, 20]`, base costs `U[1, 10]`, slopes
    /// `U[-alpha, alpha]` and `U[-beta, beta]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, alpha: f64, beta: f64, lambda: f64) -> Self {
        let m = n + 2;
        let mut rewards = vec![0.0; m];
        let mut reward_slopes = vec![0.0; m];
        for i in 1..=n {
            rewards[i] = rng.random_range(0.0..=20.0);
            reward_slopes[i] = symmetric(rng, alpha);
        }
        let mut costs = vec![0.0; m * m];
        let mut cost_slopes = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    costs[i * m + j] = rng.random_range(1.0..=10.0);
                    cost_slopes[i * m + j] = symmetric(rng, beta);
                }
            }
        }
        let base = StaticSnapshot::new(rewards, costs).expect("generated values are valid");
        Self::new(base, reward_slopes, cost_slopes, alpha, beta, lambda).expect("slopes within bounds")
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn base(&self) -> &StaticSnapshot {
        &self.base
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn to_dynamic(&self) -> DynamicGraph {
        let n = self.n();
        let m = n + 2;
        let robot_rewards = (1..=n)
            .map(|i| TimeFn::Linear {
                base: self.base.reward(i),
                slope: self.reward_slopes[i],
            })
            .collect();
        let costs = (0..m * m)
            .map(|k| TimeFn::Linear {
                base: self.base.costs()[k],
                slope: self.cost_slopes[k],
            })
            .collect();
        DynamicGraph::new(robot_rewards, costs, self.lambda, 1.0).expect("validated on construction")
    }

    /// A travel-time bound valid for every arc along any loop-free path.
    ///
    /// Departures happen no later than `n * dt`, so `dt` must satisfy
    /// `dt >= c_max + q_max * n * dt`; infinite when drift is too fast.
    pub fn travel_time_bound(&self) -> f64 {
        let m = self.base.vertex_count();
        let c_max = (0..m * m)
            .filter(|k| k / m != k % m)
            .map(|k| self.base.costs()[k])
            .fold(0.0, f64::max);
        let q_max = self.cost_slopes.iter().copied().fold(0.0, f64::max);
        let growth = q_max * self.n() as f64;
        if growth >= 1.0 {
            f64::INFINITY
        } else {
            c_max / (1.0 - growth)
        }
    }
}

impl fmt::Display for LinearDynamicGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# alpha {} beta {} lambda {}", self.alpha, self.beta, self.lambda)?;
        f.write_str(&write_instance(&self.base))?;
        writeln!(f, "# reward slopes {:?}", self.reward_slopes)?;
        write!(f, "# cost slopes {:?}", self.cost_slopes)
    }
}

fn symmetric<R: Rng + ?Sized>(rng: &mut R, limit: f64) -> f64 {
    if limit == 0.0 {
        0.0
    } else {
        rng.random_range(-limit..=limit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub dt_max: f64,
    pub n: usize,
}

/// Gap bound; at `lambda = 0` the drift term is its limit (infinite unless
/// there is no drift) and every discount summand vanishes.
pub fn theorem1_bound(p: &BoundParams) -> f64 {
    let drift = p.alpha + p.beta;
    let drift_term = if p.lambda == 0.0 {
        if drift > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        drift * (p.n as f64 + 1.0) / (p.lambda * std::f64::consts::E)
    };
    let discount_term: f64 = if p.lambda == 0.0 || p.epsilon == 0.0 {
        0.0
    } else {
        (1..=p.n)
            .map(|k| 1.0 - (-p.lambda * k as f64 * p.dt_max).exp())
            .sum::<f64>()
            * p.epsilon
    };
    drift_term + discount_term
}

/// Largest `|r_i - c_ij|` over all arcs.
pub fn estimate_epsilon(snapshot: &StaticSnapshot) -> f64 {
    let m = snapshot.vertex_count();
    let mut eps: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                eps = eps.max((snapshot.reward(i) - snapshot.cost(i, j)).abs());
            }
        }
    }
    eps
}

/// Enumerates every loop-free path and returns the best by dynamic value.
pub fn solve_dynamic_exact(graph: &LinearDynamicGraph) -> Result<(Path, f64), BoundError> {
    let n = graph.n();
    if n > EXACT_MAX_ROBOTS {
        return Err(BoundError::TooLarge {
            n,
            max: EXACT_MAX_ROBOTS,
        });
    }
    let dynamic = graph.to_dynamic();
    let mut search = Enumeration {
        graph: &dynamic,
        end: n + 1,
        best_value: f64::NEG_INFINITY,
        best: Vec::new(),
        prefix: vec![0],
        used: vec![false; n + 2],
    };
    search.used[0] = true;
    search.extend(0.0, 0.0);
    let path = Path::from_indices(n, &search.best).expect("enumerated paths are valid");
    Ok((path, search.best_value))
}

struct Enumeration<'a> {
    graph: &'a DynamicGraph,
    end: usize,
    best_value: f64,
    best: Vec<usize>,
    prefix: Vec<usize>,
    used: Vec<bool>,
}

impl Enumeration<'_> {
    /// `value` covers the prefix rewards; `t` is the arrival time at its last
    /// vertex.
    fn extend(&mut self, t: f64, value: f64) {
        let here = *self.prefix.last().expect("prefix starts at the supervisor");
        let discount = (-self.graph.lambda() * t).exp();
        for next in 1..=self.end {
            if self.used[next] {
                continue;
            }
            let travel = self.graph.travel_time(here, next, t);
            let after_cost = value - discount * self.graph.mu() * travel;
            let arrival = t + travel;
            if next == self.end {
                self.prefix.push(next);
                if self.best.is_empty()
                    || compare_candidates(after_cost, &self.prefix, self.best_value, &self.best) == Ordering::Less
                {
                    self.best_value = after_cost;
                    self.best = self.prefix.clone();
                }
                self.prefix.pop();
                continue;
            }
            let gained = after_cost + (-self.graph.lambda() * arrival).exp() * self.graph.reward_at(next, arrival);
            self.used[next] = true;
            self.prefix.push(next);
            self.extend(arrival, gained);
            self.prefix.pop();
            self.used[next] = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub static_path: Path,
    pub static_optimum: f64,
    pub dynamic_path: Path,
    pub dynamic_optimum: f64,
    pub gap: f64,
    pub bound: f64,
    pub params: BoundParams,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.gap <= self.bound + TOLERANCE
    }
}

/// Solves both problems exactly and checks the gap against the bound.
pub fn verify_bound(graph: &LinearDynamicGraph, dt_max: f64) -> Result<BoundReport, BoundError> {
    let n = graph.n();
    if n > VERIFY_MAX_ROBOTS {
        return Err(BoundError::TooLarge {
            n,
            max: VERIFY_MAX_ROBOTS,
        });
    }
    let snapshot = make_snapshot(&graph.to_dynamic(), &PriorityParams::none(), 0.0);
    let static_solution = solve_dp(&snapshot)?;
    let (dynamic_path, dynamic_optimum) = solve_dynamic_exact(graph)?;
    let params = BoundParams {
        alpha: graph.alpha(),
        beta: graph.beta(),
        epsilon: estimate_epsilon(&snapshot),
        lambda: graph.lambda(),
        dt_max,
        n,
    };
    let report = BoundReport {
        gap: (static_solution.objective - dynamic_optimum).abs(),
        bound: theorem1_bound(&params),
        static_path: static_solution.path,
        static_optimum: static_solution.objective,
        dynamic_path,
        dynamic_optimum,
        params,
    };
    if !report.holds() {
        return Err(BoundError::Violation {
            gap: report.gap,
            bound: report.bound,
            instance: graph.to_string(),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dynamic_value;

    fn params(alpha: f64, beta: f64, epsilon: f64, lambda: f64, dt_max: f64, n: usize) -> BoundParams {
        BoundParams {
            alpha,
            beta,
            epsilon,
            lambda,
            dt_max,
            n,
        }
    }

    #[test]
    fn bound_vanishes_without_drift_or_discount() {
        assert_eq!(theorem1_bound(&params(0.0, 0.0, 5.0, 0.0, 3.0, 4)), 0.0);
    }

    #[test]
    fn bound_at_zero_lambda_with_drift_is_infinite() {
        assert!(theorem1_bound(&params(0.1, 0.0, 5.0, 0.0, 3.0, 4)).is_infinite());
    }

    #[test]
    fn bound_without_drift_is_discount_term_only() {
        let (lambda, dt, eps) = (0.3, 2.0, 4.0);
        let expected: f64 = (0..=3).map(|k| (1.0 - (-lambda * k as f64 * dt).exp()) * eps).sum();
        let got = theorem1_bound(&params(0.0, 0.0, eps, lambda, dt, 3));
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn epsilon_examples() {
        let s = StaticSnapshot::new(vec![0.0, 10.0, 0.0], vec![4.0; 9]).unwrap();
        assert_eq!(estimate_epsilon(&s), 6.0);
        let s = StaticSnapshot::new(vec![0.0, 0.0, 0.0], vec![0.0; 9]).unwrap();
        assert_eq!(estimate_epsilon(&s), 0.0);
    }

    #[test]
    fn slopes_are_checked() {
        let base = StaticSnapshot::new(vec![0.0, 1.0, 0.0], vec![1.0; 9]).unwrap();
        let err = LinearDynamicGraph::new(base.clone(), vec![0.0, 0.2, 0.0], vec![0.0; 9], 0.1, 0.0, 0.1);
        assert!(matches!(err, Err(BoundError::SlopeOutOfBounds { .. })));
        let err = LinearDynamicGraph::new(base, vec![0.1, 0.0, 0.0], vec![0.0; 9], 0.1, 0.0, 0.1);
        assert!(matches!(err, Err(BoundError::SlopeOutOfBounds { .. })));
    }

    #[test]
    fn exact_solver_no_robots() {
        let base = StaticSnapshot::new(vec![0.0, 0.0], vec![0.0, 3.5, 1.0, 0.0]).unwrap();
        let g = LinearDynamicGraph::new(base, vec![0.0; 2], vec![0.0, 0.2, 0.0, 0.0], 0.0, 0.5, 0.3).unwrap();
        let (path, value) = solve_dynamic_exact(&g).unwrap();
        assert_eq!(path.indices(), vec![0, 1]);
        assert_eq!(value, -3.5);
    }

    #[test]
    fn exact_value_matches_reevaluation() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = LinearDynamicGraph::random(&mut rng, 3, 0.3, 0.3, 0.2);
            let (path, value) = solve_dynamic_exact(&g).unwrap();
            let again = dynamic_value(&path, &g.to_dynamic());
            assert!((value - again).abs() < 1e-9);
        }
    }

    #[test]
    fn enumeration_guard() {
        let n = EXACT_MAX_ROBOTS + 1;
        let m = n + 2;
        let base = StaticSnapshot::new(vec![0.0; m], vec![1.0; m * m]).unwrap();
        let g = LinearDynamicGraph::new(base, vec![0.0; m], vec![0.0; m * m], 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(solve_dynamic_exact(&g), Err(BoundError::TooLarge { .. })));
    }
}
