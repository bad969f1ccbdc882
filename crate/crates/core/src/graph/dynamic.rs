use super::{GraphError, Path, StaticSnapshot, TimeFn};

/// Graph whose robot rewards and raw arc travel times vary with time.
///
/// Rewards are in distance units; `cost(i, j)` is a raw travel time and the
/// value function scales it by `mu`.
#[derive(Debug, Clone)]
pub struct DynamicGraph {
    n: usize,
    rewards: Vec<TimeFn>,
    costs: Vec<TimeFn>,
    lambda: f64,
    mu: f64,
}

impl DynamicGraph {
    /// `robot_rewards` holds the `n` robot reward functions; the supervisor and
    /// control center rewards are fixed at zero. `costs` is a row-major
    /// `(n + 2)^2` matrix of travel-time functions (diagonal ignored).
    pub fn new(robot_rewards: Vec<TimeFn>, costs: Vec<TimeFn>, lambda: f64, mu: f64) -> Result<Self, GraphError> {
        let n = robot_rewards.len();
        let m = n + 2;
        if costs.len() != m * m {
            return Err(GraphError::WrongLength {
                what: "cost functions",
                expected: m * m,
                got: costs.len(),
            });
        }
        for (what, v) in [("lambda", lambda), ("mu", mu)] {
            if v.is_nan() || v < 0.0 {
                return Err(GraphError::InvalidValue {
                    what,
                    location: "graph".into(),
                    value: v,
                });
            }
        }
        let mut rewards = Vec::with_capacity(m);
        rewards.push(TimeFn::Constant(0.0));
        rewards.extend(robot_rewards);
        rewards.push(TimeFn::Constant(0.0));
        Ok(Self {
            n,
            rewards,
            costs,
            lambda,
            mu,
        })
    }

    /// A time-invariant graph from a snapshot, with `mu = 1` so snapshot costs
    /// double as travel times.
    pub fn constant(snapshot: &StaticSnapshot, lambda: f64) -> Self {
        let n = snapshot.n();
        let robot_rewards = (1..=n).map(|i| TimeFn::Constant(snapshot.reward(i))).collect();
        let costs = snapshot.costs().iter().map(|&c| TimeFn::Constant(c)).collect();
        Self::new(robot_rewards, costs, lambda, 1.0).expect("snapshot is well formed")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn reward_at(&self, i: usize, t: f64) -> f64 {
        self.rewards[i].eval(t)
    }

    /// Raw travel time of arc `(i, j)` when departing at `t`.
    pub fn travel_time(&self, i: usize, j: usize, t: f64) -> f64 {
        if i == j {
            return 0.0;
        }
        self.costs[i * (self.n + 2) + j].eval(t)
    }

    pub fn is_time_invariant(&self) -> bool {
        self.rewards.iter().chain(self.costs.iter()).all(TimeFn::is_constant)
    }
}

/// Per-robot traversed distance and the weight of the progress penalty on
/// robot-to-robot arcs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PriorityParams {
    pub weight: f64,
    /// `traversed[i - 1]` is the distance robot `i` has covered.
    pub traversed: Vec<f64>,
}

impl PriorityParams {
    pub fn none() -> Self {
        Self::default()
    }

    fn penalty(&self, i: usize, j: usize) -> f64 {
        if self.weight == 0.0 || self.traversed.is_empty() {
            return 0.0;
        }
        self.weight * (self.traversed[i - 1] - self.traversed[j - 1]).max(0.0)
    }
}

/// Arrival time at each vertex of the path, starting at zero.
pub fn arrival_times(path: &Path, graph: &DynamicGraph) -> Vec<f64> {
    let mut times = Vec::with_capacity(path.len() + 1);
    let mut t = 0.0;
    times.push(t);
    for (i, j) in path.arcs() {
        t += graph.travel_time(i, j, t);
        times.push(t);
    }
    times
}

/// Discounted reward minus discounted scaled travel cost along the path. Each
/// arc cost is discounted at its departure time.
pub fn dynamic_value(path: &Path, graph: &DynamicGraph) -> f64 {
    let times = arrival_times(path, graph);
    let vertices = path.vertices();
    let mut value = 0.0;
    for (k, v) in vertices.iter().enumerate() {
        let t = times[k];
        let discount = (-graph.lambda * t).exp();
        value += discount * graph.reward_at(v.0, t);
        if let Some(next) = vertices.get(k + 1) {
            value -= discount * graph.mu * graph.travel_time(v.0, next.0, t);
        }
    }
    value
}

/// Freezes the graph at `at_time`: rewards are sampled, costs are scaled by
/// `mu` and robot-to-robot arcs pick up the progress penalty.
pub fn make_snapshot(graph: &DynamicGraph, priority: &PriorityParams, at_time: f64) -> StaticSnapshot {
    let n = graph.n;
    let m = n + 2;
    let rewards = (0..m).map(|i| graph.reward_at(i, at_time)).collect();
    let mut costs = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let mut c = graph.mu * graph.travel_time(i, j, at_time);
            if (1..=n).contains(&i) && (1..=n).contains(&j) {
                c += priority.penalty(i, j);
            }
            costs[i * m + j] = c;
        }
    }
    StaticSnapshot::new(rewards, costs).expect("clamped time functions are nonnegative")
}
