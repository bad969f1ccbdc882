#![allow(dead_code)]

use rand::Rng;
use rescue_planner::graph::StaticSnapshot;

/// Complete asymmetric instance: rewards in [0, 20), costs in [1, 10).
pub fn random_snapshot<R: Rng>(rng: &mut R, n: usize) -> StaticSnapshot {
    let m = n + 2;
    let mut rewards = vec![0.0; m];
    for r in rewards.iter_mut().take(n + 1).skip(1) {
        *r = rng.random_range(0.0..20.0);
    }
    let costs = (0..m * m).map(|_| rng.random_range(1.0..10.0)).collect();
    StaticSnapshot::new(rewards, costs).unwrap()
}

/// Best value over every ordered subset of robots, by plain enumeration.
pub fn enumerate_best(s: &StaticSnapshot) -> (f64, Vec<usize>) {
    fn go(s: &StaticSnapshot, path: &mut Vec<usize>, used: &mut [bool], value: f64, best: &mut (f64, Vec<usize>)) {
        let n = s.n();
        let last = *path.last().unwrap();
        let close = value - s.cost(last, n + 1);
        if close > best.0 {
            let mut p = path.clone();
            p.push(n + 1);
            *best = (close, p);
        }
        for next in 1..=n {
            if used[next] {
                continue;
            }
            used[next] = true;
            path.push(next);
            go(s, path, used, value + s.reward(next) - s.cost(last, next), best);
            path.pop();
            used[next] = false;
        }
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    go(s, &mut vec![0], &mut vec![false; s.n() + 2], 0.0, &mut best);
    best
}
