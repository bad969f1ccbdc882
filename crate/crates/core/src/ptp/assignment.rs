//! Dense min-cost assignment (Hungarian method with potentials).
//!
//! `f64::INFINITY` marks a forbidden pair. Returns `None` when no perfect
//! assignment over finite entries exists.

pub(crate) struct Assignment {
    /// `succ[row]` is the column assigned to `row`.
    pub succ: Vec<usize>,
    pub cost: f64,
}

pub(crate) fn solve(cost: &[f64], m: usize) -> Option<Assignment> {
    debug_assert_eq!(cost.len(), m * m);
    if m == 0 {
        return Some(Assignment {
            succ: Vec::new(),
            cost: 0.0,
        });
    }
    let inf = f64::INFINITY;
    // 1-based indexing, index 0 is the virtual root column.
    let mut u = vec![0.0; m + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![inf; m + 1];
    let mut used = vec![false; m + 1];

    for row in 1..=m {
        owner[0] = row;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = inf);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let a = cost[(i0 - 1) * m + (j - 1)];
                let reduced = if a.is_finite() { a - u[i0] - v[j] } else { inf };
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return None;
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut succ = vec![0usize; m];
    for j in 1..=m {
        succ[owner[j] - 1] = j - 1;
    }
    let total = (0..m).map(|i| cost[i * m + succ[i]]).sum();
    Some(Assignment { succ, cost: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(cost: &[f64], m: usize) -> Option<f64> {
        fn rec(cost: &[f64], m: usize, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if row == m {
                if acc < *best {
                    *best = acc;
                }
                return;
            }
            for j in 0..m {
                let c = cost[row * m + j];
                if !used[j] && c.is_finite() {
                    used[j] = true;
                    rec(cost, m, row + 1, used, acc + c, best);
                    used[j] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(cost, m, 0, &mut vec![false; m], 0.0, &mut best);
        best.is_finite().then_some(best)
    }

    #[test]
    fn matches_brute_force_with_forbidden_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let m = rng.random_range(1..=6);
            let cost: Vec<f64> = (0..m * m)
                .map(|_| {
                    if rng.random_bool(0.25) {
                        f64::INFINITY
                    } else {
                        rng.random_range(0.0..10.0)
                    }
                })
                .collect();
            let got = solve(&cost, m);
            match brute_force(&cost, m) {
                None => assert!(got.is_none()),
                Some(best) => {
                    let a = got.expect("feasible");
                    assert!((a.cost - best).abs() < 1e-9, "{} vs {}", a.cost, best);
                    let mut cols = a.succ.clone();
                    cols.sort();
                    assert_eq!(cols, (0..m).collect::<Vec<_>>());
                }
            }
        }
    }
}
