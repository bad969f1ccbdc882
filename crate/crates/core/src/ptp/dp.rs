//! Subset dynamic program over (visited robots, last robot).
//!
//! `value[S][j]` is the best reward-minus-cost of a path that leaves the
//! supervisor, visits exactly the robots in `S` and stops at `j ∈ S`. Ties
//! inside a state keep the lexicographically smaller prefix, which is
//! consistent because all prefixes of a state share their length.

use std::cmp::Ordering;
use std::time::Instant;

use crate::graph::{compare_candidates, Path, StaticSnapshot, TOLERANCE};

use super::{PtpSolution, SolveError, SolveStats};

/// Memory guard: the table holds `2^n * n` entries.
pub const DP_MAX_ROBOTS: usize = 20;

const FROM_SUPERVISOR: u8 = u8::MAX;

pub fn solve_dp(snapshot: &StaticSnapshot) -> Result<PtpSolution, SolveError> {
    let started = Instant::now();
    let n = snapshot.n();
    if n > DP_MAX_ROBOTS {
        return Err(SolveError::TooLarge { n, max: DP_MAX_ROBOTS });
    }
    let end = n + 1;
    let states = 1usize << n;
    let idx = |mask: usize, j: usize| mask * n + j;
    let mut value = vec![f64::NEG_INFINITY; states * n];
    let mut pred = vec![FROM_SUPERVISOR; states * n];

    let reconstruct = |pred: &[u8], mut mask: usize, mut j: usize| -> Vec<usize> {
        let mut seq = Vec::new();
        loop {
            seq.push(j + 1);
            let p = pred[idx(mask, j)];
            if p == FROM_SUPERVISOR {
                break;
            }
            mask ^= 1 << j;
            j = p as usize;
        }
        seq.reverse();
        seq
    };

    for j in 0..n {
        value[idx(1 << j, j)] = snapshot.reward(j + 1) - snapshot.cost(0, j + 1);
    }

    let mut expanded = 0u64;
    for mask in 1..states {
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = value[idx(mask, j)];
            if here == f64::NEG_INFINITY {
                continue;
            }
            expanded += 1;
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let cand = here + snapshot.reward(k + 1) - snapshot.cost(j + 1, k + 1);
                if cand == f64::NEG_INFINITY {
                    continue;
                }
                let target = idx(mask | (1 << k), k);
                let current = value[target];
                let take = if cand > current + TOLERANCE {
                    true
                } else if cand >= current - TOLERANCE {
                    let incumbent = pred[target];
                    if incumbent == FROM_SUPERVISOR {
                        false
                    } else {
                        reconstruct(&pred, mask, j) < reconstruct(&pred, mask, incumbent as usize)
                    }
                } else {
                    false
                };
                if take {
                    value[target] = cand;
                    pred[target] = j as u8;
                }
            }
        }
    }

    let mut best_value = -snapshot.cost(0, end);
    let mut best_seq: Vec<usize> = vec![0, end];
    for mask in 1..states {
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let v = value[idx(mask, j)] - snapshot.cost(j + 1, end);
            if v == f64::NEG_INFINITY || v < best_value - TOLERANCE {
                continue;
            }
            let mut seq = vec![0];
            seq.extend(reconstruct(&pred, mask, j));
            seq.push(end);
            if compare_candidates(v, &seq, best_value, &best_seq) == Ordering::Less {
                best_value = v;
                best_seq = seq;
            }
        }
    }

    if best_value == f64::NEG_INFINITY {
        return Err(SolveError::Infeasible);
    }
    let path = Path::from_indices(n, &best_seq).expect("DP reconstructs loop-free paths");
    let stats = SolveStats {
        nodes: expanded,
        cuts: 0,
        elapsed: started.elapsed(),
    };
    Ok(PtpSolution::from_path(path, snapshot, stats))
}
