//! Plain-text snapshot format.
//!
//! ```text
//! n
//! <vertex> <reward>          # n + 2 lines, vertex 0..=n+1
//! <from> <to> <cost>         # (n + 2)(n + 1) lines, from-major, self loops skipped
//! ```
//!
//! Blank lines and `#` comments are ignored when parsing. Floats are written
//! in Rust's shortest round-trip form, so write → parse is exact.

use std::fmt::Write as _;

use super::{GraphError, StaticSnapshot};

pub fn write_instance(snapshot: &StaticSnapshot) -> String {
    let m = snapshot.vertex_count();
    let mut out = String::new();
    writeln!(out, "{}", snapshot.n()).unwrap();
    for i in 0..m {
        writeln!(out, "{i} {}", snapshot.reward(i)).unwrap();
    }
    for i in 0..m {
        for j in 0..m {
            if i != j {
                writeln!(out, "{i} {j} {}", snapshot.cost(i, j)).unwrap();
            }
        }
    }
    out
}

pub fn parse_instance(text: &str) -> Result<StaticSnapshot, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let err = |line: usize, msg: &str| GraphError::Parse(format!("line {line}: {msg}"));

    let (line, first) = lines.next().ok_or_else(|| GraphError::Parse("empty input".into()))?;
    let n: usize = first.parse().map_err(|_| err(line, "expected robot count"))?;
    let m = n + 2;

    let mut rewards = vec![f64::NAN; m];
    for _ in 0..m {
        let (line, l) = lines
            .next()
            .ok_or_else(|| GraphError::Parse("missing reward lines".into()))?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        let [v, r] = fields[..] else {
            return Err(err(line, "expected `vertex reward`"));
        };
        let v: usize = v.parse().map_err(|_| err(line, "bad vertex"))?;
        let r: f64 = r.parse().map_err(|_| err(line, "bad reward"))?;
        if v >= m {
            return Err(err(line, "vertex out of range"));
        }
        if !rewards[v].is_nan() {
            return Err(err(line, "duplicate reward"));
        }
        rewards[v] = r;
    }

    let mut costs = vec![f64::NAN; m * m];
    for i in 0..m {
        costs[i * m + i] = 0.0;
    }
    for _ in 0..m * (m - 1) {
        let (line, l) = lines
            .next()
            .ok_or_else(|| GraphError::Parse("missing cost lines".into()))?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        let [i, j, c] = fields[..] else {
            return Err(err(line, "expected `from to cost`"));
        };
        let i: usize = i.parse().map_err(|_| err(line, "bad vertex"))?;
        let j: usize = j.parse().map_err(|_| err(line, "bad vertex"))?;
        let c: f64 = c.parse().map_err(|_| err(line, "bad cost"))?;
        if i >= m || j >= m || i == j {
            return Err(err(line, "arc out of range"));
        }
        if !costs[i * m + j].is_nan() {
            return Err(err(line, "duplicate arc"));
        }
        costs[i * m + j] = c;
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing data"));
    }
    StaticSnapshot::new(rewards, costs)
}
