use crate::graph::{Path, StaticSnapshot, VertexId};

use super::SolveError;

/// Binary arc selection over a complete directed graph with `m` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArcFlags {
    m: usize,
    bits: Vec<bool>,
}

impl ArcFlags {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            m: vertex_count,
            bits: vec![false; vertex_count * vertex_count],
        }
    }

    pub fn from_arcs(vertex_count: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut flags = Self::new(vertex_count);
        for (i, j) in arcs {
            flags.set(i, j, true);
        }
        flags
    }

    pub fn from_path(vertex_count: usize, path: &Path) -> Self {
        Self::from_arcs(vertex_count, path.arcs())
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        self.bits[i * self.m + j] = on;
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.m).filter(move |&j| self.get(i, j))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m * self.m)
            .filter(|&k| self.bits[k])
            .map(|k| (k / self.m, k % self.m))
    }

    pub fn arc_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Finds every cycle of selected arcs that is disconnected from vertex 0.
///
/// Expects degree-feasible flags (at most one arc in and out per vertex). Each
/// cycle is listed in traversal order starting from its smallest vertex, and
/// cycles are sorted by that vertex.
pub fn detect_subtours(flags: &ArcFlags) -> Vec<Vec<usize>> {
    let m = flags.vertex_count();
    let succ: Vec<Option<usize>> = (0..m).map(|i| flags.successors(i).next()).collect();

    let mut seen = vec![false; m];
    let mut v = 0;
    while !seen[v] {
        seen[v] = true;
        match succ[v] {
            Some(w) => v = w,
            None => break,
        }
    }

    let mut cycles = Vec::new();
    for start in 0..m {
        if seen[start] || succ[start].is_none() {
            continue;
        }
        let mut walk = vec![start];
        let mut on_walk = vec![false; m];
        on_walk[start] = true;
        let mut cur = start;
        let closed = loop {
            match succ[cur] {
                Some(next) if next == start => break true,
                Some(next) if !on_walk[next] && !seen[next] => {
                    on_walk[next] = true;
                    walk.push(next);
                    cur = next;
                }
                _ => break false,
            }
        };
        for &w in &walk {
            seen[w] = true;
        }
        if closed {
            cycles.push(walk);
        }
    }
    cycles
}

/// Follows selected arcs from the supervisor to the control center.
pub fn extract_path(flags: &ArcFlags, snapshot: &StaticSnapshot) -> Result<Path, SolveError> {
    let m = snapshot.vertex_count();
    if flags.vertex_count() != m {
        return Err(SolveError::MalformedFlags(format!(
            "flags cover {} vertices, snapshot has {m}",
            flags.vertex_count()
        )));
    }
    let end = m - 1;
    let mut visited = vec![false; m];
    let mut vertices = vec![VertexId(0)];
    visited[0] = true;
    let mut cur = 0;
    while cur != end {
        let mut next = flags.successors(cur);
        let Some(v) = next.next() else {
            return Err(SolveError::MalformedFlags(format!("walk dead-ends at vertex {cur}")));
        };
        if next.next().is_some() {
            return Err(SolveError::MalformedFlags(format!(
                "vertex {cur} has several outgoing arcs"
            )));
        }
        if visited[v] {
            return Err(SolveError::MalformedFlags(format!("walk revisits vertex {v}")));
        }
        visited[v] = true;
        vertices.push(VertexId(v));
        cur = v;
    }
    Path::new(snapshot.n(), vertices).map_err(|e| SolveError::MalformedFlags(e.to_string()))
}
