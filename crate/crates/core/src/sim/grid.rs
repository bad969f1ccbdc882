use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

/// Farm layout: `rows` vertical crop rows of `row_length` cells each,
/// surrounded on all sides by `margin` cells of free space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geometry {
    pub rows: usize,
    pub row_length: usize,
    pub margin: usize,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            rows: 36,
            row_length: 40,
            margin: 2,
        }
    }
}

impl Geometry {
    pub fn width(&self) -> usize {
        self.rows + 2 * self.margin
    }

    pub fn height(&self) -> usize {
        self.row_length + 2 * self.margin
    }

    pub fn cell_count(&self) -> usize {
        self.width() * self.height()
    }

    pub fn field_cell_count(&self) -> usize {
        self.rows * self.row_length
    }

    pub fn is_field(&self, c: Cell) -> bool {
        (self.margin..self.margin + self.rows).contains(&c.x)
            && (self.margin..self.margin + self.row_length).contains(&c.y)
    }

    /// Column of crop row `row`.
    pub fn row_x(&self, row: usize) -> usize {
        self.margin + row
    }

    /// Index of a field cell in row-major (row, offset) order.
    pub fn field_index(&self, c: Cell) -> Option<usize> {
        self.is_field(c)
            .then(|| (c.x - self.margin) * self.row_length + (c.y - self.margin))
    }

    pub fn control_center(&self) -> Cell {
        Cell { x: 0, y: 0 }
    }

    fn index(&self, c: Cell) -> usize {
        c.y * self.width() + c.x
    }

    fn cell(&self, index: usize) -> Cell {
        Cell {
            x: index % self.width(),
            y: index / self.width(),
        }
    }

    /// Cells reachable in one step, in the fixed order up, down, left, right.
    /// Moves touching a crop-row cell must be vertical.
    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        let (w, h) = (self.width(), self.height());
        let candidates = [
            (c.y > 0).then(|| Cell { x: c.x, y: c.y - 1 }),
            (c.y + 1 < h).then(|| Cell { x: c.x, y: c.y + 1 }),
            (c.x > 0).then(|| Cell { x: c.x - 1, y: c.y }),
            (c.x + 1 < w).then(|| Cell { x: c.x + 1, y: c.y }),
        ];
        candidates.into_iter().enumerate().filter_map(move |(k, n)| {
            let n = n?;
            let vertical = k < 2;
            (vertical || (!self.is_field(c) && !self.is_field(n))).then_some(n)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

/// Shortest-path distances on the movement-constrained grid, computed by
/// breadth-first search per source cell on first use.
pub struct GridMap {
    geometry: Geometry,
    from: Vec<OnceLock<Box<[u32]>>>,
    diameter: OnceLock<u32>,
}

impl std::fmt::Debug for GridMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridMap").field("geometry", &self.geometry).finish()
    }
}

impl GridMap {
    pub fn new(geometry: Geometry) -> Self {
        Self {
            geometry,
            from: (0..geometry.cell_count()).map(|_| OnceLock::new()).collect(),
            diameter: OnceLock::new(),
        }
    }

    /// Process-wide map for `geometry`, shared between trials.
    pub fn shared(geometry: Geometry) -> Arc<GridMap> {
        static MAPS: OnceLock<Mutex<HashMap<Geometry, Arc<GridMap>>>> = OnceLock::new();
        let maps = MAPS.get_or_init(Default::default);
        let mut maps = maps.lock().expect("grid map cache poisoned");
        maps.entry(geometry)
            .or_insert_with(|| Arc::new(GridMap::new(geometry)))
            .clone()
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    fn table(&self, source: Cell) -> &[u32] {
        self.from[self.geometry.index(source)].get_or_init(|| self.bfs(source))
    }

    fn bfs(&self, source: Cell) -> Box<[u32]> {
        let g = &self.geometry;
        let mut dist = vec![u32::MAX; g.cell_count()];
        let mut queue = VecDeque::new();
        dist[g.index(source)] = 0;
        queue.push_back(source);
        while let Some(c) = queue.pop_front() {
            let d = dist[g.index(c)];
            for n in g.neighbors(c) {
                let k = g.index(n);
                if dist[k] == u32::MAX {
                    dist[k] = d + 1;
                    queue.push_back(n);
                }
            }
        }
        dist.into_boxed_slice()
    }

    pub fn distance(&self, a: Cell, b: Cell) -> u32 {
        self.table(a)[self.geometry.index(b)]
    }

    /// First move from `from` along a shortest path to `to`; ties resolved by
    /// neighbor order. Stays put when already there.
    pub fn next_step(&self, from: Cell, to: Cell) -> Cell {
        if from == to {
            return from;
        }
        let to_target = self.table(to);
        let here = to_target[self.geometry.index(from)];
        self.geometry
            .neighbors(from)
            .find(|&n| to_target[self.geometry.index(n)] + 1 == here)
            .expect("grid is connected")
    }

    /// Longest shortest path between any two cells.
    pub fn diameter(&self) -> u32 {
        *self.diameter.get_or_init(|| {
            (0..self.geometry.cell_count())
                .map(|k| {
                    let c = self.geometry.cell(k);
                    self.bfs(c).iter().copied().max().unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        })
    }
}
