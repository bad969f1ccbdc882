use super::grid::{Cell, Geometry};

/// A block of consecutive whole crop rows assigned to one robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RobotRegion {
    pub first_row: usize,
    pub row_count: usize,
}

/// Serpentine coverage of `region`: down the first row, across the bottom
/// margin, up the next row, across the top margin, and so on. Each crossing
/// adds the two margin cells at the ends of the rows being joined.
pub fn boustrophedon_plan(geometry: &Geometry, region: RobotRegion) -> Vec<Cell> {
    let top = geometry.margin;
    let bottom = geometry.margin + geometry.row_length - 1;
    let mut plan = Vec::with_capacity(region.row_count * (geometry.row_length + 2));
    for k in 0..region.row_count {
        let x = geometry.row_x(region.first_row + k);
        let downward = k % 2 == 0;
        if k > 0 {
            let y = if downward { top - 1 } else { bottom + 1 };
            plan.push(Cell { x: x - 1, y });
            plan.push(Cell { x, y });
        }
        if downward {
            plan.extend((top..=bottom).map(|y| Cell { x, y }));
        } else {
            plan.extend((top..=bottom).rev().map(|y| Cell { x, y }));
        }
    }
    plan
}

/// Margin cell just above the region's first row, where its robot starts.
pub fn start_cell(geometry: &Geometry, region: RobotRegion) -> Cell {
    Cell {
        x: geometry.row_x(region.first_row),
        y: geometry.margin - 1,
    }
}
