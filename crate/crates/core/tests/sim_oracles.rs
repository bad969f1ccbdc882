use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rescue_planner::graph::VertexId;
use rescue_planner::sim::{
    boustrophedon_plan, build_planning_graph, expected_distance, generate_field, Cell, FailureField, FarmConfig,
    FieldPattern, Geometry, GridMap, RobotRegion, RobotStatus, WorldState,
};

/// All-pairs distances by repeated relaxation until nothing changes.
type Distances = BTreeMap<((usize, usize), (usize, usize)), u32>;

fn flood_fill(g: &Geometry) -> Distances {
    let (w, h) = (g.rows + 2 * g.margin, g.row_length + 2 * g.margin);
    let crop =
        |x: usize, y: usize| x >= g.margin && x < g.margin + g.rows && y >= g.margin && y < g.margin + g.row_length;
    let cells: Vec<(usize, usize)> = (0..h).flat_map(|y| (0..w).map(move |x| (x, y))).collect();
    let adjacent = |a: (usize, usize), b: (usize, usize)| {
        let dx = a.0.abs_diff(b.0);
        let dy = a.1.abs_diff(b.1);
        match (dx, dy) {
            (0, 1) => true,
            (1, 0) => !crop(a.0, a.1) && !crop(b.0, b.1),
            _ => false,
        }
    };
    let mut out = BTreeMap::new();
    for &s in &cells {
        let mut dist: BTreeMap<(usize, usize), u32> = cells.iter().map(|&c| (c, u32::MAX)).collect();
        dist.insert(s, 0);
        let mut changed = true;
        while changed {
            changed = false;
            for &a in &cells {
                let da = dist[&a];
                if da == u32::MAX {
                    continue;
                }
                for &b in &cells {
                    if adjacent(a, b) && dist[&b] > da + 1 {
                        dist.insert(b, da + 1);
                        changed = true;
                    }
                }
            }
        }
        for (c, d) in dist {
            out.insert((s, c), d);
        }
    }
    out
}

#[test]
fn grid_distances_match_flood_fill() {
    let g = Geometry {
        rows: 3,
        row_length: 4,
        margin: 1,
    };
    let map = GridMap::new(g);
    for (((ax, ay), (bx, by)), d) in flood_fill(&g) {
        assert_eq!(map.distance(Cell { x: ax, y: ay }, Cell { x: bx, y: by }), d);
    }
}

#[test]
fn adjacent_rows_mid_row_distance_matches_flood_fill() {
    let g = Geometry {
        rows: 4,
        row_length: 7,
        margin: 2,
    };
    let oracle = flood_fill(&g);
    let map = GridMap::new(g);
    for y in 3..8 {
        let a = Cell { x: 3, y };
        let b = Cell { x: 4, y: 10 - y };
        assert_eq!(map.distance(a, b), oracle[&((3, y), (4, 10 - y))]);
        assert_eq!(map.distance(a, b), map.distance(b, a));
    }
}

#[test]
fn monte_carlo_reward_agrees_with_closed_form() {
    let probs = [0.5, 0.5];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let samples = 1_000_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let cells = probs.iter().take_while(|&&p| rng.random::<f64>() >= p).count() as f64;
        sum += cells;
        sum_sq += cells * cells;
    }
    let mean = sum / samples as f64;
    let sd = ((sum_sq / samples as f64 - mean * mean) / samples as f64).sqrt();
    assert!((mean - expected_distance(&probs)).abs() <= 3.0 * sd, "{mean} ± {sd}");
    assert_eq!(expected_distance(&probs), 0.75);
}

#[test]
fn field_means_and_hotspot_location() {
    for seed in 0..5 {
        for pattern in FieldPattern::ALL {
            let config = FarmConfig {
                field_pattern: pattern,
                seed,
                ..FarmConfig::default()
            };
            let g = config.geometry();
            let f = generate_field(&config);
            let values = f.values();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            assert!((config.p_min..=config.p_max).contains(&mean));
            assert!(values.iter().all(|&p| (config.p_min..=config.p_max).contains(&p)));
            if let Some((u0, u1, v0, v1)) = pattern.hotspot_region() {
                let (k, _) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
                let u = (k / g.row_length) as f64 / g.rows as f64;
                let v = (k % g.row_length) as f64 / g.row_length as f64;
                assert!(
                    (u0..=u1).contains(&u) && (v0..=v1).contains(&v),
                    "{pattern:?} seed {seed}: ({u}, {v})"
                );
            }
        }
    }
}

#[test]
fn planning_graph_matches_rebuild_from_world() {
    let config = FarmConfig {
        rows: 6,
        row_length: 12,
        n_robots: 3,
        ..FarmConfig::default()
    };
    let (mu, gamma) = (0.3, 0.25);
    let mut w = WorldState::new(&config, 77).unwrap();
    let mut compared = 0;
    while !w.is_complete() {
        let g = build_planning_graph(&w, mu, gamma);
        let failed: Vec<usize> = w.failed_robots().collect();
        let mut verts = vec![VertexId(0)];
        verts.extend(failed.iter().map(|&i| VertexId(i)));
        verts.push(w.control_center());
        assert_eq!(g.vertices, verts);
        for (a, &va) in verts.iter().enumerate() {
            let reward = if (1..=failed.len()).contains(&a) {
                w.robot_reward_uncached(va.0)
            } else {
                0.0
            };
            assert!((g.snapshot.reward(a) - reward).abs() < 1e-9);
            for (b, &vb) in verts.iter().enumerate() {
                if a == b {
                    continue;
                }
                let mut c = mu * w.travel_cost(va, vb).unwrap() as f64;
                if (1..=failed.len()).contains(&a) && (1..=failed.len()).contains(&b) {
                    let da = w.robot(va.0).traversed() as f64;
                    let db = w.robot(vb.0).traversed() as f64;
                    c += gamma * (da - db).max(0.0);
                }
                assert!((g.snapshot.cost(a, b) - c).abs() < 1e-9);
                compared += 1;
            }
        }
        let target = failed.first().map_or(w.control_center(), |&i| VertexId(i));
        w.step(target).unwrap();
    }
    assert!(compared > 100);
}

fn geometry_strategy() -> impl Strategy<Value = (Geometry, RobotRegion)> {
    (1usize..8, 1usize..10, 1usize..3).prop_flat_map(|(rows, len, margin)| {
        (0..rows).prop_flat_map(move |first| {
            (1..=rows - first).prop_map(move |count| {
                (
                    Geometry {
                        rows,
                        row_length: len,
                        margin,
                    },
                    RobotRegion {
                        first_row: first,
                        row_count: count,
                    },
                )
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plan_covers_region_exactly_once((g, region) in geometry_strategy()) {
        let plan = boustrophedon_plan(&g, region);
        let mut in_row: Vec<Cell> = plan.iter().copied().filter(|&c| g.is_field(c)).collect();
        in_row.sort();
        let mut expected: Vec<Cell> = (region.first_row..region.first_row + region.row_count)
            .flat_map(|r| (0..g.row_length).map(move |o| Cell { x: g.margin + r, y: g.margin + o }))
            .collect();
        expected.sort();
        prop_assert_eq!(in_row, expected);
    }

    #[test]
    fn world_invariants_hold(seed in any::<u64>(), pattern in 1u8..=5, p_hi in 0.0f64..0.6) {
        let config = FarmConfig {
            rows: 4,
            row_length: 9,
            n_robots: 2,
            p_min: 0.0,
            p_max: p_hi,
            field_pattern: FieldPattern::try_from(pattern).unwrap(),
            seed,
            ..FarmConfig::default()
        };
        let mut w = WorldState::new(&config, seed ^ 0xabc).unwrap();
        let mut coverage = w.coverage_percent();
        while !w.is_complete() {
            let before: Vec<(RobotStatus, Cell, usize)> =
                w.robots().iter().map(|r| (r.status(), r.position(), r.traversed())).collect();
            let clock = w.clock();
            let target = w.failed_robots().last().map_or(w.control_center(), VertexId);
            w.step(target).unwrap();
            prop_assert_eq!(w.clock(), clock + 1);
            prop_assert!(w.coverage_percent() >= coverage);
            coverage = w.coverage_percent();
            for (r, (status, pos, d)) in w.robots().iter().zip(before) {
                prop_assert_eq!(r.traversed() + r.remaining_plan().len(), r.plan().len());
                prop_assert!(r.traversed() >= d);
                if status != RobotStatus::Navigating {
                    prop_assert_eq!(r.position(), pos);
                }
                if status == RobotStatus::Failed && r.status() == RobotStatus::Navigating {
                    prop_assert_eq!(w.supervisor(), r.position());
                }
                prop_assert_eq!(r.status() == RobotStatus::Done, r.remaining_plan().is_empty());
            }
            for a in 0..=w.n() + 1 {
                for b in 0..=w.n() + 1 {
                    prop_assert_eq!(
                        w.travel_cost(VertexId(a), VertexId(b)).unwrap(),
                        w.travel_cost(VertexId(b), VertexId(a)).unwrap()
                    );
                }
            }
            prop_assert!(w.clock() < 10_000);
        }
        prop_assert!(w.working_time() <= w.clock());
        prop_assert_eq!(w.coverage_percent(), 100.0);
    }
}

#[test]
fn uniform_field_world_matches_generated_clamp() {
    let config = FarmConfig {
        p_min: 0.08,
        p_max: 0.08,
        ..FarmConfig::default()
    };
    let generated = generate_field(&config);
    assert_eq!(generated, FailureField::uniform(config.geometry(), 0.08));
    let a = WorldState::new(&config, 3).unwrap();
    let b = WorldState::with_field(&config, Arc::new(generated), 3).unwrap();
    assert_eq!(a.robot_reward(1), b.robot_reward(1));
}
