//! Failure-probability fields built from Gaussian mixtures.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::{Cell, Geometry};
use super::rng::mix_seed;
use super::FarmConfig;

/// The five field layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum FieldPattern {
    UniformNoise = 1,
    CornerHotspot = 2,
    CenterRidge = 3,
    DiagonalHotspots = 4,
    BandedGradient = 5,
}

impl FieldPattern {
    pub const ALL: [FieldPattern; 5] = [
        FieldPattern::UniformNoise,
        FieldPattern::CornerHotspot,
        FieldPattern::CenterRidge,
        FieldPattern::DiagonalHotspots,
        FieldPattern::BandedGradient,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    /// Normalized `(u0, u1, v0, v1)` box that must contain the field maximum,
    /// for patterns with a single dominant hotspot.
    pub fn hotspot_region(self) -> Option<(f64, f64, f64, f64)> {
        match self {
            FieldPattern::CornerHotspot => Some((0.0, 0.35, 0.0, 0.35)),
            FieldPattern::CenterRidge => Some((0.35, 0.65, 0.0, 1.0)),
            _ => None,
        }
    }
}

impl TryFrom<u8> for FieldPattern {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        FieldPattern::ALL
            .into_iter()
            .find(|p| p.id() == v)
            .ok_or_else(|| format!("field pattern must be 1..=5, got {v}"))
    }
}

impl From<FieldPattern> for u8 {
    fn from(p: FieldPattern) -> u8 {
        p.id()
    }
}

#[derive(Debug, Clone, Copy)]
struct Bump {
    u: f64,
    v: f64,
    su: f64,
    sv: f64,
    rho: f64,
    weight: f64,
}

impl Bump {
    fn density(&self, u: f64, v: f64) -> f64 {
        let zu = (u - self.u) / self.su;
        let zv = (v - self.v) / self.sv;
        let one_minus = 1.0 - self.rho * self.rho;
        let q = (zu * zu - 2.0 * self.rho * zu * zv + zv * zv) / one_minus;
        self.weight * (-0.5 * q).exp() / (2.0 * PI * self.su * self.sv * one_minus.sqrt())
    }
}

fn bumps(pattern: FieldPattern, rng: &mut ChaCha8Rng) -> Vec<Bump> {
    let mut jitter = |scale: f64| rng.random_range(-scale..=scale);
    let mut out = Vec::new();
    match pattern {
        FieldPattern::UniformNoise => {
            for _ in 0..30 {
                out.push(Bump {
                    u: jitter(0.5) + 0.5,
                    v: jitter(0.5) + 0.5,
                    su: 0.07 + jitter(0.03),
                    sv: 0.07 + jitter(0.03),
                    rho: jitter(0.3),
                    weight: 0.75 + jitter(0.25),
                });
            }
        }
        FieldPattern::CornerHotspot => {
            out.push(Bump {
                u: 0.15 + jitter(0.05),
                v: 0.15 + jitter(0.05),
                su: 0.12,
                sv: 0.12,
                rho: jitter(0.2),
                weight: 0.9,
            });
            for _ in 0..4 {
                out.push(Bump {
                    u: jitter(0.5) + 0.5,
                    v: jitter(0.5) + 0.5,
                    su: 0.35,
                    sv: 0.35,
                    rho: 0.0,
                    weight: 0.025,
                });
            }
        }
        FieldPattern::CenterRidge => {
            out.push(Bump {
                u: 0.5 + jitter(0.04),
                v: 0.5 + jitter(0.1),
                su: 0.07,
                sv: 0.45,
                rho: jitter(0.1),
                weight: 1.0,
            });
        }
        FieldPattern::DiagonalHotspots => {
            for centre in [0.25, 0.75] {
                out.push(Bump {
                    u: centre + jitter(0.05),
                    v: centre + jitter(0.05),
                    su: 0.12,
                    sv: 0.12,
                    rho: 0.3 + jitter(0.1),
                    weight: 0.5,
                });
            }
        }
        FieldPattern::BandedGradient => {
            for k in 0..5 {
                out.push(Bump {
                    u: k as f64 / 4.0 + jitter(0.05),
                    v: jitter(0.05),
                    su: 0.18,
                    sv: 0.4,
                    rho: 0.0,
                    weight: 0.2,
                });
            }
        }
    }
    out
}

/// Per-cell failure probability over the crop rows. Free space never fails.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureField {
    geometry: Geometry,
    probs: Vec<f64>,
}

impl FailureField {
    pub fn uniform(geometry: Geometry, p: f64) -> Self {
        Self {
            geometry,
            probs: vec![p; geometry.field_cell_count()],
        }
    }

    /// Field from explicit per-cell values in (row, offset) order.
    pub fn from_values(geometry: Geometry, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), geometry.field_cell_count());
        Self { geometry, probs }
    }

    pub fn probability(&self, c: Cell) -> f64 {
        self.geometry.field_index(c).map_or(0.0, |k| self.probs[k])
    }

    pub fn values(&self) -> &[f64] {
        &self.probs
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }
}

/// Sums the pattern's bumps over the crop rows and rescales the result
/// affinely onto `[p_min, p_max]`.
pub fn generate_field(config: &FarmConfig) -> FailureField {
    let g = config.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[config.seed, config.field_pattern.id() as u64]));
    let bumps = bumps(config.field_pattern, &mut rng);
    let mut raw = Vec::with_capacity(g.field_cell_count());
    for row in 0..g.rows {
        let u = (row as f64 + 0.5) / g.rows as f64;
        for offset in 0..g.row_length {
            let v = (offset as f64 + 0.5) / g.row_length as f64;
            raw.push(bumps.iter().map(|b| b.density(u, v)).sum::<f64>());
        }
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = config.p_max - config.p_min;
    let probs = raw
        .into_iter()
        .map(|x| {
            let scaled = if hi > lo { (x - lo) / (hi - lo) } else { 0.0 };
            (config.p_min + scaled * span).clamp(config.p_min, config.p_max)
        })
        .collect();
    FailureField { geometry: g, probs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(pattern: FieldPattern, p_min: f64, p_max: f64) -> FarmConfig {
        FarmConfig {
            field_pattern: pattern,
            p_min,
            p_max,
            seed: 11,
            ..FarmConfig::default()
        }
    }

    #[test]
    fn collapsed_clamps_give_uniform_field() {
        let f = generate_field(&config(FieldPattern::DiagonalHotspots, 0.07, 0.07));
        assert!(f.values().iter().all(|&p| p == 0.07));
    }

    #[test]
    fn generation_is_deterministic() {
        for p in FieldPattern::ALL {
            let a = generate_field(&config(p, 0.01, 0.2));
            let b = generate_field(&config(p, 0.01, 0.2));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn values_respect_clamps_and_span_range() {
        for p in FieldPattern::ALL {
            let f = generate_field(&config(p, 0.01, 0.2));
            let lo = f.values().iter().copied().fold(1.0, f64::min);
            let hi = f.values().iter().copied().fold(0.0, f64::max);
            assert!((lo - 0.01).abs() < 1e-12 && (hi - 0.2).abs() < 1e-12, "{p:?}");
            let mean = f.values().iter().sum::<f64>() / f.values().len() as f64;
            assert!((0.01..=0.2).contains(&mean));
        }
    }

    #[test]
    fn free_space_never_fails() {
        let f = generate_field(&config(FieldPattern::UniformNoise, 0.5, 1.0));
        assert_eq!(f.probability(Cell { x: 0, y: 0 }), 0.0);
    }

    #[test]
    fn pattern_ids_round_trip() {
        for p in FieldPattern::ALL {
            assert_eq!(FieldPattern::try_from(p.id()), Ok(p));
        }
        assert!(FieldPattern::try_from(6).is_err());
    }
}
