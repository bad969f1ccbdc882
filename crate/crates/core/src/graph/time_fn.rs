/// A nonnegative function of time, evaluated exactly at arbitrary instants.
///
/// Every variant is clamped below at zero.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeFn {
    Constant(f64),
    /// `max(0, base + slope * t)`.
    Linear {
        base: f64,
        slope: f64,
    },
    /// Linear interpolation between `(time, value)` knots sorted by time,
    /// held constant outside the knot range.
    Piecewise(Vec<(f64, f64)>),
}

impl TimeFn {
    pub fn eval(&self, t: f64) -> f64 {
        let raw = match self {
            TimeFn::Constant(v) => *v,
            TimeFn::Linear { base, slope } => base + slope * t,
            TimeFn::Piecewise(knots) => interpolate(knots, t),
        };
        raw.max(0.0)
    }

    pub fn is_constant(&self) -> bool {
        match self {
            TimeFn::Constant(_) => true,
            TimeFn::Linear { slope, .. } => *slope == 0.0,
            TimeFn::Piecewise(knots) => knots.windows(2).all(|w| w[0].1 == w[1].1),
        }
    }
}

impl From<f64> for TimeFn {
    fn from(v: f64) -> Self {
        TimeFn::Constant(v)
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    match knots {
        [] => 0.0,
        [(_, v)] => *v,
        _ => {
            if t <= knots[0].0 {
                return knots[0].1;
            }
            for w in knots.windows(2) {
                let ((t0, v0), (t1, v1)) = (w[0], w[1]);
                if t <= t1 {
                    if t1 == t0 {
                        return v1;
                    }
                    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                }
            }
            knots[knots.len() - 1].1
        }
    }
}
