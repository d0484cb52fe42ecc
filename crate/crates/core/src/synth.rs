//! Seeded synthetic series used as stand-ins for real datasets.
//!
//! | kind          | generator                                                     |
//! |---------------|---------------------------------------------------------------|
//! | `ar1`         | `y_t = 10 + 0.7 (y_{t−1} − 10) + e_t`, `e ~ N(0, 1)`          |
//! | `trend-sine`  | `20 + 0.05 t + 5 sin(2πt / 12) + e_t`, `e ~ N(0, 1)`          |
//! | `random-walk` | `y_0 = 100`, `y_t = y_{t−1} + e_t`, `e ~ N(0, 1)`             |
//! | `quadratic`   | `10 + x_t`, `x_{t+1} = 0.5 x_t² + u_t`, `u ~ U(−1, 0.3)`      |
//!
//! The quadratic map stays inside `[−1.5, 1.5]` for that noise range.
//! Stochastic recursions discard a burn-in of 100 steps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ForecastError, Result};
use crate::series::TimeSeries;

pub const MIN_SYNTH_LEN: usize = 50;
const BURN_IN: usize = 100;

pub const AR1_PHI: f64 = 0.7;
pub const AR1_LEVEL: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Ar1,
    TrendSine,
    RandomWalk,
    Quadratic,
}

impl SynthKind {
    pub const ALL: [SynthKind; 4] = [Self::Ar1, Self::TrendSine, Self::RandomWalk, Self::Quadratic];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ar1 => "ar1",
            Self::TrendSine => "trend-sine",
            Self::RandomWalk => "random-walk",
            Self::Quadratic => "quadratic",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SynthKind {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            ForecastError::invalid(format!(
                "unknown synthetic dataset kind '{s}' (expected ar1, trend-sine, random-walk or quadratic)"
            ))
        })
    }
}

pub fn synth_dataset(kind: SynthKind, n: usize, seed: u64) -> Result<TimeSeries> {
    if n < MIN_SYNTH_LEN {
        return Err(ForecastError::invalid(format!(
            "synthetic series need at least {MIN_SYNTH_LEN} points, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let values: Vec<f64> = match kind {
        SynthKind::Ar1 => {
            let mut y = AR1_LEVEL;
            let mut out = Vec::with_capacity(n);
            for t in 0..n + BURN_IN {
                y = AR1_LEVEL + AR1_PHI * (y - AR1_LEVEL) + normal();
                if t >= BURN_IN {
                    out.push(y);
                }
            }
            out
        }
        SynthKind::TrendSine => (0..n)
            .map(|t| {
                let t = t as f64;
                20.0 + 0.05 * t + 5.0 * (2.0 * PI * t / 12.0).sin() + normal()
            })
            .collect(),
        SynthKind::RandomWalk => {
            let mut y = 100.0;
            (0..n)
                .map(|t| {
                    if t > 0 {
                        y += normal();
                    }
                    y
                })
                .collect()
        }
        SynthKind::Quadratic => {
            let mut x = 0.0_f64;
            let mut out = Vec::with_capacity(n);
            for t in 0..n + BURN_IN {
                x = 0.5 * x * x + rng.random_range(-1.0..0.3);
                if t >= BURN_IN {
                    out.push(10.0 + x);
                }
            }
            out
        }
    };
    TimeSeries::new(kind.as_str(), values)
}
