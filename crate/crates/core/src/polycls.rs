//! Polynomial classifier forecaster: lag windows are expanded into every
//! monomial up to degree K and a weight vector is fitted by least squares in
//! closed form. Forecasts are the dot product of the weights with the
//! expanded most recent window.

use rayon::prelude::*;

use crate::error::{ForecastError, Result};
use crate::linalg::{dot, solve_least_squares, DenseMatrix, SolveReport};
use crate::metrics::rmse;
use crate::series::build_windows;

pub const MAX_DEGREE: usize = 3;
pub const DEFAULT_WINDOW_GRID: [usize; 6] = [2, 3, 4, 6, 8, 12];
pub const DEFAULT_DEGREE_GRID: [usize; 3] = [1, 2, 3];

/// Monomials of total degree `0..=degree` in `window_len` variables.
///
/// Ordered by total degree, then lexicographically descending on the
/// exponent tuple, so `L = 2, K = 2` gives `[1, t₁, t₂, t₁², t₁t₂, t₂²]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    window_len: usize,
    degree: usize,
    exponents: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn new(window_len: usize, degree: usize) -> Result<Self> {
        if window_len == 0 {
            return Err(ForecastError::invalid("window length must be at least 1"));
        }
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(ForecastError::invalid(format!(
                "polynomial degree must be between 1 and {MAX_DEGREE}, got {degree}"
            )));
        }
        let mut exponents = Vec::new();
        for total in 0..=degree {
            let mut current = vec![0u32; window_len];
            compositions(total as u32, 0, &mut current, &mut exponents);
        }
        Ok(Self {
            window_len,
            degree,
            exponents,
        })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn size(&self) -> usize {
        self.exponents.len()
    }

    /// Evaluates every monomial at `y`; entry 0 is always 1.
    pub fn expand(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.window_len {
            return Err(ForecastError::invalid(format!(
                "basis expects windows of length {}, got {}",
                self.window_len,
                y.len()
            )));
        }
        let mut out = Vec::with_capacity(self.size());
        self.expand_into(y, &mut out);
        Ok(out)
    }

    fn expand_into(&self, y: &[f64], out: &mut Vec<f64>) {
        out.extend(self.exponents.iter().map(|e| {
            e.iter()
                .zip(y)
                .filter(|(&k, _)| k > 0)
                .fold(1.0, |acc, (&k, &v)| acc * v.powi(k as i32))
        }));
    }
}

/// All tuples of `current.len()` nonnegative ints summing to `remaining`,
/// first component largest first.
fn compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        compositions(remaining - k, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// `build_basis(L, K)`.
pub fn build_basis(window_len: usize, degree: usize) -> Result<MonomialBasis> {
    MonomialBasis::new(window_len, degree)
}

/// Affine map of inputs onto `[0, 1]` using the training range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMaxScaling {
    pub min: f64,
    pub max: f64,
}

impl MinMaxScaling {
    fn from_values(values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { min, max }
    }

    fn range(&self) -> f64 {
        let r = self.max - self.min;
        if r > 0.0 {
            r
        } else {
            1.0
        }
    }

    fn scale(&self, v: f64) -> f64 {
        (v - self.min) / self.range()
    }

    fn unscale(&self, v: f64) -> f64 {
        v * self.range() + self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyModel {
    pub basis: MonomialBasis,
    pub weights: Vec<f64>,
    /// Training sum of squared one-step errors on the original scale.
    pub train_sse: f64,
    pub solve_report: SolveReport,
    /// Present only when the model was fitted with input scaling.
    pub scaling: Option<MinMaxScaling>,
}

/// Shortest training series `fit_pc` accepts for `(L, K)`.
pub fn min_train_len(window_len: usize, degree: usize) -> Result<usize> {
    Ok(window_len + MonomialBasis::new(window_len, degree)?.size() + 1)
}

/// Fits weights on the raw series.
pub fn fit_pc(train: &[f64], window_len: usize, degree: usize) -> Result<PolyModel> {
    fit_pc_with(train, window_len, degree, false)
}

/// Fits weights, optionally min-max scaling inputs and targets first.
pub fn fit_pc_with(train: &[f64], window_len: usize, degree: usize, scale_inputs: bool) -> Result<PolyModel> {
    let basis = MonomialBasis::new(window_len, degree)?;
    let needed = window_len + basis.size() + 1;
    if train.len() < needed {
        return Err(ForecastError::invalid(format!(
            "polynomial model with L={window_len}, K={degree} needs at least {needed} training observations, got {}",
            train.len()
        )));
    }
    let scaling = scale_inputs.then(|| MinMaxScaling::from_values(train));
    let values: Vec<f64> = match scaling {
        Some(s) => train.iter().map(|&v| s.scale(v)).collect(),
        None => train.to_vec(),
    };

    let windows = build_windows(&values, window_len)?;
    let n = windows.targets.len();
    let m = basis.size();
    let mut data = Vec::with_capacity(n * m);
    for i in 0..n {
        basis.expand_into(windows.rows.row(i), &mut data);
    }
    let design = DenseMatrix::new(n, m, data)?;
    let (weights, solve_report) = solve_least_squares(&design, &windows.targets)?;
    let range = scaling.map_or(1.0, |s| s.range());
    Ok(PolyModel {
        basis,
        weights,
        train_sse: (solve_report.residual_norm * range).powi(2),
        solve_report,
        scaling,
    })
}

impl PolyModel {
    pub fn window_len(&self) -> usize {
        self.basis.window_len()
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    /// One-step forecast from the `L` most recent observations, oldest first.
    pub fn forecast(&self, recent: &[f64]) -> Result<f64> {
        match self.scaling {
            None => Ok(dot(&self.weights, &self.basis.expand(recent)?)),
            Some(s) => {
                let scaled: Vec<f64> = recent.iter().map(|&v| s.scale(v)).collect();
                Ok(s.unscale(dot(&self.weights, &self.basis.expand(&scaled)?)))
            }
        }
    }

    /// Rolling one-step forecasts over `test` with frozen weights; each window
    /// slides over the actual observations (train tail, then test values).
    pub fn rolling_forecast(&self, train: &[f64], test: &[f64]) -> Result<Vec<f64>> {
        let l = self.window_len();
        if train.len() < l {
            return Err(ForecastError::invalid(format!(
                "window length {l} needs {l} observations of history, got {}",
                train.len()
            )));
        }
        let history: Vec<f64> = train.iter().chain(test).copied().collect();
        (0..test.len())
            .map(|i| {
                let end = train.len() + i;
                self.forecast(&history[end - l..end])
            })
            .collect()
    }

    /// In-sample one-step predictions; the first lies at raw index `L`.
    pub fn fitted_values(&self, train: &[f64]) -> Result<(usize, Vec<f64>)> {
        let l = self.window_len();
        if train.len() <= l {
            return Err(ForecastError::invalid(format!(
                "window length {l} leaves no in-sample predictions on {} observations",
                train.len()
            )));
        }
        let fitted = (l..train.len())
            .map(|end| self.forecast(&train[end - l..end]))
            .collect::<Result<Vec<_>>>()?;
        Ok((l, fitted))
    }
}

/// `forecast_pc(model, recent)`.
pub fn forecast_pc(model: &PolyModel, recent: &[f64]) -> Result<f64> {
    model.forecast(recent)
}

/// `rolling_forecast_pc(model, train, test)`.
pub fn rolling_forecast_pc(model: &PolyModel, train: &[f64], test: &[f64]) -> Result<Vec<f64>> {
    model.rolling_forecast(train, test)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcCandidate {
    pub window_len: usize,
    pub degree: usize,
    /// Validation RMSE, or why the candidate could not be evaluated.
    pub rmse: std::result::Result<f64, ForecastError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcSelection {
    pub window_len: usize,
    pub degree: usize,
    pub validation_rmse: f64,
    pub candidates: Vec<PcCandidate>,
}

/// Fraction of the training series used for fitting during selection.
pub const SELECTION_FIT_FRACTION: f64 = 0.8;

/// Chooses `(L, K)` by validation RMSE of rolling one-step forecasts on the
/// last 20% of `train`, with weights fitted on the first 80%. Ties go to the
/// smaller degree, then the smaller window.
pub fn select_pc_config(
    train: &[f64],
    window_grid: &[usize],
    degree_grid: &[usize],
    scale_inputs: bool,
) -> Result<PcSelection> {
    let split = (SELECTION_FIT_FRACTION * train.len() as f64 + 1e-9).floor() as usize;
    if split == 0 || split >= train.len() {
        return Err(ForecastError::invalid(format!(
            "cannot split {} observations into fit and validation parts",
            train.len()
        )));
    }
    let (fit, validation) = train.split_at(split);
    let grid: Vec<(usize, usize)> = window_grid
        .iter()
        .flat_map(|&l| degree_grid.iter().map(move |&k| (l, k)))
        .collect();
    let candidates: Vec<PcCandidate> = grid
        .par_iter()
        .map(|&(window_len, degree)| {
            let rmse = fit_pc_with(fit, window_len, degree, scale_inputs)
                .and_then(|model| model.rolling_forecast(fit, validation))
                .and_then(|pred| rmse(validation, &pred));
            PcCandidate {
                window_len,
                degree,
                rmse,
            }
        })
        .collect();

    let best = candidates
        .iter()
        .filter_map(|c| {
            c.rmse
                .as_ref()
                .ok()
                .filter(|r| r.is_finite())
                .map(|r| (*r, c.degree, c.window_len))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    match best {
        Some((validation_rmse, degree, window_len)) => Ok(PcSelection {
            window_len,
            degree,
            validation_rmse,
            candidates,
        }),
        None => Err(ForecastError::invalid(format!(
            "no (L, K) candidate is feasible for a training series of {} observations",
            train.len()
        ))),
    }
}
