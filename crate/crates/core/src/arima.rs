//! ARIMA(p, d, q) fitted by conditional least squares.
//!
//! The model on the `d`-times differenced series `w` is
//!
//! ```text
//! w_t = c + Σ φ_i w_{t−i} − Σ θ_j ε_{t−j} + ε_t
//! ```
//!
//! Residuals are conditioned on the first `p` observations (their residuals
//! are fixed to zero) and on zero pre-sample errors. Coefficients come from a
//! Nelder–Mead search started at the Yule–Walker solution; parameter vectors
//! with an AR or MA root on or inside the unit circle are rejected by a
//! penalty barrier.

use rayon::prelude::*;

use crate::error::{ForecastError, Result};
use crate::linalg::{solve_linear_system, DenseMatrix};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::series::{self, difference, extend_integrate, sample_autocorrelation, MIN_TRAIN_LEN};
use crate::stability::spectral_radius;

pub const MAX_P: usize = 5;
pub const MAX_D: usize = 2;
pub const MAX_Q: usize = 5;

/// Objective value assigned to non-stationary or non-invertible parameters,
/// scaled by `1 + spectral excess`.
pub const INFEASIBLE_PENALTY: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        if p > MAX_P || d > MAX_D || q > MAX_Q {
            return Err(ForecastError::invalid(format!(
                "ARIMA({p},{d},{q}) is outside the supported grid p <= {MAX_P}, d <= {MAX_D}, q <= {MAX_Q}"
            )));
        }
        Ok(Self { p, d, q })
    }

    /// Whether the intercept is estimated (only for undifferenced series).
    pub fn has_intercept(&self) -> bool {
        self.d == 0
    }

    /// Parameters counted by AIC: coefficients, free intercept, and the variance.
    pub fn parameter_count(&self) -> usize {
        self.p + self.q + usize::from(self.has_intercept()) + 1
    }

    /// Shortest training series `fit_arima` accepts for this order.
    pub fn min_train_len(&self) -> usize {
        MIN_TRAIN_LEN + self.d + self.p + self.q
    }
}

impl std::fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ARIMA({},{},{})", self.p, self.d, self.q)
    }
}

/// A fitted (or explicitly parameterized) ARIMA model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub intercept: f64,
    pub sigma2: f64,
    /// One residual per differenced training point; the first `p` are zero.
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub aic: f64,
    /// Residuals entering the objective, `len(w) − p`.
    pub n_effective: usize,
    /// False when the optimizer ran out of iterations; the best point found is kept.
    pub converged: bool,
}

/// One-step prediction of `w[t]` from everything before it.
#[inline]
fn predict_at(phi: &[f64], theta: &[f64], intercept: f64, w: &[f64], eps: &[f64], t: usize) -> f64 {
    let mut acc = intercept;
    for (i, f) in phi.iter().enumerate() {
        acc += f * w[t - 1 - i];
    }
    for (j, th) in theta.iter().enumerate() {
        if t > j {
            acc -= th * eps[t - 1 - j];
        }
    }
    acc
}

fn residual_recursion(phi: &[f64], theta: &[f64], intercept: f64, w: &[f64]) -> (f64, Vec<f64>) {
    let p = phi.len();
    let mut eps = vec![0.0; w.len()];
    let mut sse = 0.0;
    for t in p..w.len() {
        let e = w[t] - predict_at(phi, theta, intercept, w, &eps, t);
        eps[t] = e;
        sse += e * e;
    }
    (sse, eps)
}

/// Conditional sum of squares and the residual sequence for the given parameters.
pub fn css_objective(phi: &[f64], theta: &[f64], intercept: f64, w: &[f64]) -> Result<(f64, Vec<f64>)> {
    if w.len() <= phi.len() {
        return Err(ForecastError::invalid(format!(
            "CSS with {} AR terms needs more than {} observations, got {}",
            phi.len(),
            phi.len(),
            w.len()
        )));
    }
    if phi
        .iter()
        .chain(theta)
        .chain(std::iter::once(&intercept))
        .any(|v| !v.is_finite())
    {
        return Err(ForecastError::invalid("ARIMA coefficients must be finite"));
    }
    Ok(residual_recursion(phi, theta, intercept, w))
}

/// Yule–Walker AR estimates from the biased ACF; zeros when the system is degenerate.
pub fn yule_walker_init(w: &[f64], p: usize) -> Vec<f64> {
    if p == 0 {
        return Vec::new();
    }
    let Ok(r) = sample_autocorrelation(w, p) else {
        return vec![0.0; p];
    };
    let mut toeplitz = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in 0..p {
            toeplitz.push(r[i.abs_diff(j)]);
        }
    }
    let Ok(matrix) = DenseMatrix::new(p, p, toeplitz) else {
        return vec![0.0; p];
    };
    match solve_linear_system(&matrix, &r[1..=p]) {
        Ok(phi) if phi.iter().all(|v| v.is_finite()) => phi,
        _ => vec![0.0; p],
    }
}

fn penalty(phi: &[f64], theta: &[f64]) -> Option<f64> {
    let radius = spectral_radius(phi).max(spectral_radius(theta));
    (radius >= 1.0).then_some(INFEASIBLE_PENALTY * (1.0 + (radius - 1.0)))
}

fn aic(order: ArimaOrder, sse: f64, n_effective: usize) -> f64 {
    let n = n_effective as f64;
    // exact fits would send ln(0) to −inf
    let sse = sse.max(f64::MIN_POSITIVE);
    n * (sse / n).ln() + 2.0 * order.parameter_count() as f64
}

/// Fits ARIMA(p, d, q) to `train` by conditional least squares.
pub fn fit_arima(train: &[f64], order: ArimaOrder) -> Result<ArimaModel> {
    fit_arima_with(train, order, &NelderMeadOptions::default())
}

pub fn fit_arima_with(train: &[f64], order: ArimaOrder, options: &NelderMeadOptions) -> Result<ArimaModel> {
    let needed = order.min_train_len();
    if train.len() < needed {
        return Err(ForecastError::invalid(format!(
            "{order} needs at least {needed} training observations, got {}",
            train.len()
        )));
    }
    if let Some(pos) = train.iter().position(|v| !v.is_finite()) {
        return Err(ForecastError::invalid(format!(
            "training value at index {pos} is not finite"
        )));
    }
    let w = difference(train, order.d)?.values;
    if series::is_constant(&w) {
        return Err(ForecastError::degenerate(format!(
            "series is constant after differencing {} time(s)",
            order.d
        )));
    }

    let (p, q) = (order.p, order.q);
    let mut phi0 = yule_walker_init(&w, p);
    while spectral_radius(&phi0) >= 1.0 {
        phi0.iter_mut().for_each(|v| *v *= 0.9);
    }
    let mut start = phi0.clone();
    start.extend(std::iter::repeat_n(0.0, q));
    if order.has_intercept() {
        // the YW start implies mean = c / (1 − Σφ)
        start.push(series::mean(&w) * (1.0 - phi0.iter().sum::<f64>()));
    }

    let objective = |x: &[f64]| {
        let (phi, rest) = x.split_at(p);
        let (theta, c) = rest.split_at(q);
        if let Some(pen) = penalty(phi, theta) {
            return pen;
        }
        residual_recursion(phi, theta, c.first().copied().unwrap_or(0.0), &w).0
    };
    let best = nelder_mead(objective, &start, options);

    let (phi, rest) = best.point.split_at(p);
    let (theta, c) = rest.split_at(q);
    let intercept = c.first().copied().unwrap_or(0.0);
    if penalty(phi, theta).is_some() {
        return Err(ForecastError::degenerate(format!(
            "{order}: no stationary and invertible parameters found"
        )));
    }
    let mut model = ArimaModel::assemble(order, phi.to_vec(), theta.to_vec(), intercept, &w);
    model.converged = best.converged;
    Ok(model)
}

impl ArimaModel {
    fn assemble(order: ArimaOrder, phi: Vec<f64>, theta: Vec<f64>, intercept: f64, w: &[f64]) -> Self {
        let (sse, residuals) = residual_recursion(&phi, &theta, intercept, w);
        let n_effective = w.len() - order.p;
        Self {
            order,
            phi,
            theta,
            intercept,
            sigma2: sse / n_effective as f64,
            residuals,
            sse,
            aic: aic(order, sse, n_effective),
            n_effective,
            converged: true,
        }
    }

    /// Builds a model from given coefficients, computing residuals and AIC on `train`.
    pub fn from_parameters(
        order: ArimaOrder,
        phi: Vec<f64>,
        theta: Vec<f64>,
        intercept: f64,
        train: &[f64],
    ) -> Result<Self> {
        if phi.len() != order.p || theta.len() != order.q {
            return Err(ForecastError::invalid(format!(
                "{order} needs {} AR and {} MA coefficients, got {} and {}",
                order.p,
                order.q,
                phi.len(),
                theta.len()
            )));
        }
        if penalty(&phi, &theta).is_some() {
            return Err(ForecastError::invalid(format!(
                "{order} coefficients are not stationary and invertible"
            )));
        }
        let w = difference(train, order.d)?.values;
        css_objective(&phi, &theta, intercept, &w)?;
        Ok(Self::assemble(order, phi, theta, intercept, &w))
    }

    /// Largest companion spectral radius over the AR and MA polynomials.
    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.phi).max(spectral_radius(&self.theta))
    }

    fn min_history(&self) -> usize {
        self.order.d + self.order.p + 1
    }

    /// Rolling one-step-ahead forecasts of `test` with frozen parameters.
    ///
    /// Each step predicts from all observations before it (training data,
    /// then the actual test values seen so far), then absorbs the realized
    /// residual before moving on.
    pub fn rolling_forecast(&self, train: &[f64], test: &[f64]) -> Result<Vec<f64>> {
        if test.is_empty() {
            return Err(ForecastError::invalid("rolling forecast needs at least one test point"));
        }
        if train.len() < self.min_history() {
            return Err(ForecastError::invalid(format!(
                "{} needs {} observations of history, got {}",
                self.order,
                self.min_history(),
                train.len()
            )));
        }
        let full: Vec<f64> = train.iter().chain(test).copied().collect();
        let start = train.len();
        self.one_step_path(&full, start)
    }

    /// One-step forecast of the observation following `history`.
    pub fn forecast_next(&self, history: &[f64]) -> Result<f64> {
        if history.len() < self.min_history() {
            return Err(ForecastError::invalid(format!(
                "{} needs {} observations of history, got {}",
                self.order,
                self.min_history(),
                history.len()
            )));
        }
        let w = difference(history, self.order.d)?.values;
        let (_, eps) = residual_recursion(&self.phi, &self.theta, self.intercept, &w);
        let pred = predict_at(&self.phi, &self.theta, self.intercept, &w, &eps, w.len());
        extend_integrate(history, self.order.d, pred)
    }

    /// In-sample one-step predictions on the raw scale. Returns the first raw
    /// index that has a genuine prediction and the predictions from there on.
    pub fn fitted_values(&self, train: &[f64]) -> Result<(usize, Vec<f64>)> {
        let start = self.order.d + self.order.p;
        if train.len() <= start {
            return Err(ForecastError::invalid(format!(
                "{} has no in-sample predictions on {} observations",
                self.order,
                train.len()
            )));
        }
        Ok((start, self.one_step_path(train, start)?))
    }

    /// Predictions for raw indices `from..full.len()`, each using `full[..r]` only.
    fn one_step_path(&self, full: &[f64], from: usize) -> Result<Vec<f64>> {
        let d = self.order.d;
        let p = self.order.p;
        let w = difference(full, d)?.values;
        let mut eps = vec![0.0; w.len()];
        let mut out = Vec::with_capacity(full.len() - from);
        for t in p..w.len() {
            let pred = predict_at(&self.phi, &self.theta, self.intercept, &w, &eps, t);
            eps[t] = w[t] - pred;
            let raw_index = t + d;
            if raw_index >= from {
                out.push(extend_integrate(&full[..raw_index], d, pred)?);
            }
        }
        Ok(out)
    }
}

/// Picks the differencing order for `series` (at most `max_d`).
///
/// Returns the smallest `d` whose differenced series has lag-1
/// autocorrelation below 0.95 without its standard deviation growing relative
/// to `d − 1`; failing that, the `d` with the smallest standard deviation.
pub fn choose_d(series: &[f64], max_d: usize) -> usize {
    let mut stds = Vec::with_capacity(max_d + 1);
    for d in 0..=max_d {
        let Ok(ds) = difference(series, d) else { break };
        let w = ds.values;
        let sd = series::std_dev(&w);
        // a constant differenced series carries no autocorrelation
        let r1 = if w.len() < 2 {
            1.0
        } else {
            sample_autocorrelation(&w, 1).map_or(0.0, |r| r[1])
        };
        let not_worse = d == 0 || sd <= stds[d - 1];
        stds.push(sd);
        if r1 < 0.95 && not_worse {
            return d;
        }
    }
    stds.iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(d, _)| d)
}

/// One row of the order-search table.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFit {
    pub order: ArimaOrder,
    pub aic: std::result::Result<f64, ForecastError>,
}

#[derive(Debug, Clone)]
pub struct AutoArima {
    pub order: ArimaOrder,
    pub model: ArimaModel,
    /// Every order evaluated, in grid order (`p` outer, `q` inner).
    pub candidates: Vec<CandidateFit>,
}

/// Exhaustive AIC search over `p <= max_p`, `q <= max_q` at `d = choose_d(train)`.
///
/// Candidate fits run in parallel; the reduction is order-independent with
/// ties broken by smaller `p + q`, then smaller `p`.
pub fn auto_order(train: &[f64], max_p: usize, max_q: usize) -> Result<AutoArima> {
    let d = choose_d(train, MAX_D);
    let grid: Vec<ArimaOrder> = (0..=max_p.min(MAX_P))
        .flat_map(|p| (0..=max_q.min(MAX_Q)).map(move |q| ArimaOrder { p, d, q }))
        .collect();
    let fits: Vec<(ArimaOrder, Result<ArimaModel>)> =
        grid.par_iter().map(|&order| (order, fit_arima(train, order))).collect();

    let mut best: Option<&ArimaModel> = None;
    let mut last_err = None;
    for (_, fit) in &fits {
        match fit {
            Ok(model) => {
                if best.is_none_or(|b| prefer(model, b)) {
                    best = Some(model);
                }
            }
            Err(e) => last_err = Some(e.clone()),
        }
    }
    let Some(best) = best.cloned() else {
        return Err(last_err.unwrap_or_else(|| ForecastError::invalid("empty ARIMA order grid")));
    };
    let candidates = fits
        .into_iter()
        .map(|(order, fit)| CandidateFit {
            order,
            aic: fit.map(|m| m.aic),
        })
        .collect();
    Ok(AutoArima {
        order: best.order,
        model: best,
        candidates,
    })
}

fn prefer(a: &ArimaModel, b: &ArimaModel) -> bool {
    let key = |m: &ArimaModel| (m.order.p + m.order.q, m.order.p);
    match a.aic.total_cmp(&b.aic) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => key(a) < key(b),
    }
}
