//! Parallel hybrid of an ARIMA model and a polynomial classifier.
//!
//! Both components forecast independently and are blended as
//! `ω · arima + (1 − ω) · pc`. The weight minimizing squared error over a
//! fitting window has the closed form
//!
//! ```text
//! ω* = Σ (a_i − p_i)(y_i − p_i) / Σ (a_i − p_i)²
//! ```
//!
//! and is clipped to `[0, 1]`.

use crate::arima::{auto_order, fit_arima, ArimaModel, ArimaOrder, MAX_P, MAX_Q};
use crate::error::{ForecastError, Result};
use crate::polycls::{fit_pc_with, select_pc_config, PolyModel, DEFAULT_DEGREE_GRID, DEFAULT_WINDOW_GRID};

/// Share of the training series the components are fitted on when ω is
/// estimated from the validation tail.
pub const OMEGA_FIT_FRACTION: f64 = 0.8;

/// Relative size below which `Σ (a − p)²` counts as zero.
pub const DEGENERATE_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaMode {
    /// Components fitted on the first 80% of train; ω from their rolling
    /// forecasts over the last 20%; components then refitted on all of train.
    #[default]
    ValidationTail,
    /// ω from in-sample one-step predictions over the whole training set.
    InSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArimaSpec {
    #[default]
    Auto,
    Fixed(ArimaOrder),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PcSpec {
    #[default]
    Auto,
    Fixed {
        window_len: usize,
        degree: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HybridConfig {
    pub arima: ArimaSpec,
    pub pc: PcSpec,
    pub omega_mode: OmegaMode,
    pub scale_inputs: bool,
}

/// Result of the closed-form weight computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaFit {
    pub omega: f64,
    pub omega_unclipped: f64,
    /// Component forecasts were indistinguishable; ω fixed at 0.5.
    pub degenerate: bool,
}

/// The aligned series ω was fitted on.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaWindow {
    pub mode: OmegaMode,
    /// Training indices `[start, end)` covered by the window.
    pub start: usize,
    pub end: usize,
    pub observed: Vec<f64>,
    pub arima: Vec<f64>,
    pub pc: Vec<f64>,
}

impl OmegaWindow {
    /// Mean squared error of the blend at weight `omega` over the window.
    pub fn mse_at(&self, omega: f64) -> f64 {
        let blended = combine_unchecked(&self.arima, &self.pc, omega);
        self.observed
            .iter()
            .zip(&blended)
            .map(|(y, f)| (y - f) * (y - f))
            .sum::<f64>()
            / self.observed.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub arima: ArimaModel,
    pub pc: PolyModel,
    pub omega: f64,
    pub omega_unclipped: f64,
    pub degenerate: bool,
    /// `None` when ω was supplied rather than fitted.
    pub omega_window: Option<OmegaWindow>,
}

/// Closed-form MSE-optimal blend weight, clipped to `[0, 1]`.
pub fn optimal_omega(y_true: &[f64], y_arima: &[f64], y_pc: &[f64]) -> Result<OmegaFit> {
    let n = y_true.len();
    if n == 0 {
        return Err(ForecastError::invalid("optimal weight needs at least one point"));
    }
    if y_arima.len() != n || y_pc.len() != n {
        return Err(ForecastError::invalid(format!(
            "lengths differ: {n} observed, {} ARIMA, {} PC",
            y_arima.len(),
            y_pc.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut scale = 0.0;
    for ((y, a), p) in y_true.iter().zip(y_arima).zip(y_pc) {
        let diff = a - p;
        num += diff * (y - p);
        den += diff * diff;
        scale += a * a + p * p;
    }
    if den <= DEGENERATE_RATIO * scale {
        return Ok(OmegaFit {
            omega: 0.5,
            omega_unclipped: 0.5,
            degenerate: true,
        });
    }
    let omega_unclipped = num / den;
    Ok(OmegaFit {
        omega: omega_unclipped.clamp(0.0, 1.0),
        omega_unclipped,
        degenerate: false,
    })
}

fn combine_unchecked(y_arima: &[f64], y_pc: &[f64], omega: f64) -> Vec<f64> {
    y_arima
        .iter()
        .zip(y_pc)
        .map(|(a, p)| omega * a + (1.0 - omega) * p)
        .collect()
}

/// Elementwise `ω · a + (1 − ω) · p`.
pub fn combine(y_arima: &[f64], y_pc: &[f64], omega: f64) -> Result<Vec<f64>> {
    if y_arima.len() != y_pc.len() {
        return Err(ForecastError::invalid(format!(
            "cannot combine {} ARIMA forecasts with {} PC forecasts",
            y_arima.len(),
            y_pc.len()
        )));
    }
    if !(0.0..=1.0).contains(&omega) {
        return Err(ForecastError::invalid(format!(
            "weight must lie in [0, 1], got {omega}"
        )));
    }
    Ok(combine_unchecked(y_arima, y_pc, omega))
}

/// Orders for both components, resolved against a particular training series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedConfig {
    pub arima: ArimaOrder,
    pub window_len: usize,
    pub degree: usize,
}

/// Resolves `Auto` specs on `train`: AIC search for ARIMA and validation
/// RMSE for the polynomial classifier. Also returns the ARIMA model fitted on
/// all of `train` when the search produced one.
pub fn resolve_config(train: &[f64], config: &HybridConfig) -> Result<(ResolvedConfig, Option<ArimaModel>)> {
    let resolve_arima = || match config.arima {
        ArimaSpec::Fixed(order) => Ok((order, None)),
        ArimaSpec::Auto => auto_order(train, MAX_P, MAX_Q)
            .map(|auto| (auto.order, Some(auto.model)))
            .map_err(|e| e.in_component("ARIMA")),
    };
    let resolve_pc = || match config.pc {
        PcSpec::Fixed { window_len, degree } => Ok((window_len, degree)),
        PcSpec::Auto => select_pc_config(train, &DEFAULT_WINDOW_GRID, &DEFAULT_DEGREE_GRID, config.scale_inputs)
            .map(|sel| (sel.window_len, sel.degree))
            .map_err(|e| e.in_component("PC")),
    };
    let (arima, pc) = rayon::join(resolve_arima, resolve_pc);
    let (order, model) = arima?;
    let (window_len, degree) = pc?;
    Ok((
        ResolvedConfig {
            arima: order,
            window_len,
            degree,
        },
        model,
    ))
}

fn fit_components(train: &[f64], resolved: &ResolvedConfig, scale_inputs: bool) -> Result<(ArimaModel, PolyModel)> {
    let (arima, pc) = rayon::join(
        || fit_arima(train, resolved.arima).map_err(|e| e.in_component("ARIMA")),
        || fit_pc_with(train, resolved.window_len, resolved.degree, scale_inputs).map_err(|e| e.in_component("PC")),
    );
    Ok((arima?, pc?))
}

/// Fits both components and the blend weight on `train`.
pub fn fit_hybrid(train: &[f64], config: &HybridConfig) -> Result<HybridModel> {
    let (resolved, full_arima) = resolve_config(train, config)?;
    fit_hybrid_resolved(train, &resolved, config.omega_mode, config.scale_inputs, full_arima)
}

/// As [`fit_hybrid`] with orders already fixed. `full_arima`, when given,
/// must be the ARIMA model fitted on all of `train` at `resolved.arima`.
pub fn fit_hybrid_resolved(
    train: &[f64],
    resolved: &ResolvedConfig,
    omega_mode: OmegaMode,
    scale_inputs: bool,
    full_arima: Option<ArimaModel>,
) -> Result<HybridModel> {
    let (window, arima, pc) = match omega_mode {
        OmegaMode::ValidationTail => {
            let split = (OMEGA_FIT_FRACTION * train.len() as f64 + 1e-9).floor() as usize;
            if split == 0 || split >= train.len() {
                return Err(ForecastError::invalid(format!(
                    "cannot carve a validation tail out of {} training observations",
                    train.len()
                )));
            }
            let (prefix, tail) = train.split_at(split);
            let (arima_prefix, pc_prefix) = fit_components(prefix, resolved, scale_inputs)?;
            let (a, p) = rayon::join(
                || {
                    arima_prefix
                        .rolling_forecast(prefix, tail)
                        .map_err(|e| e.in_component("ARIMA"))
                },
                || {
                    pc_prefix
                        .rolling_forecast(prefix, tail)
                        .map_err(|e| e.in_component("PC"))
                },
            );
            let window = OmegaWindow {
                mode: omega_mode,
                start: split,
                end: train.len(),
                observed: tail.to_vec(),
                arima: a?,
                pc: p?,
            };
            let (arima, pc) = match full_arima {
                Some(model) => {
                    let pc = fit_pc_with(train, resolved.window_len, resolved.degree, scale_inputs)
                        .map_err(|e| e.in_component("PC"))?;
                    (model, pc)
                }
                None => fit_components(train, resolved, scale_inputs)?,
            };
            (window, arima, pc)
        }
        OmegaMode::InSample => {
            let (arima, pc) = match full_arima {
                Some(model) => {
                    let pc = fit_pc_with(train, resolved.window_len, resolved.degree, scale_inputs)
                        .map_err(|e| e.in_component("PC"))?;
                    (model, pc)
                }
                None => fit_components(train, resolved, scale_inputs)?,
            };
            let (a_start, a_fit) = arima.fitted_values(train).map_err(|e| e.in_component("ARIMA"))?;
            let (p_start, p_fit) = pc.fitted_values(train).map_err(|e| e.in_component("PC"))?;
            // both must target the same indices; start where the later one does
            let start = a_start.max(p_start);
            let window = OmegaWindow {
                mode: omega_mode,
                start,
                end: train.len(),
                observed: train[start..].to_vec(),
                arima: a_fit[start - a_start..].to_vec(),
                pc: p_fit[start - p_start..].to_vec(),
            };
            (window, arima, pc)
        }
    };

    let fit = optimal_omega(&window.observed, &window.arima, &window.pc)?;
    Ok(HybridModel {
        arima,
        pc,
        omega: fit.omega,
        omega_unclipped: fit.omega_unclipped,
        degenerate: fit.degenerate,
        omega_window: Some(window),
    })
}

/// Per-model rolling forecasts over a test segment.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridForecast {
    pub arima: Vec<f64>,
    pub pc: Vec<f64>,
    pub hybrid: Vec<f64>,
}

impl HybridModel {
    /// Hybrid with a caller-chosen weight; no fitting window is recorded.
    pub fn with_omega(arima: ArimaModel, pc: PolyModel, omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(ForecastError::invalid(format!(
                "weight must lie in [0, 1], got {omega}"
            )));
        }
        Ok(Self {
            arima,
            pc,
            omega,
            omega_unclipped: omega,
            degenerate: false,
            omega_window: None,
        })
    }

    /// One-step forecast of the observation following `history`.
    pub fn forecast_next(&self, history: &[f64]) -> Result<f64> {
        let a = self.arima.forecast_next(history).map_err(|e| e.in_component("ARIMA"))?;
        let l = self.pc.window_len();
        if history.len() < l {
            return Err(ForecastError::invalid(format!(
                "window length {l} needs {l} observations of history, got {}",
                history.len()
            ))
            .in_component("PC"));
        }
        let p = self
            .pc
            .forecast(&history[history.len() - l..])
            .map_err(|e| e.in_component("PC"))?;
        Ok(self.omega * a + (1.0 - self.omega) * p)
    }

    pub fn rolling_forecast(&self, train: &[f64], test: &[f64]) -> Result<Vec<f64>> {
        Ok(self.rolling_forecast_components(train, test)?.hybrid)
    }

    pub fn rolling_forecast_components(&self, train: &[f64], test: &[f64]) -> Result<HybridForecast> {
        let arima = self
            .arima
            .rolling_forecast(train, test)
            .map_err(|e| e.in_component("ARIMA"))?;
        let pc = self
            .pc
            .rolling_forecast(train, test)
            .map_err(|e| e.in_component("PC"))?;
        let hybrid = combine(&arima, &pc, self.omega)?;
        Ok(HybridForecast { arima, pc, hybrid })
    }
}

/// `rolling_forecast_hybrid(model, train, test)`.
pub fn rolling_forecast_hybrid(model: &HybridModel, train: &[f64], test: &[f64]) -> Result<Vec<f64>> {
    model.rolling_forecast(train, test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn omega_examples() {
        let fit = optimal_omega(&[0.5, 0.5], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(fit.omega, 0.5);
        let fit = optimal_omega(&[2.0], &[1.0], &[0.0]).unwrap();
        assert_eq!(fit.omega_unclipped, 2.0);
        assert_eq!(fit.omega, 1.0);
        let fit = optimal_omega(&[-1.0], &[1.0], &[0.0]).unwrap();
        assert_eq!(fit.omega, 0.0);
    }

    #[test]
    fn identical_forecasts_are_degenerate() {
        let fit = optimal_omega(&[1.0, 2.0, 3.0], &[1.5, 2.5, 2.0], &[1.5, 2.5, 2.0]).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.omega, 0.5);
        let fit = optimal_omega(&[1.0], &[0.0], &[0.0]).unwrap();
        assert!(fit.degenerate);
    }

    #[test]
    fn omega_errors() {
        assert!(optimal_omega(&[], &[], &[]).is_err());
        assert!(optimal_omega(&[1.0, 2.0], &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn combine_examples() {
        let a = [1.25, -3.5, 7.0];
        let p = [0.1, 0.2, 0.3];
        assert_eq!(combine(&a, &p, 1.0).unwrap(), a.to_vec());
        assert_eq!(combine(&a, &p, 0.0).unwrap(), p.to_vec());
        assert_eq!(combine(&[4.0], &[0.0], 0.25).unwrap(), vec![1.0]);
        assert!(combine(&a, &p[..2], 0.5).is_err());
        assert!(combine(&a, &p, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn omega_is_scale_invariant(
            y in prop::collection::vec(-50.0..50.0f64, 8),
            a in prop::collection::vec(-50.0..50.0f64, 8),
            p in prop::collection::vec(-50.0..50.0f64, 8),
            s in prop_oneof![-100.0..-0.01f64, 0.01..100.0f64],
        ) {
            let base = optimal_omega(&y, &a, &p).unwrap();
            let scaled = |v: &[f64]| v.iter().map(|x| x * s).collect::<Vec<_>>();
            let other = optimal_omega(&scaled(&y), &scaled(&a), &scaled(&p)).unwrap();
            prop_assert_eq!(base.degenerate, other.degenerate);
            prop_assert!((base.omega_unclipped - other.omega_unclipped).abs() <= 1e-9 * base.omega_unclipped.abs().max(1.0));
        }

        #[test]
        fn clipped_omega_beats_endpoints(
            y in prop::collection::vec(-10.0..10.0f64, 1..30),
            seed in 0u64..1000,
        ) {
            let n = y.len();
            let a: Vec<f64> = (0..n).map(|i| y[i] + ((i as u64 * 31 + seed) % 7) as f64 - 3.0).collect();
            let p: Vec<f64> = (0..n).map(|i| y[i] - ((i as u64 * 17 + seed) % 5) as f64 + 1.5).collect();
            let fit = optimal_omega(&y, &a, &p).unwrap();
            prop_assert!((0.0..=1.0).contains(&fit.omega));
            let window = OmegaWindow { mode: OmegaMode::ValidationTail, start: 0, end: n, observed: y, arima: a, pc: p };
            let best = window.mse_at(fit.omega);
            let edge = window.mse_at(0.0).min(window.mse_at(1.0));
            prop_assert!(best <= edge + 1e-9 * edge.max(1.0));
        }
    }
}
