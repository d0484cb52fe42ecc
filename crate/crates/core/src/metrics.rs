//! Forecast accuracy: MAE, RMSE and CV(RMSE) in percent, plus wall time.

use crate::error::{ForecastError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mae: f64,
    pub rmse: f64,
    pub cv_rmse_percent: f64,
    pub n: usize,
    pub wall_seconds: f64,
}

fn check(obs: &[f64], pred: &[f64]) -> Result<()> {
    if obs.is_empty() {
        return Err(ForecastError::invalid("metrics need at least one observation"));
    }
    if obs.len() != pred.len() {
        return Err(ForecastError::invalid(format!(
            "{} observations but {} predictions",
            obs.len(),
            pred.len()
        )));
    }
    Ok(())
}

pub fn mae(obs: &[f64], pred: &[f64]) -> Result<f64> {
    check(obs, pred)?;
    Ok(obs.iter().zip(pred).map(|(o, p)| (o - p).abs()).sum::<f64>() / obs.len() as f64)
}

pub fn rmse(obs: &[f64], pred: &[f64]) -> Result<f64> {
    check(obs, pred)?;
    let ss: f64 = obs.iter().zip(pred).map(|(o, p)| (o - p) * (o - p)).sum();
    Ok((ss / obs.len() as f64).sqrt())
}

/// `100 · RMSE / mean(obs)`.
pub fn cv_rmse(obs: &[f64], pred: &[f64]) -> Result<f64> {
    let r = rmse(obs, pred)?;
    let mean = obs.iter().sum::<f64>() / obs.len() as f64;
    if mean == 0.0 {
        return Err(ForecastError::degenerate(
            "CV(RMSE) is undefined for observations with zero mean",
        ));
    }
    Ok(100.0 * r / mean)
}

pub fn evaluate(obs: &[f64], pred: &[f64], wall_seconds: f64) -> Result<MetricsReport> {
    Ok(MetricsReport {
        mae: mae(obs, pred)?,
        rmse: rmse(obs, pred)?,
        cv_rmse_percent: cv_rmse(obs, pred)?,
        n: obs.len(),
        wall_seconds,
    })
}
