//! Time-series container and the shared data plumbing: differencing and its
//! inverse, lag windows, chronological splits and the sample ACF.

use crate::error::{ForecastError, Result};
use crate::linalg::DenseMatrix;

/// An ordered univariate series of finite observations.
///
/// Labels are opaque time strings carried through for reporting only.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(ForecastError::invalid("time series must hold at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(ForecastError::invalid(format!(
                "time series value at index {pos} is not finite ({})",
                values[pos]
            )));
        }
        Ok(Self {
            name: name.into(),
            values,
            labels: None,
        })
    }

    pub fn with_labels(name: impl Into<String>, values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(ForecastError::invalid(format!(
                "{} labels supplied for {} values",
                labels.len(),
                values.len()
            )));
        }
        let mut series = Self::new(name, values)?;
        series.labels = Some(labels);
        Ok(series)
    }

    /// Unnamed series, mostly for tests and synthetic data.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new("series", values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one value.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Contiguous sub-series `[start, end)`, labels included.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(ForecastError::invalid(format!(
                "slice [{start}, {end}) is empty or exceeds series length {}",
                self.len()
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            values: self.values[start..end].to_vec(),
            labels: self.labels.as_ref().map(|l| l[start..end].to_vec()),
        })
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// A series differenced `order` times together with what is needed to undo it.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferencedSeries {
    pub values: Vec<f64>,
    pub order: usize,
    /// First element of the input to each differencing pass, outermost first.
    pub heads: Vec<f64>,
    pub source_len: usize,
}

/// Row `i` holds `L` consecutive observations, `targets[i]` the value after them.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowMatrix {
    pub rows: DenseMatrix,
    pub targets: Vec<f64>,
    pub window_len: usize,
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two points.
pub(crate) fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

fn first_difference(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Applies the first-difference operator `d` times.
pub fn difference(values: &[f64], d: usize) -> Result<DifferencedSeries> {
    if values.len() <= d {
        return Err(ForecastError::invalid(format!(
            "differencing of order {d} needs at least {} observations, got {}",
            d + 1,
            values.len()
        )));
    }
    let mut current = values.to_vec();
    let mut heads = Vec::with_capacity(d);
    for _ in 0..d {
        heads.push(current[0]);
        current = first_difference(&current);
    }
    Ok(DifferencedSeries {
        values: current,
        order: d,
        heads,
        source_len: values.len(),
    })
}

/// Exact inverse of [`difference`].
pub fn integrate(ds: &DifferencedSeries) -> Result<Vec<f64>> {
    if ds.heads.len() != ds.order {
        return Err(ForecastError::CorruptStructure(format!(
            "differenced series of order {} carries {} heads",
            ds.order,
            ds.heads.len()
        )));
    }
    if ds.values.len() + ds.order != ds.source_len {
        return Err(ForecastError::CorruptStructure(format!(
            "{} values at order {} cannot come from a source of length {}",
            ds.values.len(),
            ds.order,
            ds.source_len
        )));
    }
    let mut current = ds.values.clone();
    for &head in ds.heads.iter().rev() {
        // Neumaier-compensated running sum.
        let mut level = Vec::with_capacity(current.len() + 1);
        let (mut acc, mut carry) = (head, 0.0);
        level.push(acc);
        for &v in &current {
            let t = acc + v;
            carry += if acc.abs() >= v.abs() {
                (acc - t) + v
            } else {
                (v - t) + acc
            };
            acc = t;
            level.push(acc + carry);
        }
        current = level;
    }
    Ok(current)
}

/// Maps a one-step forecast on the `order`-times differenced scale back to
/// the raw scale. `recent` holds raw observations, most recent last; only the
/// last `order` of them are used.
pub fn extend_integrate(recent: &[f64], order: usize, diff_forecast: f64) -> Result<f64> {
    if recent.len() < order {
        return Err(ForecastError::invalid(format!(
            "undifferencing at order {order} needs {order} recent observations, got {}",
            recent.len()
        )));
    }
    let mut tail = recent[recent.len() - order..].to_vec();
    // last value of each difference level of the tail, level 0 first
    let mut lasts = Vec::with_capacity(order);
    for _ in 0..order {
        lasts.push(*tail.last().expect("tail shrinks by one per level"));
        tail = first_difference(&tail);
    }
    Ok(lasts.iter().rev().fold(diff_forecast, |f, last| last + f))
}

/// Chronological split: train gets `floor(train_fraction * n)` points.
pub fn train_test_split(series: &TimeSeries, train_fraction: f64) -> Result<(TimeSeries, TimeSeries)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ForecastError::invalid(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = series.len();
    // the epsilon keeps products like 0.7 * 10 from flooring to 6
    let train_len = (train_fraction * n as f64 + 1e-9).floor() as usize;
    if train_len == 0 {
        return Err(ForecastError::invalid(format!(
            "train fraction {train_fraction} leaves no training points out of {n}"
        )));
    }
    if train_len >= n {
        return Err(ForecastError::invalid(format!(
            "train fraction {train_fraction} leaves no test points out of {n}"
        )));
    }
    Ok((series.slice(0, train_len)?, series.slice(train_len, n)?))
}

/// Shortest training series any model is fitted on. Splitting itself does
/// not enforce it; the fitting entry points do.
pub const MIN_TRAIN_LEN: usize = 10;

/// Overlapping lag windows of length `window_len` with their next value.
pub fn build_windows(values: &[f64], window_len: usize) -> Result<WindowMatrix> {
    if window_len == 0 {
        return Err(ForecastError::invalid("window length must be at least 1"));
    }
    if values.len() < window_len + 1 {
        return Err(ForecastError::invalid(format!(
            "window length {window_len} needs at least {} observations, got {}",
            window_len + 1,
            values.len()
        )));
    }
    let n = values.len() - window_len;
    let mut data = Vec::with_capacity(n * window_len);
    for i in 0..n {
        data.extend_from_slice(&values[i..i + window_len]);
    }
    Ok(WindowMatrix {
        rows: DenseMatrix::new(n, window_len, data)?,
        targets: values[window_len..].to_vec(),
        window_len,
    })
}

/// True when the spread of `values` is negligible relative to their magnitude.
pub(crate) fn is_constant(values: &[f64]) -> bool {
    let m = mean(values);
    let scale = values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    values.iter().all(|v| (v - m).abs() <= 1e-12 * scale)
}

/// Biased sample autocorrelations `r_0..=r_max_lag` (denominator `n`).
pub fn sample_autocorrelation(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n <= max_lag {
        return Err(ForecastError::invalid(format!(
            "autocorrelation to lag {max_lag} needs more than {max_lag} observations, got {n}"
        )));
    }
    if is_constant(values) {
        return Err(ForecastError::degenerate(
            "autocorrelation of a constant series is undefined",
        ));
    }
    let m = mean(values);
    let centered: Vec<f64> = values.iter().map(|v| v - m).collect();
    let denom: f64 = centered.iter().map(|c| c * c).sum();
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let num: f64 = centered[..n - k].iter().zip(&centered[k..]).map(|(a, b)| a * b).sum();
            num / denom
        })
        .collect())
}
