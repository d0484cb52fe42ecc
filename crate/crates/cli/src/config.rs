//! Experiment configuration and the textual forms accepted on the command line.

use std::path::PathBuf;

use hybridcast::arima::ArimaOrder;
use hybridcast::polycls::MAX_DEGREE;
use hybridcast::{ArimaSpec, HybridConfig, OmegaMode, PcSpec, SynthKind, TimeSeries};

use crate::data::{load_csv, ColumnRef};
use crate::error::{CliError, Result};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SYNTH_LEN: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv {
        path: PathBuf,
        value_column: ColumnRef,
        label_column: Option<ColumnRef>,
    },
    /// Generated from `ExperimentConfig::seed`.
    Synthetic { kind: SynthKind, length: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub train_fraction: f64,
    pub arima: ArimaSpec,
    pub pc: PcSpec,
    pub omega_mode: OmegaMode,
    /// Replaces the fitted blend weight when set.
    pub omega_override: Option<f64>,
    pub scale_inputs: bool,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(source: DataSource, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            source,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            arima: ArimaSpec::Auto,
            pc: PcSpec::Auto,
            omega_mode: OmegaMode::ValidationTail,
            omega_override: None,
            scale_inputs: false,
            seed: DEFAULT_SEED,
            output_dir: output_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(CliError::Config(format!(
                "train fraction must lie strictly between 0 and 1, got {}",
                self.train_fraction
            )));
        }
        if let Some(w) = self.omega_override {
            if !(0.0..=1.0).contains(&w) {
                return Err(CliError::Config(format!("weight must lie in [0, 1], got {w}")));
            }
        }
        if let PcSpec::Fixed { window_len, degree } = self.pc {
            if window_len == 0 || !(1..=MAX_DEGREE).contains(&degree) {
                return Err(CliError::Config(format!(
                    "PC needs L >= 1 and 1 <= K <= {MAX_DEGREE}, got L={window_len}, K={degree}"
                )));
            }
        }
        Ok(())
    }

    pub fn hybrid_config(&self) -> HybridConfig {
        HybridConfig {
            arima: self.arima,
            pc: self.pc,
            omega_mode: self.omega_mode,
            scale_inputs: self.scale_inputs,
        }
    }

    pub fn load_series(&self) -> Result<TimeSeries> {
        match &self.source {
            DataSource::Csv {
                path,
                value_column,
                label_column,
            } => Ok(load_csv(path, value_column, label_column.as_ref())?.series),
            DataSource::Synthetic { kind, length } => Ok(hybridcast::synth_dataset(*kind, *length, self.seed)?),
        }
    }
}

/// `auto` or `p,d,q`.
pub fn parse_arima_spec(s: &str) -> Result<ArimaSpec> {
    if s.trim().eq_ignore_ascii_case("auto") {
        return Ok(ArimaSpec::Auto);
    }
    match parse_usizes(s).as_deref() {
        Some([p, d, q]) => Ok(ArimaSpec::Fixed(ArimaOrder::new(*p, *d, *q)?)),
        _ => Err(CliError::Config(format!(
            "expected 'auto' or 'p,d,q' for the ARIMA order, got '{s}'"
        ))),
    }
}

/// `auto` or `L,K`.
pub fn parse_pc_spec(s: &str) -> Result<PcSpec> {
    if s.trim().eq_ignore_ascii_case("auto") {
        return Ok(PcSpec::Auto);
    }
    match parse_usizes(s).as_deref() {
        Some([l, k]) => Ok(PcSpec::Fixed {
            window_len: *l,
            degree: *k,
        }),
        _ => Err(CliError::Config(format!(
            "expected 'auto' or 'L,K' for the PC configuration, got '{s}'"
        ))),
    }
}

pub fn parse_omega_mode(s: &str) -> Result<OmegaMode> {
    match s.trim() {
        "validation-tail" => Ok(OmegaMode::ValidationTail),
        "in-sample" => Ok(OmegaMode::InSample),
        other => Err(CliError::Config(format!(
            "expected 'validation-tail' or 'in-sample' for the weight mode, got '{other}'"
        ))),
    }
}

fn parse_usizes(s: &str) -> Option<Vec<usize>> {
    s.split(',').map(|part| part.trim().parse().ok()).collect()
}
