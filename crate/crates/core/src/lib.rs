//! Univariate forecasting with ARIMA, a polynomial classifier, and their
//! parallel hybrid blended by an analytically optimal weight.
//!
//! All fitting is deterministic: identical inputs give bitwise-identical
//! models and forecasts, including where order searches run in parallel.

pub mod arima;
pub mod error;
pub mod hybrid;
pub mod linalg;
pub mod metrics;
pub mod optim;
pub mod polycls;
pub mod series;
pub mod stability;
pub mod synth;

pub use arima::{auto_order, choose_d, fit_arima, ArimaModel, ArimaOrder, AutoArima};
pub use error::{ForecastError, Result};
pub use hybrid::{
    combine, fit_hybrid, optimal_omega, rolling_forecast_hybrid, ArimaSpec, HybridConfig, HybridModel, OmegaMode,
    PcSpec,
};
pub use metrics::{cv_rmse, evaluate, mae, rmse, MetricsReport};
pub use polycls::{build_basis, fit_pc, forecast_pc, rolling_forecast_pc, select_pc_config, MonomialBasis, PolyModel};
pub use series::{
    build_windows, difference, extend_integrate, integrate, sample_autocorrelation, train_test_split, TimeSeries,
};
pub use synth::{synth_dataset, SynthKind};
