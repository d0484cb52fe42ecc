//! Experiment orchestration for the `hybridcast` command-line tool: CSV
//! ingestion, train/test comparisons, degree sweeps and SVG plots.

pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod plot;

pub use config::{parse_arima_spec, parse_omega_mode, parse_pc_spec, DataSource, ExperimentConfig};
pub use data::{load_csv, load_csv_with, ColumnRef, LoadedSeries};
pub use error::{CliError, Result};
pub use experiment::{
    run_compare, run_degree_sweep, CompareOutcome, ComparisonTable, DegreeSweep, ForecastSet, ModelRow,
};
pub use plot::{emit_plot, render_svg};

/// Reference datasets and the columns their usual exports carry.
pub const DATASET_HELP: &str = "\
Reference datasets (not bundled; download them and pass --data/--column):

  Delhi daily climate, 2013-01-01 to 2017-04-24 (Kaggle, \"Daily Climate time series data\")
    columns: date, meantemp, humidity, wind_speed, meanpressure
    e.g. --data DailyDelhiClimate.csv --column meantemp --label-column date
  Daily gold price, 2013 to 2023 (investing.com commodities, historical data export)
    columns: Date, Price, Open, High, Low, Vol., Change %
    e.g. --data gold.csv --column Price --label-column Date
  Daily crude oil price, 2007-01-02 to 2023-12-05 (investing.com commodities, historical data export)
    columns: Date, Price, Open, High, Low, Vol., Change %
    e.g. --data oil.csv --column Price --label-column Date
  Australian monthly beer production, 1956 to 1995 (Kaggle)
    columns: Month, Monthly beer production
    e.g. --data beer.csv --column \"Monthly beer production\" --label-column Month

Sources: https://www.kaggle.com/datasets/ and https://vn.investing.com/commodities
Values may use comma thousands-separators; rows that do not parse are skipped and counted.
Exports from investing.com list the newest row first; reverse them into chronological order before use.
";
