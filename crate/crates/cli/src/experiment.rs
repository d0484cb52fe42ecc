//! Train/test comparisons of ARIMA, the polynomial classifier and their hybrid.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hybridcast::arima::{MAX_P, MAX_Q};
use hybridcast::hybrid::resolve_config;
use hybridcast::polycls::{fit_pc_with, DEFAULT_DEGREE_GRID, DEFAULT_WINDOW_GRID, MAX_DEGREE};
use hybridcast::series::MIN_TRAIN_LEN;
use hybridcast::{
    auto_order, evaluate, fit_arima, fit_hybrid, select_pc_config, train_test_split, ArimaModel, ArimaSpec,
    ForecastError, HybridModel, MetricsReport, PcSpec, PolyModel, TimeSeries,
};
use log::info;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result, StageExt};
use crate::plot::emit_plot;

pub const MODEL_NAMES: [&str; 3] = ["ARIMA", "PC", "Hybrid"];
pub const METRIC_COLUMNS: [&str; 4] = ["Time (s)", "MAE", "RMSE", "CV(RMSE)%"];

pub const COMPARISON_FILE: &str = "comparison.csv";
pub const FORECASTS_FILE: &str = "forecasts.csv";
pub const PLOT_FILE: &str = "forecasts.svg";
pub const SWEEP_FILE: &str = "degree_sweep.csv";

/// One model's test metrics, or the reason it has none.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow {
    pub label: String,
    /// Chosen hyperparameters in readable form.
    pub config: String,
    pub outcome: std::result::Result<MetricsReport, String>,
}

/// Test-set comparison with exactly one row per model, in [`MODEL_NAMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub dataset: String,
    pub train_len: usize,
    pub test_len: usize,
    rows: [ModelRow; 3],
    pub omega: Option<f64>,
    pub omega_unclipped: Option<f64>,
    pub omega_degenerate: bool,
}

impl ComparisonTable {
    pub fn rows(&self) -> &[ModelRow; 3] {
        &self.rows
    }

    pub fn row(&self, model: &str) -> Option<&ModelRow> {
        self.rows.iter().find(|r| r.label == model)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (train {}, test {})\n", self.dataset, self.train_len, self.test_len);
        out.push_str(&render_text(&["Model"], &self.rows));
        if let Some(w) = self.omega {
            let _ = writeln!(
                out,
                "omega = {w:.4} (unclipped {:.4}{})",
                self.omega_unclipped.unwrap_or(w),
                if self.omega_degenerate { ", degenerate" } else { "" }
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        render_csv("Model", &self.rows)
    }
}

/// Aligned per-model forecasts over the test segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSet {
    /// Index of the first test point in the full series.
    pub start: usize,
    pub observed: Vec<f64>,
    pub arima: Option<Vec<f64>>,
    pub pc: Option<Vec<f64>>,
    pub hybrid: Option<Vec<f64>>,
}

impl ForecastSet {
    /// CSV with columns `index,observed,arima,pc,hybrid`; values at full
    /// round-trip precision, empty cells for failed models.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,observed,arima,pc,hybrid\n");
        let cell = |f: &Option<Vec<f64>>, i: usize| f.as_ref().map_or(String::new(), |v| format!("{}", v[i]));
        for (i, obs) in self.observed.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.start + i,
                obs,
                cell(&self.arima, i),
                cell(&self.pc, i),
                cell(&self.hybrid, i)
            );
        }
        out
    }

    fn named(&self) -> Vec<(&str, &[f64])> {
        MODEL_NAMES
            .iter()
            .zip([&self.arima, &self.pc, &self.hybrid])
            .filter_map(|(name, f)| f.as_deref().map(|f| (*name, f)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub table: ComparisonTable,
    pub forecasts: ForecastSet,
    pub arima: Option<ArimaModel>,
    pub pc: Option<PolyModel>,
    pub hybrid: Option<HybridModel>,
    pub files: Vec<PathBuf>,
}

/// Splits the series, fits and rolling-forecasts each model independently
/// (each timed over its own fit and forecast), and writes the table,
/// forecasts and plot to the output directory.
pub fn run_compare(config: &ExperimentConfig) -> Result<CompareOutcome> {
    config.validate().stage("validate configuration")?;
    let series = config.load_series().stage("load data")?;
    let (train, test) = split(&series, config.train_fraction).stage("split")?;
    let (tr, te) = (train.values(), test.values());

    let (arima_secs, arima) = timed(|| {
        let model = match config.arima {
            ArimaSpec::Auto => auto_order(tr, MAX_P, MAX_Q)?.model,
            ArimaSpec::Fixed(order) => fit_arima(tr, order)?,
        };
        let forecast = model.rolling_forecast(tr, te)?;
        Ok((model, forecast))
    });
    let (pc_secs, pc) = timed(|| {
        let (l, k) = match config.pc {
            PcSpec::Auto => {
                let sel = select_pc_config(tr, &DEFAULT_WINDOW_GRID, &DEFAULT_DEGREE_GRID, config.scale_inputs)?;
                (sel.window_len, sel.degree)
            }
            PcSpec::Fixed { window_len, degree } => (window_len, degree),
        };
        let model = fit_pc_with(tr, l, k, config.scale_inputs)?;
        let forecast = model.rolling_forecast(tr, te)?;
        Ok((model, forecast))
    });
    let (hybrid_secs, hybrid) = timed(|| {
        let model = fit_hybrid_model(tr, config)?;
        let forecast = model.rolling_forecast(tr, te)?;
        Ok((model, forecast))
    });

    let row = |label: &str, config: String, secs: f64, forecast: Option<&Vec<f64>>, err: Option<String>| ModelRow {
        label: label.to_string(),
        config,
        outcome: match (forecast, err) {
            (Some(f), _) => evaluate(te, f, secs).map_err(|e| e.to_string()),
            (None, err) => Err(err.unwrap_or_default()),
        },
    };
    let rows = [
        row(
            MODEL_NAMES[0],
            arima.as_ref().map_or(String::new(), |(m, _)| m.order.to_string()),
            arima_secs,
            arima.as_ref().ok().map(|(_, f)| f),
            arima.as_ref().err().map(|e| e.to_string()),
        ),
        row(
            MODEL_NAMES[1],
            pc.as_ref().map_or(String::new(), |(m, _)| pc_label(m)),
            pc_secs,
            pc.as_ref().ok().map(|(_, f)| f),
            pc.as_ref().err().map(|e| e.to_string()),
        ),
        row(
            MODEL_NAMES[2],
            hybrid.as_ref().map_or(String::new(), |(m, _)| hybrid_label(m)),
            hybrid_secs,
            hybrid.as_ref().ok().map(|(_, f)| f),
            hybrid.as_ref().err().map(|e| e.to_string()),
        ),
    ];
    let hybrid_model = hybrid.as_ref().ok().map(|(m, _)| m);
    let table = ComparisonTable {
        dataset: series.name().to_string(),
        train_len: tr.len(),
        test_len: te.len(),
        rows,
        omega: hybrid_model.map(|m| m.omega),
        omega_unclipped: hybrid_model.map(|m| m.omega_unclipped),
        omega_degenerate: hybrid_model.is_some_and(|m| m.degenerate),
    };
    let forecasts = ForecastSet {
        start: tr.len(),
        observed: te.to_vec(),
        arima: arima.as_ref().ok().map(|(_, f)| f.clone()),
        pc: pc.as_ref().ok().map(|(_, f)| f.clone()),
        hybrid: hybrid.as_ref().ok().map(|(_, f)| f.clone()),
    };
    let files = write_compare_outputs(&config.output_dir, &table, &forecasts).stage("write outputs")?;
    Ok(CompareOutcome {
        table,
        forecasts,
        arima: arima.ok().map(|(m, _)| m),
        pc: pc.ok().map(|(m, _)| m),
        hybrid: hybrid.ok().map(|(m, _)| m),
        files,
    })
}

/// Fits the hybrid on `train`, honouring a forced weight if configured.
pub fn fit_hybrid_model(train: &[f64], config: &ExperimentConfig) -> std::result::Result<HybridModel, ForecastError> {
    let hybrid_config = config.hybrid_config();
    match config.omega_override {
        None => fit_hybrid(train, &hybrid_config),
        Some(omega) => {
            let (resolved, full_arima) = resolve_config(train, &hybrid_config)?;
            let arima = match full_arima {
                Some(m) => m,
                None => fit_arima(train, resolved.arima)?,
            };
            let pc = fit_pc_with(train, resolved.window_len, resolved.degree, config.scale_inputs)?;
            HybridModel::with_omega(arima, pc, omega)
        }
    }
}

/// Degree sweep with the window length held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSweep {
    pub dataset: String,
    pub window_len: usize,
    /// One row per degree `1..=3`, labelled by the degree.
    pub rows: Vec<ModelRow>,
}

impl DegreeSweep {
    pub fn to_text(&self) -> String {
        format!(
            "{} (PC, L = {})\n{}",
            self.dataset,
            self.window_len,
            render_text(&["Degree"], &self.rows)
        )
    }

    pub fn to_csv(&self) -> String {
        render_csv("Degree", &self.rows)
    }

    /// Degree of the row with the smallest test RMSE.
    pub fn best_degree(&self) -> Option<usize> {
        self.rows
            .iter()
            .filter_map(|r| Some((r.label.parse::<usize>().ok()?, r.outcome.as_ref().ok()?.rmse)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
    }
}

/// Test metrics of the polynomial classifier for every degree at one window length.
pub fn run_degree_sweep(config: &ExperimentConfig) -> Result<DegreeSweep> {
    config.validate().stage("validate configuration")?;
    let series = config.load_series().stage("load data")?;
    let (train, test) = split(&series, config.train_fraction).stage("split")?;
    let (tr, te) = (train.values(), test.values());
    let window_len = match config.pc {
        PcSpec::Fixed { window_len, .. } => window_len,
        PcSpec::Auto => {
            select_pc_config(tr, &DEFAULT_WINDOW_GRID, &DEFAULT_DEGREE_GRID, config.scale_inputs)
                .stage("select window length")?
                .window_len
        }
    };
    let rows = (1..=MAX_DEGREE)
        .map(|k| {
            let (secs, res) = timed(|| {
                let model = fit_pc_with(tr, window_len, k, config.scale_inputs)?;
                model.rolling_forecast(tr, te)
            });
            ModelRow {
                label: k.to_string(),
                config: format!("L={window_len}, K={k}"),
                outcome: res.and_then(|f| evaluate(te, &f, secs)).map_err(|e| e.to_string()),
            }
        })
        .collect();
    let sweep = DegreeSweep {
        dataset: series.name().to_string(),
        window_len,
        rows,
    };
    let dir = &config.output_dir;
    create_dir(dir).stage("write outputs")?;
    write_file(&dir.join(SWEEP_FILE), &sweep.to_csv()).stage("write outputs")?;
    Ok(sweep)
}

pub fn pc_label(m: &PolyModel) -> String {
    format!("L={}, K={}", m.window_len(), m.degree())
}

pub fn hybrid_label(m: &HybridModel) -> String {
    format!("{} + {}, omega={:.4}", m.arima.order, pc_label(&m.pc), m.omega)
}

fn split(series: &TimeSeries, fraction: f64) -> Result<(TimeSeries, TimeSeries)> {
    let (train, test) = train_test_split(series, fraction)?;
    if train.len() < MIN_TRAIN_LEN {
        return Err(CliError::Config(format!(
            "training part has {} observations, at least {MIN_TRAIN_LEN} are required",
            train.len()
        )));
    }
    info!(
        "split {} observations into {} train / {} test",
        series.len(),
        train.len(),
        test.len()
    );
    Ok((train, test))
}

fn timed<T>(f: impl FnOnce() -> std::result::Result<T, ForecastError>) -> (f64, std::result::Result<T, ForecastError>) {
    let start = Instant::now();
    let out = f();
    (start.elapsed().as_secs_f64(), out)
}

fn write_compare_outputs(dir: &Path, table: &ComparisonTable, forecasts: &ForecastSet) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let files = [dir.join(COMPARISON_FILE), dir.join(FORECASTS_FILE), dir.join(PLOT_FILE)];
    write_file(&files[0], &table.to_csv())?;
    write_file(&files[1], &forecasts.to_csv())?;
    let title = format!("{}: one-step forecasts on the test set", table.dataset);
    emit_plot(&files[2], &title, &forecasts.observed, &forecasts.named())?;
    Ok(files.to_vec())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn metric_cells(outcome: &std::result::Result<MetricsReport, String>) -> [String; 4] {
    match outcome {
        Ok(m) => [m.wall_seconds, m.mae, m.rmse, m.cv_rmse_percent].map(|v| format!("{v:.4}")),
        Err(_) => std::array::from_fn(|_| "error".to_string()),
    }
}

fn status(outcome: &std::result::Result<MetricsReport, String>) -> String {
    match outcome {
        Ok(_) => "ok".to_string(),
        Err(e) => format!("failed: {e}"),
    }
}

fn render_text(first: &[&str], rows: &[ModelRow]) -> String {
    let header: Vec<String> = first
        .iter()
        .copied()
        .chain(METRIC_COLUMNS)
        .chain(["Config", "Status"])
        .map(str::to_string)
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![r.label.clone()];
            cells.extend(metric_cells(&r.outcome));
            cells.push(r.config.clone());
            cells.push(status(&r.outcome));
            cells
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            body.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for line in std::iter::once(&header).chain(&body) {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, w))| {
                // Text columns left-aligned, metrics right-aligned.
                if c == 0 || c > METRIC_COLUMNS.len() {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

fn render_csv(first: &str, rows: &[ModelRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once(first)
        .chain(METRIC_COLUMNS)
        .chain(["Config", "Status"])
        .collect();
    // Writing to memory cannot fail.
    writer.write_record(&header).expect("in-memory CSV");
    for r in rows {
        let mut cells = vec![r.label.clone()];
        cells.extend(metric_cells(&r.outcome));
        cells.push(r.config.clone());
        cells.push(status(&r.outcome));
        writer.write_record(&cells).expect("in-memory CSV");
    }
    String::from_utf8(writer.into_inner().expect("in-memory CSV")).expect("UTF-8 CSV")
}
