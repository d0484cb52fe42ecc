use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hybridcast::{synth_dataset, ArimaSpec, OmegaMode, PcSpec, SynthKind};
use hybridcast_cli::config::{DEFAULT_SEED, DEFAULT_SYNTH_LEN, DEFAULT_TRAIN_FRACTION};
use hybridcast_cli::experiment::{fit_hybrid_model, hybrid_label, pc_label};
use hybridcast_cli::{
    parse_arima_spec, parse_omega_mode, parse_pc_spec, run_compare, run_degree_sweep, ColumnRef, DataSource,
    ExperimentConfig, DATASET_HELP,
};

#[derive(Parser)]
#[command(
    name = "hybridcast",
    version,
    about = "ARIMA, polynomial-classifier and hybrid forecasting benchmarks"
)]
struct Cli {
    /// Describe the reference datasets and their expected columns, then exit.
    #[arg(long)]
    dataset_help: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Compare ARIMA, PC and the hybrid on a chronological train/test split.
    Compare {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Test metrics of the polynomial classifier for degrees 1 to 3.
    SweepDegree {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Fit all models on the full series and print their parameters.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Fit on the full series and print each model's next-step forecast.
    Forecast {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Write a synthetic series as CSV (columns index,value).
    Synth {
        /// ar1, trend-sine, random-walk or quadratic.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = DEFAULT_SYNTH_LEN)]
        length: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long, conflicts_with = "synth")]
    data: Option<PathBuf>,
    /// Value column, by header name or zero-based index.
    #[arg(long)]
    column: Option<String>,
    /// Optional column of time labels carried through for reporting.
    #[arg(long)]
    label_column: Option<String>,
    /// Use a generated series instead of a file: ar1, trend-sine, random-walk or quadratic.
    #[arg(long)]
    synth: Option<String>,
    /// Length of the generated series.
    #[arg(long, default_value_t = DEFAULT_SYNTH_LEN)]
    length: usize,
    /// Seed for generated series.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct ModelArgs {
    /// Fraction of observations used for training.
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    split: f64,
    /// `auto` or `p,d,q`.
    #[arg(long, default_value = "auto")]
    arima: String,
    /// `auto` or `L,K` (window length, polynomial degree).
    #[arg(long, default_value = "auto")]
    pc: String,
    /// Where the blend weight is estimated: validation-tail or in-sample.
    #[arg(long, default_value = "validation-tail")]
    omega_mode: String,
    /// Fixed blend weight in [0, 1] instead of the fitted one.
    #[arg(long)]
    omega: Option<f64>,
    /// Min-max scale inputs of the polynomial classifier.
    #[arg(long)]
    scale_inputs: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn build_config(data: DataArgs, model: ModelArgs) -> anyhow::Result<ExperimentConfig> {
    let source = match (data.data, data.synth) {
        (Some(path), None) => {
            let Some(column) = data.column else {
                bail!("--column is required with --data");
            };
            DataSource::Csv {
                path,
                value_column: ColumnRef(column),
                label_column: data.label_column.map(ColumnRef),
            }
        }
        (None, Some(kind)) => DataSource::Synthetic {
            kind: kind.parse::<SynthKind>()?,
            length: data.length,
        },
        _ => bail!("pass either --data FILE or --synth KIND"),
    };
    let arima: ArimaSpec = parse_arima_spec(&model.arima)?;
    let pc: PcSpec = parse_pc_spec(&model.pc)?;
    let omega_mode: OmegaMode = parse_omega_mode(&model.omega_mode)?;
    let mut config = ExperimentConfig::new(source, model.out);
    config.train_fraction = model.split;
    config.arima = arima;
    config.pc = pc;
    config.omega_mode = omega_mode;
    config.omega_override = model.omega;
    config.scale_inputs = model.scale_inputs;
    config.seed = data.seed;
    config.validate()?;
    Ok(config)
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Compare { data, model } => {
            let config = build_config(data, model).context("configuration")?;
            let outcome = run_compare(&config)?;
            print!("{}", outcome.table.to_text());
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
        }
        Command::SweepDegree { data, model } => {
            let config = build_config(data, model).context("configuration")?;
            let sweep = run_degree_sweep(&config)?;
            print!("{}", sweep.to_text());
        }
        Command::Fit { data, model } => {
            let config = build_config(data, model).context("configuration")?;
            let series = config.load_series().context("load data")?;
            let m = fit_hybrid_model(series.values(), &config).context("fit")?;
            println!("{}: {} observations", series.name(), series.len());
            println!(
                "ARIMA {}: phi {:?}, theta {:?}, intercept {:.6}, sigma2 {:.6}, AIC {:.4}",
                m.arima.order, m.arima.phi, m.arima.theta, m.arima.intercept, m.arima.sigma2, m.arima.aic
            );
            println!(
                "PC {}: {} weights, method {:?}, train SSE {:.6}",
                pc_label(&m.pc),
                m.pc.weights.len(),
                m.pc.solve_report.method,
                m.pc.train_sse
            );
            println!(
                "Hybrid {}{}",
                hybrid_label(&m),
                if m.degenerate { " (degenerate weight)" } else { "" }
            );
        }
        Command::Forecast { data, model } => {
            let config = build_config(data, model).context("configuration")?;
            let series = config.load_series().context("load data")?;
            let history = series.values();
            let m = fit_hybrid_model(history, &config).context("fit")?;
            let a = m.arima.forecast_next(history).context("forecast")?;
            let p =
                m.pc.forecast(&history[history.len() - m.pc.window_len()..])
                    .context("forecast")?;
            let h = m.forecast_next(history).context("forecast")?;
            println!("next value after index {}:", history.len() - 1);
            println!("ARIMA  {a:.4}");
            println!("PC     {p:.4}");
            println!("Hybrid {h:.4}");
        }
        Command::Synth {
            kind,
            length,
            seed,
            out,
        } => {
            let kind: SynthKind = kind.parse().context("configuration")?;
            let series = synth_dataset(kind, length, seed).context("generate")?;
            let mut csv = String::from("index,value\n");
            for (i, v) in series.values().iter().enumerate() {
                csv.push_str(&format!("{i},{v}\n"));
            }
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .with_context(|| format!("write outputs: cannot write {}", path.display()))?,
                None => std::io::stdout().write_all(csv.as_bytes()).context("write outputs")?,
            }
        }
    }
    Ok(())
}

/// Error chain joined by ": ", skipping causes whose text a parent already includes.
fn render_chain(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if out.contains(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.dataset_help {
        print!("{DATASET_HELP}");
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no subcommand given (try --help)");
        return ExitCode::from(2);
    };
    match run(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", render_chain(&e));
            ExitCode::FAILURE
        }
    }
}
