//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Every tolerance and budget is pinned below. Oracles are written out here
//! independently of the library code they check.

use std::process::ExitCode;
use std::time::Instant;

use hybridcast::arima::ArimaOrder;
use hybridcast::linalg::{solve_least_squares, DenseMatrix};
use hybridcast::{
    build_basis, difference, fit_arima, fit_hybrid, fit_pc, integrate, optimal_omega, synth_dataset, ArimaSpec,
    HybridConfig, HybridModel, MetricsReport, OmegaMode, PcSpec, SynthKind,
};
use hybridcast_cli::{run_compare, CompareOutcome, DataSource, ExperimentConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tempfile::TempDir;

const ROUND_TRIP_REL: f64 = 1e-9;
const ROUND_TRIP_BUDGET_S: f64 = 1.0;
const NORMAL_EQ_REL: f64 = 1e-8;
const EXACT_FIT_TOL: f64 = 1e-6;
const OMEGA_GRID_TOL: f64 = 1e-4;
const OMEGA_GRID_POINTS: usize = 10_001;
const OPTIMALITY_REL: f64 = 1e-9;
const CONVEXITY_ABS: f64 = 1e-9;
const AR_TOL: f64 = 0.1;
const MA_TOL: f64 = 0.15;
const CSS_GRID_SLACK: f64 = 1e-6;
const RECOVERY_BUDGET_S: f64 = 10.0;
const MAE_WANT: f64 = 1.0;
const RMSE_WANT: f64 = 1.290994;
const RMSE_TOL: f64 = 1e-6;
const CV_WANT: f64 = 32.2749;
const CV_TOL: f64 = 1e-3;
const METRIC_EXACT_TOL: f64 = 1e-12;
const SWEEP_SEEDS: u64 = 10;
const SWEEP_LEN: usize = 2000;
const MIN_HYBRID_WINS: usize = 6;
const COMPARE_BUDGET_S: f64 = 60.0;

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(&mut *rng)).collect()
}

fn rmse_of(obs: &[f64], pred: &[f64]) -> f64 {
    (obs.iter().zip(pred).map(|(o, p)| (o - p).powi(2)).sum::<f64>() / obs.len() as f64).sqrt()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(50..=500);
        let scale = 10f64.powi(rng.random_range(-2..=4));
        let s: Vec<f64> = gaussian(&mut rng, n).iter().map(|v| v * scale).collect();
        let max_abs = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for d in [1, 2] {
            let back = integrate(&difference(&s, d).unwrap()).unwrap();
            let err = back.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / max_abs;
            worst = worst.max(if back.len() == s.len() { err } else { f64::INFINITY });
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        id: 1,
        name: "differencing round trip",
        pass: worst <= ROUND_TRIP_REL && secs < ROUND_TRIP_BUDGET_S,
        detail: format!("max relative error {worst:.2e}, {secs:.3} s"),
    }
}

fn criterion_2() -> Verdict {
    let basis = build_basis(2, 2).unwrap();
    let (t1, t2) = (3.0, 5.0);
    let got = basis.expand(&[t1, t2]).unwrap();
    let want = vec![1.0, t1, t2, t1 * t1, t1 * t2, t2 * t2];
    let exps: Vec<Vec<u32>> = basis.exponents().to_vec();
    let want_exps = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]];
    Verdict {
        id: 2,
        name: "two-lag quadratic expansion order",
        pass: got == want && exps == want_exps,
        detail: format!("expand([3, 5]) = {got:?}"),
    }
}

/// Gaussian elimination with partial pivoting on `(MᵀM) w = Mᵀt`.
fn normal_equations_oracle(m: &[Vec<f64>], t: &[f64]) -> Vec<f64> {
    let cols = m[0].len();
    let mut a = vec![vec![0.0; cols + 1]; cols];
    for i in 0..cols {
        for j in 0..cols {
            a[i][j] = m.iter().map(|r| r[i] * r[j]).sum();
        }
        a[i][cols] = m.iter().zip(t).map(|(r, y)| r[i] * y).sum();
    }
    for k in 0..cols {
        let piv = (k..cols)
            .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
            .unwrap();
        a.swap(k, piv);
        let pivot = a[k].clone();
        for row in &mut a[k + 1..] {
            let f = row[k] / pivot[k];
            for (x, p) in row[k..].iter_mut().zip(&pivot[k..]) {
                *x -= f * p;
            }
        }
    }
    let mut w = vec![0.0; cols];
    for i in (0..cols).rev() {
        let s: f64 = (i + 1..cols).map(|j| a[i][j] * w[j]).sum();
        w[i] = (a[i][cols] - s) / a[i][i];
    }
    w
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.random_range(1..=10usize);
        let n = rng.random_range(m..=4 * m);
        // Gaussian entries plus a dominant leading diagonal keep every system well-conditioned.
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|r| {
                let mut row = gaussian(&mut rng, m);
                if r < m {
                    row[r] += 4.0;
                }
                row
            })
            .collect();
        let t = gaussian(&mut rng, n);
        let oracle = normal_equations_oracle(&rows, &t);
        let (w, _) = solve_least_squares(&DenseMatrix::from_rows(&rows).unwrap(), &t).unwrap();
        let num = w.iter().zip(&oracle).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den = oracle.iter().map(|b| b * b).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        worst = worst.max(num / den);
    }
    Verdict {
        id: 3,
        name: "least squares vs normal-equations oracle",
        pass: worst <= NORMAL_EQ_REL,
        detail: format!("100 systems, max relative difference {worst:.2e}"),
    }
}

fn criterion_4() -> Verdict {
    let series: Vec<f64> = (0..40).map(|i| 1.0 + 3.0 * i as f64).collect();
    let (train, test) = series.split_at(30);
    let model = fit_pc(train, 2, 1).unwrap();
    let fitted: Vec<f64> = (2..train.len())
        .map(|e| model.forecast(&train[e - 2..e]).unwrap())
        .collect();
    let train_rmse = rmse_of(&train[2..], &fitted);
    let forecasts = model.rolling_forecast(train, test).unwrap();
    let worst = forecasts
        .iter()
        .zip(test)
        .map(|(f, y)| (f - y).abs())
        .fold(0.0, f64::max);
    Verdict {
        id: 4,
        name: "PC exact fit on an arithmetic progression",
        pass: train_rmse <= EXACT_FIT_TOL && worst <= EXACT_FIT_TOL,
        detail: format!("train RMSE {train_rmse:.2e}, max test error {worst:.2e}"),
    }
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let y = gaussian(&mut rng, 20);
        let a = gaussian(&mut rng, 20);
        let p = gaussian(&mut rng, 20);
        let analytic = optimal_omega(&y, &a, &p).unwrap().omega;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..OMEGA_GRID_POINTS {
            let w = i as f64 / (OMEGA_GRID_POINTS - 1) as f64;
            let sse: f64 = (0..20).map(|k| (y[k] - w * a[k] - (1.0 - w) * p[k]).powi(2)).sum();
            if sse < best.1 {
                best = (w, sse);
            }
        }
        worst = worst.max((analytic - best.0).abs());
    }
    Verdict {
        id: 5,
        name: "analytic blend weight vs grid scan",
        pass: worst <= OMEGA_GRID_TOL,
        detail: format!("50 triples, max |difference| {worst:.2e}"),
    }
}

fn blend_mse(obs: &[f64], a: &[f64], p: &[f64], w: f64) -> f64 {
    obs.iter()
        .zip(a.iter().zip(p))
        .map(|(y, (a, p))| (y - (w * a + (1.0 - w) * p)).powi(2))
        .sum::<f64>()
        / obs.len() as f64
}

fn criterion_6(hybrids: &[HybridModel]) -> Verdict {
    let mut checked = 0;
    let mut failures = 0;
    for h in hybrids {
        let Some(win) = &h.omega_window else { continue };
        let at = blend_mse(&win.observed, &win.arima, &win.pc, h.omega);
        let ends =
            blend_mse(&win.observed, &win.arima, &win.pc, 0.0).min(blend_mse(&win.observed, &win.arima, &win.pc, 1.0));
        checked += 1;
        if at > ends + OPTIMALITY_REL * ends.max(f64::MIN_POSITIVE) {
            failures += 1;
        }
    }
    Verdict {
        id: 6,
        name: "blend weight beats both endpoints on its window",
        pass: failures == 0 && checked > 0,
        detail: format!("{checked} fitted hybrids, {failures} violations"),
    }
}

fn row_metrics(outcome: &CompareOutcome, model: &str) -> Option<MetricsReport> {
    outcome.table.row(model)?.outcome.as_ref().ok().copied()
}

fn criterion_7(runs: &[CompareOutcome]) -> Verdict {
    let mut checked = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for run in runs {
        let (Some(a), Some(p), Some(h)) = (
            row_metrics(run, "ARIMA"),
            row_metrics(run, "PC"),
            row_metrics(run, "Hybrid"),
        ) else {
            continue;
        };
        checked += 1;
        worst_gap = worst_gap.max(h.rmse - a.rmse.max(p.rmse));
    }
    Verdict {
        id: 7,
        name: "hybrid RMSE never exceeds the worse component",
        pass: checked == runs.len() && worst_gap <= CONVEXITY_ABS,
        detail: format!("{checked}/{} runs, max(hybrid - worse) {worst_gap:.3e}", runs.len()),
    }
}

/// Minimum CSS over a 0.01-step grid on the single coefficient of an AR(1)
/// (`ar`) or MA(1) model with an intercept profiled out in closed form.
fn css_grid_min(w: &[f64], ar: bool) -> f64 {
    let residuals = |w: &[f64], v: f64, c: f64| {
        let start = usize::from(ar);
        let mut e = vec![0.0; w.len()];
        for t in start..w.len() {
            let lag = if ar {
                v * w[t - 1]
            } else if t > 0 {
                -v * e[t - 1]
            } else {
                0.0
            };
            e[t] = w[t] - c - lag;
        }
        e
    };
    let zeros = vec![0.0; w.len()];
    (-99..=99)
        .map(|k| {
            let v = k as f64 / 100.0;
            let e0 = residuals(w, v, 0.0);
            let g = residuals(&zeros, v, -1.0);
            let c = e0.iter().zip(&g).map(|(x, y)| x * y).sum::<f64>() / g.iter().map(|y| y * y).sum::<f64>();
            e0.iter().zip(&g).map(|(x, y)| (x - c * y).powi(2)).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let e = gaussian(&mut rng, 1200);
    let mut x = 0.0;
    let ar: Vec<f64> = e
        .iter()
        .map(|v| {
            x = 0.7 * x + v;
            x
        })
        .skip(200)
        .collect();
    let e = gaussian(&mut rng, 1001);
    let ma: Vec<f64> = (1..=1000).map(|t| e[t] - 0.5 * e[t - 1]).collect();

    let ar_fit = fit_arima(&ar, ArimaOrder::new(1, 0, 0).unwrap()).unwrap();
    let ma_fit = fit_arima(&ma, ArimaOrder::new(0, 0, 1).unwrap()).unwrap();
    let (ar_grid, ma_grid) = (css_grid_min(&ar, true), css_grid_min(&ma, false));
    let secs = start.elapsed().as_secs_f64();
    let (phi, theta) = (ar_fit.phi[0], ma_fit.theta[0]);
    Verdict {
        id: 8,
        name: "ARIMA coefficient recovery",
        pass: (phi - 0.7).abs() <= AR_TOL
            && (theta - 0.5).abs() <= MA_TOL
            && ar_fit.sse <= ar_grid + CSS_GRID_SLACK
            && ma_fit.sse <= ma_grid + CSS_GRID_SLACK
            && secs < RECOVERY_BUDGET_S,
        detail: format!(
            "phi {phi:.4}, theta {theta:.4}, SSE minus grid min {:.2e} / {:.2e}, {secs:.2} s",
            ar_fit.sse - ar_grid,
            ma_fit.sse - ma_grid
        ),
    }
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let order = ArimaOrder::new(0, 1, 0).unwrap();
    let mut mismatches = 0;
    let mut total = 0;
    for k in 0..20 {
        let scale = 10f64.powi(k % 6 - 2);
        let s: Vec<f64> = gaussian(&mut rng, 120)
            .iter()
            .map(|v| v * scale + 3.0 * k as f64)
            .collect();
        let (train, test) = s.split_at(90);
        let model = fit_arima(train, order).unwrap();
        let f = model.rolling_forecast(train, test).unwrap();
        mismatches += usize::from(model.intercept != 0.0);
        for (i, fi) in f.iter().enumerate() {
            total += 1;
            if fi.to_bits() != s[89 + i].to_bits() {
                mismatches += 1;
            }
        }
    }
    Verdict {
        id: 9,
        name: "random-walk forecasts repeat the last observation",
        pass: mismatches == 0,
        detail: format!("{total} forecasts, {mismatches} mismatches"),
    }
}

fn criterion_10() -> Verdict {
    let m = hybridcast::evaluate(&[2.0, 4.0, 6.0], &[1.0, 4.0, 8.0], 0.0).unwrap();
    Verdict {
        id: 10,
        name: "metric hand values",
        pass: (m.mae - MAE_WANT).abs() <= METRIC_EXACT_TOL
            && (m.rmse - RMSE_WANT).abs() <= RMSE_TOL
            && (m.cv_rmse_percent - CV_WANT).abs() <= CV_TOL,
        detail: format!(
            "MAE {:.6}, RMSE {:.6}, CV(RMSE) {:.4}%",
            m.mae, m.rmse, m.cv_rmse_percent
        ),
    }
}

fn compare(kind: SynthKind, length: usize, seed: u64, mode: OmegaMode) -> (CompareOutcome, f64, TempDir) {
    let dir = TempDir::new().unwrap();
    let mut config = ExperimentConfig::new(DataSource::Synthetic { kind, length }, dir.path());
    config.seed = seed;
    config.omega_mode = mode;
    let start = Instant::now();
    let out = run_compare(&config).unwrap();
    (out, start.elapsed().as_secs_f64(), dir)
}

fn criterion_11(runs: &[CompareOutcome]) -> Verdict {
    let mut wins = 0;
    let mut bounded = 0;
    for run in runs {
        if let (Some(a), Some(p), Some(h)) = (
            row_metrics(run, "ARIMA"),
            row_metrics(run, "PC"),
            row_metrics(run, "Hybrid"),
        ) {
            wins += usize::from(h.rmse < a.rmse.min(p.rmse));
            bounded += usize::from(h.rmse <= a.rmse.max(p.rmse) + CONVEXITY_ABS);
        }
    }
    Verdict {
        id: 11,
        name: "hybrid beats both components on trend-sine data",
        pass: wins >= MIN_HYBRID_WINS && bounded == runs.len(),
        detail: format!(
            "below min in {wins}/{}, below max in {bounded}/{}",
            runs.len(),
            runs.len()
        ),
    }
}

fn criterion_12(timings: &[(SynthKind, f64)]) -> Verdict {
    let worst = timings.iter().map(|t| t.1).fold(0.0, f64::max);
    let listed: Vec<String> = timings.iter().map(|(k, s)| format!("{k} {s:.2} s")).collect();
    Verdict {
        id: 12,
        name: "full compare on 2000 points within budget",
        pass: worst < COMPARE_BUDGET_S,
        detail: listed.join(", "),
    }
}

fn criterion_13() -> Verdict {
    let metrics = |o: &CompareOutcome| -> Vec<u64> {
        o.table
            .rows()
            .iter()
            .flat_map(|r| {
                let m = r.outcome.as_ref().unwrap();
                [m.mae.to_bits(), m.rmse.to_bits(), m.cv_rmse_percent.to_bits()]
            })
            .collect()
    };
    let mut same = true;
    for kind in SynthKind::ALL {
        let (a, _, da) = compare(kind, 500, 42, OmegaMode::ValidationTail);
        let (b, _, db) = compare(kind, 500, 42, OmegaMode::ValidationTail);
        let svg = |d: &TempDir| std::fs::read(d.path().join(hybridcast_cli::experiment::PLOT_FILE)).unwrap();
        let csv = |d: &TempDir| std::fs::read(d.path().join(hybridcast_cli::experiment::FORECASTS_FILE)).unwrap();
        same &= metrics(&a) == metrics(&b) && svg(&da) == svg(&db) && csv(&da) == csv(&db) && a.hybrid == b.hybrid;
    }
    Verdict {
        id: 13,
        name: "repeat runs are bit-identical",
        pass: same,
        detail: "metrics, fitted hybrids, forecast CSV and SVG bytes on four datasets".to_string(),
    }
}

fn main() -> ExitCode {
    let mut verdicts = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
    ];

    // Runs shared by the hybrid criteria.
    let sweep: Vec<CompareOutcome> = (0..SWEEP_SEEDS)
        .map(|seed| compare(SynthKind::TrendSine, SWEEP_LEN, seed, OmegaMode::ValidationTail).0)
        .collect();
    let mut timings = Vec::new();
    let mut corpus: Vec<CompareOutcome> = Vec::new();
    for kind in SynthKind::ALL {
        let (out, secs, _dir) = compare(kind, SWEEP_LEN, 42, OmegaMode::ValidationTail);
        timings.push((kind, secs));
        corpus.push(out);
        corpus.push(compare(kind, 600, 42, OmegaMode::InSample).0);
    }
    corpus.extend(sweep.iter().cloned());
    let mut hybrids: Vec<HybridModel> = corpus.iter().filter_map(|o| o.hybrid.clone()).collect();
    for kind in SynthKind::ALL {
        let s = synth_dataset(kind, 400, 7).unwrap();
        for mode in [OmegaMode::ValidationTail, OmegaMode::InSample] {
            let config = HybridConfig {
                arima: ArimaSpec::Auto,
                pc: PcSpec::Auto,
                omega_mode: mode,
                scale_inputs: false,
            };
            hybrids.push(fit_hybrid(s.values(), &config).unwrap());
        }
    }

    verdicts.push(criterion_6(&hybrids));
    verdicts.push(criterion_7(&corpus));
    verdicts.push(criterion_8());
    verdicts.push(criterion_9());
    verdicts.push(criterion_10());
    verdicts.push(criterion_11(&sweep));
    verdicts.push(criterion_12(&timings));
    verdicts.push(criterion_13());

    let mut failed = 0;
    for v in &verdicts {
        println!(
            "{} {:>2} {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
