mod common;

use common::{gaussian, simulate_ar1, simulate_arma11, simulate_ma1};
use hybridcast::arima::{css_objective, fit_arima, ArimaModel, ArimaOrder};
use hybridcast::{auto_order, difference};

const GRID_SLACK: f64 = 1e-6;

/// Residuals of `w_t = c + a w_{t−1} + e_t − b e_{t−1}` with `e = 0` before the start.
fn oracle_residuals(w: &[f64], a: Option<f64>, b: Option<f64>, c: f64) -> Vec<f64> {
    let start = usize::from(a.is_some());
    let mut e = vec![0.0; w.len()];
    for t in start..w.len() {
        let ar = a.map_or(0.0, |a| a * w[t - 1]);
        let ma = match (b, t) {
            (Some(b), t) if t > 0 => b * e[t - 1],
            _ => 0.0,
        };
        e[t] = w[t] - c - ar + ma;
    }
    e
}

/// Minimum CSS over a 0.01-step grid on the single coefficient, with the
/// intercept (when present) profiled out in closed form.
fn grid_min(w: &[f64], ar: bool, with_intercept: bool) -> f64 {
    let mut best = f64::INFINITY;
    for k in -99..=99 {
        let v = k as f64 / 100.0;
        let (a, b) = if ar { (Some(v), None) } else { (None, Some(v)) };
        let e0 = oracle_residuals(w, a, b, 0.0);
        let sse = if with_intercept {
            // Residuals are affine in c: e(c) = e0 − c g.
            let zeros = vec![0.0; w.len()];
            let g: Vec<f64> = oracle_residuals(&zeros, a, b, -1.0);
            let gg: f64 = g.iter().map(|x| x * x).sum();
            let c = e0.iter().zip(&g).map(|(x, y)| x * y).sum::<f64>() / gg;
            e0.iter().zip(&g).map(|(x, y)| (x - c * y).powi(2)).sum()
        } else {
            e0.iter().map(|x| x * x).sum()
        };
        best = best.min(sse);
    }
    best
}

fn check_against_grid(series: &[f64], order: ArimaOrder) -> ArimaModel {
    let model = fit_arima(series, order).unwrap();
    let w = difference(series, order.d).unwrap().values;
    let oracle = grid_min(&w, order.p == 1, order.has_intercept());
    assert!(
        model.sse <= oracle + GRID_SLACK,
        "{order}: optimizer sse {} above grid minimum {}",
        model.sse,
        oracle
    );
    model
}

#[test]
fn oracle_residuals_match_library_objective() {
    let w = gaussian(200, 3);
    for (phi, theta, c) in [
        (vec![0.4], vec![], 0.3),
        (vec![], vec![-0.6], -1.2),
        (vec![0.2], vec![0.5], 0.0),
    ] {
        let (sse, res) = css_objective(&phi, &theta, c, &w).unwrap();
        let oracle = oracle_residuals(&w, phi.first().copied(), theta.first().copied(), c);
        let oracle_sse: f64 = oracle.iter().map(|x| x * x).sum();
        assert!((sse - oracle_sse).abs() <= 1e-9 * oracle_sse);
        assert_eq!(res.len(), oracle.len());
    }
}

#[test]
fn recovers_ar1() {
    let x = simulate_ar1(0.7, 1000, 42);
    let m = check_against_grid(&x, ArimaOrder::new(1, 0, 0).unwrap());
    assert!((m.phi[0] - 0.7).abs() <= 0.1, "phi {}", m.phi[0]);
}

#[test]
fn recovers_ma1() {
    let x = simulate_ma1(0.5, 1000, 42);
    let m = check_against_grid(&x, ArimaOrder::new(0, 0, 1).unwrap());
    assert!((m.theta[0] - 0.5).abs() <= 0.15, "theta {}", m.theta[0]);
}

#[test]
fn css_optimum_not_beaten_by_grid() {
    let orders = [(1, 0, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)];
    for seed in 0..20u64 {
        let (p, d, q) = orders[seed as usize % orders.len()];
        let coef = 0.8 * ((seed as f64 * 0.37).sin());
        let base = if p == 1 {
            simulate_ar1(coef, 300, 100 + seed)
        } else {
            simulate_ma1(coef, 300, 100 + seed)
        };
        let series: Vec<f64> = if d == 1 {
            base.iter()
                .scan(50.0, |acc, v| {
                    *acc += v;
                    Some(*acc)
                })
                .collect()
        } else {
            base
        };
        check_against_grid(&series, ArimaOrder::new(p, d, q).unwrap());
    }
}

#[test]
fn sse_matches_residuals_and_aic_formula() {
    let x = simulate_arma11(0.6, 0.3, 400, 9);
    let m = fit_arima(&x, ArimaOrder::new(1, 0, 1).unwrap()).unwrap();
    let sse: f64 = m.residuals.iter().map(|e| e * e).sum();
    assert!((m.sse - sse).abs() <= 1e-9 * sse);
    let n = m.n_effective as f64;
    let k = 1.0 + 1.0 + 1.0 + 1.0;
    assert!((m.aic - (n * (m.sse / n).ln() + 2.0 * k)).abs() <= 1e-9 * m.aic.abs().max(1.0));
    assert!(m.spectral_radius() < 1.0);
}

#[test]
fn auto_order_respects_aic_on_arma11() {
    let x = simulate_arma11(0.6, 0.3, 1500, 7);
    let auto = auto_order(&x, 5, 5).unwrap();
    assert_eq!(auto.order.d, 0);
    let truth = fit_arima(&x, ArimaOrder::new(1, 0, 1).unwrap()).unwrap();
    let null = fit_arima(&x, ArimaOrder::new(0, 0, 0).unwrap()).unwrap();
    assert!(auto.model.aic <= truth.aic + 1e-9);
    assert!(truth.aic <= null.aic);
}

#[test]
fn white_noise_selects_small_order() {
    let x = gaussian(500, 1);
    let auto = auto_order(&x, 5, 5).unwrap();
    assert_eq!(auto.order.d, 0);
    assert!(auto.order.p + auto.order.q <= 1, "{}", auto.order);
}

#[test]
fn auto_order_is_argmin_over_candidates() {
    for seed in 2..5u64 {
        let x = gaussian(300, seed);
        let auto = auto_order(&x, 3, 3).unwrap();
        let best = auto
            .candidates
            .iter()
            .filter_map(|c| c.aic.as_ref().ok().copied())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(auto.model.aic, best, "seed {seed}");
    }
}

#[test]
fn rolling_forecast_uses_only_past_values() {
    let x = simulate_ar1(0.5, 300, 5);
    let (train, test) = x.split_at(240);
    let m = fit_arima(train, ArimaOrder::new(1, 0, 1).unwrap()).unwrap();
    let full = m.rolling_forecast(train, test).unwrap();
    let mut perturbed = test.to_vec();
    perturbed[30] += 100.0;
    let other = m.rolling_forecast(train, &perturbed).unwrap();
    assert_eq!(full[..=30], other[..=30]);
    assert_ne!(full[31], other[31]);
}
