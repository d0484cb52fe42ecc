//! Deterministic Nelder–Mead simplex minimizer.

/// Stopping and simplex-construction settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Offset added to each coordinate of the start point to build the simplex.
    pub initial_step: f64,
    /// Stop once `f_worst - f_best <= tolerance * max(1, |f_best|)`.
    pub tolerance: f64,
    /// Iteration budget per coordinate; the total budget is this times the dimension.
    pub iterations_per_dim: usize,
    /// Fresh simplices rebuilt around the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            tolerance: 1e-10,
            iterations_per_dim: 200,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `objective` starting from `start`.
///
/// Non-finite objective values are treated as `+inf`, so a penalty barrier
/// may return anything it likes outside the feasible region.
pub fn nelder_mead<F>(mut objective: F, start: &[f64], options: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if dim == 0 {
        let value = eval(start);
        return Minimum {
            point: Vec::new(),
            value,
            iterations: 0,
            evaluations,
            converged: true,
        };
    }

    let budget = options.iterations_per_dim * dim;
    let mut iterations = 0usize;
    let mut best_point = start.to_vec();
    let mut best_value = eval(start);
    let mut any_converged = false;

    for round in 0..=options.restarts {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((best_point.clone(), best_value));
        for i in 0..dim {
            let mut x = best_point.clone();
            x[i] += options.initial_step;
            let v = eval(&x);
            simplex.push((x, v));
        }

        let round_start_value = best_value;
        let mut converged = false;
        while iterations < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_best = simplex[0].1;
            let f_worst = simplex[dim].1;
            if f_worst - f_best <= options.tolerance * f_best.abs().max(1.0) {
                converged = true;
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; dim];
            for (x, _) in &simplex[..dim] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi;
                }
            }
            for c in centroid.iter_mut() {
                *c /= dim as f64;
            }
            let along = |t: f64, toward: &[f64]| -> Vec<f64> {
                centroid.iter().zip(toward).map(|(c, w)| c + t * (w - c)).collect()
            };

            let worst = simplex[dim].0.clone();
            let reflected = along(-REFLECT, &worst);
            let f_reflected = eval(&reflected);
            let f_second_worst = simplex[dim - 1].1;

            if f_reflected < f_best {
                let expanded = along(-REFLECT * EXPAND, &worst);
                let f_expanded = eval(&expanded);
                simplex[dim] = if f_expanded < f_reflected {
                    (expanded, f_expanded)
                } else {
                    (reflected, f_reflected)
                };
                continue;
            }
            if f_reflected < f_second_worst {
                simplex[dim] = (reflected, f_reflected);
                continue;
            }

            let (contracted, f_contracted, accept) = if f_reflected < f_worst {
                let x = along(-REFLECT * CONTRACT, &worst);
                let f = eval(&x);
                let ok = f <= f_reflected;
                (x, f, ok)
            } else {
                let x = along(CONTRACT, &worst);
                let f = eval(&x);
                let ok = f < f_worst;
                (x, f, ok)
            };
            if accept {
                simplex[dim] = (contracted, f_contracted);
                continue;
            }

            let anchor = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, ai) in x.iter_mut().zip(&anchor) {
                    *xi = ai + SHRINK * (*xi - ai);
                }
                *v = eval(x);
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 <= best_value {
            best_point = simplex[0].0.clone();
            best_value = simplex[0].1;
        }
        any_converged |= converged;
        let improved = round_start_value - best_value > options.tolerance * best_value.abs().max(1.0);
        if !converged || (round > 0 && !improved) {
            break;
        }
    }

    Minimum {
        point: best_point,
        value: best_value,
        iterations,
        evaluations,
        converged: any_converged,
    }
}
