//! Unit-circle checks for AR and MA lag polynomials.
//!
//! For a lag polynomial `1 − c₁z − … − c_pz^p` the roots lie outside the unit
//! circle exactly when the companion matrix of the recurrence
//! `x_t = c₁x_{t−1} + … + c_px_{t−p}` has spectral radius below one. That
//! radius is the largest root modulus of `z^p − c₁z^{p−1} − … − c_p`, found
//! here with Durand–Kerner iteration.

use num_complex::Complex64;

const MAX_ITER: usize = 500;
const ROOT_TOL: f64 = 1e-14;

/// Roots of the monic polynomial `z^p − c₁z^{p−1} − … − c_p`.
pub fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let p = coeffs.len();
    if p == 0 {
        return Vec::new();
    }
    // monic coefficients a_0 = 1, a_k = −c_k
    let monic: Vec<f64> = std::iter::once(1.0).chain(coeffs.iter().map(|c| -c)).collect();
    let eval = |z: Complex64| monic.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);

    let bound = 1.0 + coeffs.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..p).map(|k| seed.powu(k as u32) * (0.5 * bound)).collect();

    for _ in 0..MAX_ITER {
        let mut largest_step = 0.0_f64;
        for i in 0..p {
            let zi = roots[i];
            let denom = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &zj)| acc * (zi - zj));
            if denom.norm() == 0.0 {
                roots[i] += Complex64::new(1e-8, 1e-8);
                largest_step = f64::INFINITY;
                continue;
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            largest_step = largest_step.max(step.norm());
        }
        if largest_step <= ROOT_TOL * bound {
            break;
        }
    }
    roots
}

/// Spectral radius of the companion matrix; zero for an empty polynomial.
pub fn spectral_radius(coeffs: &[f64]) -> f64 {
    if coeffs.len() == 1 {
        return coeffs[0].abs();
    }
    companion_roots(coeffs).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// True when every root of `1 − Σ c_i z^i` lies strictly outside the unit circle.
pub fn is_stable(coeffs: &[f64]) -> bool {
    spectral_radius(coeffs) < 1.0
}
