#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `x_t = phi x_{t-1} + e_t` after a 200-step burn-in.
pub fn simulate_ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = gaussian(n + 200, seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for (t, et) in e.iter().enumerate() {
        x = phi * x + et;
        if t >= 200 {
            out.push(x);
        }
    }
    out
}

/// `x_t = e_t − theta e_{t−1}`.
pub fn simulate_ma1(theta: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = gaussian(n + 1, seed);
    (1..=n).map(|t| e[t] - theta * e[t - 1]).collect()
}

/// `x_t = phi x_{t−1} + e_t − theta e_{t−1}` after burn-in.
pub fn simulate_arma11(phi: f64, theta: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = gaussian(n + 201, seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 1..e.len() {
        x = phi * x + e[t] - theta * e[t - 1];
        if t > 200 {
            out.push(x);
        }
    }
    out
}

/// Gaussian elimination with partial pivoting on the explicit normal
/// equations `(MᵀM) w = Mᵀt`; `m` is row-major `rows x cols`.
pub fn normal_equations_oracle(m: &[f64], rows: usize, cols: usize, t: &[f64]) -> Vec<f64> {
    let mut a = vec![vec![0.0; cols + 1]; cols];
    for i in 0..cols {
        for j in 0..cols {
            a[i][j] = (0..rows).map(|r| m[r * cols + i] * m[r * cols + j]).sum();
        }
        a[i][cols] = (0..rows).map(|r| m[r * cols + i] * t[r]).sum();
    }
    for k in 0..cols {
        let piv = (k..cols)
            .max_by(|&x, &y| a[x][k].abs().partial_cmp(&a[y][k].abs()).unwrap())
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
