//! Small dense linear algebra: a row-major matrix, Householder-QR least
//! squares with a ridge fallback, and a pivoted LU solve for square systems.
//!
//! Problem sizes here are at most a few thousand rows by a few hundred
//! columns, so everything is plain `Vec<f64>` arithmetic.

use crate::error::{ForecastError, Result};

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(ForecastError::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(ForecastError::invalid(format!(
                "matrix entry ({}, {}) is not finite",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ForecastError::invalid("matrix rows have unequal lengths"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(ForecastError::invalid(format!(
                "cannot multiply {}x{} matrix by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), x)).collect())
    }

    /// `Mᵀ x` for `x` of length `rows`.
    pub fn transpose_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(ForecastError::invalid(format!(
                "cannot multiply transpose of {}x{} matrix by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o += m * xr;
            }
        }
        Ok(out)
    }

    /// Gram matrix `MᵀM` (cols x cols).
    pub fn gram(&self) -> DenseMatrix {
        let m = self.cols;
        let mut g = vec![0.0; m * m];
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..m {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..m {
                    g[i * m + j] += ri * row[j];
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                g[i * m + j] = g[j * m + i];
            }
        }
        DenseMatrix {
            rows: m,
            cols: m,
            data: g,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// How a least-squares system was finally solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Qr,
    Cholesky,
    RidgeFallback,
}

/// Which factorization to try first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeastSquaresStrategy {
    /// Householder QR on `M` itself.
    #[default]
    Qr,
    /// Cholesky on the normal equations `MᵀM w = Mᵀt`.
    NormalEquations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub method: SolveMethod,
    /// `‖Mw − t‖`
    pub residual_norm: f64,
    /// Zero unless `method == RidgeFallback`.
    pub ridge_lambda: f64,
}

/// Condition estimate above which a factorization is treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Ridge strength relative to the mean diagonal of `MᵀM`.
pub const RIDGE_SCALE: f64 = 1e-8;

/// Minimizes `‖Mw − t‖²` with Householder QR, falling back to ridge-regularized
/// normal equations when `M` is numerically rank deficient.
pub fn solve_least_squares(m: &DenseMatrix, t: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    solve_least_squares_with(m, t, LeastSquaresStrategy::Qr)
}

pub fn solve_least_squares_with(
    m: &DenseMatrix,
    t: &[f64],
    strategy: LeastSquaresStrategy,
) -> Result<(Vec<f64>, SolveReport)> {
    if m.rows == 0 || m.cols == 0 {
        return Err(ForecastError::invalid(format!(
            "least squares needs a non-empty matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if t.len() != m.rows {
        return Err(ForecastError::invalid(format!(
            "target length {} does not match {} matrix rows",
            t.len(),
            m.rows
        )));
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(ForecastError::invalid("least-squares target has non-finite entries"));
    }

    let direct = if m.rows < m.cols {
        None
    } else {
        match strategy {
            LeastSquaresStrategy::Qr => householder_solve(m, t).map(|w| (w, SolveMethod::Qr)),
            LeastSquaresStrategy::NormalEquations => {
                let g = m.gram();
                let rhs = m.transpose_vec(t)?;
                cholesky_solve(&g, &rhs).map(|w| (w, SolveMethod::Cholesky))
            }
        }
    };

    let (w, method, lambda) = match direct {
        Some((w, method)) if w.iter().all(|v| v.is_finite()) => (w, method, 0.0),
        _ => {
            let (w, lambda) = ridge_solve(m, t)?;
            (w, SolveMethod::RidgeFallback, lambda)
        }
    };

    let fitted = m.mat_vec(&w)?;
    let residual: Vec<f64> = fitted.iter().zip(t).map(|(f, y)| f - y).collect();
    Ok((
        w,
        SolveReport {
            method,
            residual_norm: norm(&residual),
            ridge_lambda: lambda,
        },
    ))
}

/// QR least squares; `None` when the diagonal-ratio condition estimate of R
/// exceeds [`CONDITION_LIMIT`].
fn householder_solve(m: &DenseMatrix, t: &[f64]) -> Option<Vec<f64>> {
    let (n, p) = (m.rows, m.cols);
    // column-major working copy so reflector updates walk contiguous memory
    let mut a: Vec<Vec<f64>> = (0..p).map(|c| (0..n).map(|r| m.get(r, c)).collect()).collect();
    let mut rhs = t.to_vec();
    let mut diag = vec![0.0; p];

    for k in 0..p {
        let col = &a[k];
        let alpha = norm(&col[k..]);
        if alpha == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let sign = if col[k] >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = col[k..].to_vec();
        v[0] += sign * alpha;
        let vnorm2 = dot(&v, &v);
        diag[k] = -sign * alpha;

        for column in &mut a[k..p] {
            let s = 2.0 * dot(&v, &column[k..]) / vnorm2;
            for (x, vi) in column[k..].iter_mut().zip(&v) {
                *x -= s * vi;
            }
        }
        let s = 2.0 * dot(&v, &rhs[k..]) / vnorm2;
        for (x, vi) in rhs[k..].iter_mut().zip(&v) {
            *x -= s * vi;
        }
    }

    let max_d = diag.iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    let min_d = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
    if min_d == 0.0 || max_d / min_d > CONDITION_LIMIT {
        return None;
    }

    let mut w = vec![0.0; p];
    for i in (0..p).rev() {
        let mut acc = rhs[i];
        for j in i + 1..p {
            acc -= a[j][i] * w[j];
        }
        w[i] = acc / a[i][i];
    }
    Some(w)
}

/// Ridge-regularized normal equations followed by a few steps of iterative
/// refinement on the same regularized factor. The refinement drives the
/// residual to the least-squares optimum along well-determined directions
/// while leaving the null space damped.
fn ridge_solve(m: &DenseMatrix, t: &[f64]) -> Result<(Vec<f64>, f64)> {
    let mut g = m.gram();
    let rhs = m.transpose_vec(t)?;
    let p = m.cols;
    let trace: f64 = (0..p).map(|i| g.get(i, i)).sum();
    let mut lambda = RIDGE_SCALE * trace / p as f64;
    if lambda <= 0.0 {
        lambda = RIDGE_SCALE;
    }
    for i in 0..p {
        g.data[i * p + i] += lambda;
    }
    let mut factor = Cholesky::factor(&g);
    // extreme column scaling can defeat the nominal lambda; strengthen it
    for _ in 0..8 {
        if factor.is_some() {
            break;
        }
        let bump = lambda * 9.0;
        for i in 0..p {
            g.data[i * p + i] += bump;
        }
        lambda += bump;
        factor = Cholesky::factor(&g);
    }
    let Some(factor) = factor else {
        return Err(ForecastError::SingularMatrix(
            "ridge-regularized normal equations could not be factorized".into(),
        ));
    };

    let mut w = factor.solve(&rhs);
    let residual_sq = |w: &[f64]| -> Result<f64> {
        let fitted = m.mat_vec(w)?;
        Ok(fitted.iter().zip(t).map(|(f, y)| (y - f) * (y - f)).sum())
    };
    let mut current = residual_sq(&w)?;
    for _ in 0..REFINEMENT_STEPS {
        let fitted = m.mat_vec(&w)?;
        let r: Vec<f64> = t.iter().zip(&fitted).map(|(y, f)| y - f).collect();
        let delta = factor.solve(&m.transpose_vec(&r)?);
        let candidate: Vec<f64> = w.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let next = residual_sq(&candidate)?;
        if next.is_nan() || next >= current || candidate.iter().any(|v| !v.is_finite()) {
            break;
        }
        w = candidate;
        current = next;
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(ForecastError::SingularMatrix("ridge solution is not finite".into()));
    }
    Ok((w, lambda))
}

/// Refinement passes applied after the ridge solve.
const REFINEMENT_STEPS: usize = 5;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    fn factor(a: &DenseMatrix) -> Option<Self> {
        let n = a.rows;
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(Self { n, l })
    }

    /// Squared ratio of extreme diagonal entries, comparable to R's estimate.
    fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let max_d = (0..n).fold(0.0_f64, |acc, i| acc.max(self.l[i * n + i]));
        let min_d = (0..n).fold(f64::INFINITY, |acc, i| acc.min(self.l[i * n + i]));
        (max_d / min_d).powi(2)
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, l) = (self.n, &self.l);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
            y[i] = (b[i] - s) / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
            x[i] = (y[i] - s) / l[i * n + i];
        }
        x
    }
}

/// Normal-equations solve; `None` if the factorization fails or the
/// condition estimate exceeds the limit.
fn cholesky_solve(a: &DenseMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let factor = Cholesky::factor(a)?;
    if factor.condition_estimate() > CONDITION_LIMIT {
        return None;
    }
    Some(factor.solve(b))
}

/// Solves a square system by LU with partial pivoting.
pub fn solve_linear_system(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    if n == 0 || a.cols != n {
        return Err(ForecastError::invalid(format!(
            "linear solve needs a non-empty square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if b.len() != n {
        return Err(ForecastError::invalid(format!(
            "right-hand side length {} does not match order {n}",
            b.len()
        )));
    }
    let mut lu = a.data.clone();
    let mut x = b.to_vec();
    let scale = lu.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tiny = n as f64 * f64::EPSILON * scale;

    for k in 0..n {
        let (pivot_row, pivot) =
            (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= tiny || pivot == 0.0 {
            return Err(ForecastError::SingularMatrix(format!("pivot {k} of {n} vanishes")));
        }
        if pivot_row != k {
            for c in 0..n {
                lu.swap(k * n + c, pivot_row * n + c);
            }
            x.swap(k, pivot_row);
        }
        let d = lu[k * n + k];
        for r in k + 1..n {
            let f = lu[r * n + k] / d;
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                lu[r * n + c] -= f * lu[k * n + c];
            }
            x[r] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|c| lu[i * n + c] * x[c]).sum();
        x[i] = (x[i] - s) / lu[i * n + i];
    }
    Ok(x)
}
