//! Gaussian-kernel ridge regression of signed-distance values.
//!
//! The kernel is `K(x, y) = exp(-d(x, y)^2 / (2 sigma^2))` under whichever
//! metric the caller supplies. Fitting solves `(K + m gamma I) c = b` through
//! a dense Cholesky factorization; the shifted matrix is strictly positive
//! definite for any `gamma > 0`, so the solve is well posed and the fit
//! enforces a relative residual of at most 1e-8.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Metric, Points};
use crate::error::{Result, SdfError};

/// Maximum allowed relative residual `|(K + m gamma I) c - b| / |b|` at fit
/// time.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Fitted kernel expansion `B(x) = sum_i c_i K(x_i, x)`. Support points are
/// stored by value so serialized models are self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelModelRepr", into = "KernelModelRepr")]
pub struct KernelModel {
    support: Points,
    coeffs: Vec<f64>,
    sigma: f64,
    gamma: f64,
    metric: Metric,
}

/// On-disk JSON shape:
/// {"sigma": ..., "gamma": ..., "metric": {...}, "support": [[...]], "coeffs": [...], "dim": n}.
#[derive(Serialize, Deserialize)]
struct KernelModelRepr {
    sigma: f64,
    gamma: f64,
    metric: Metric,
    support: Vec<Vec<f64>>,
    coeffs: Vec<f64>,
    dim: usize,
}

impl From<KernelModel> for KernelModelRepr {
    fn from(m: KernelModel) -> Self {
        KernelModelRepr {
            sigma: m.sigma,
            gamma: m.gamma,
            metric: m.metric.clone(),
            dim: m.support.dim(),
            support: m.support.to_nested(),
            coeffs: m.coeffs,
        }
    }
}

impl TryFrom<KernelModelRepr> for KernelModel {
    type Error = SdfError;

    fn try_from(r: KernelModelRepr) -> Result<Self> {
        let support = Points::from_rows(r.support)
            .map_err(|e| SdfError::InvalidModel(format!("bad support points: {e}")))?;
        if r.dim != support.dim() {
            return Err(SdfError::InvalidModel(format!(
                "dim field is {} but support points have {} features",
                r.dim,
                support.dim()
            )));
        }
        if r.coeffs.len() != support.n_points() {
            return Err(SdfError::InvalidModel(format!(
                "{} coefficients for {} support points",
                r.coeffs.len(),
                support.n_points()
            )));
        }
        if !r.coeffs.iter().all(|v| v.is_finite()) {
            return Err(SdfError::InvalidModel("coefficients must be finite".into()));
        }
        if !(r.sigma > 0.0 && r.sigma.is_finite()) || !(r.gamma > 0.0 && r.gamma.is_finite()) {
            return Err(SdfError::InvalidModel(
                "sigma and gamma must be positive and finite".into(),
            ));
        }
        if let Metric::Weighted { weights } = &r.metric {
            Metric::weighted(weights.clone())
                .map_err(|e| SdfError::InvalidModel(format!("bad metric: {e}")))?;
        }
        r.metric
            .ensure_dim(support.dim())
            .map_err(|e| SdfError::InvalidModel(format!("bad metric: {e}")))?;
        Ok(KernelModel {
            support,
            coeffs: r.coeffs,
            sigma: r.sigma,
            gamma: r.gamma,
            metric: r.metric,
        })
    }
}

impl KernelModel {
    pub fn support(&self) -> &Points {
        &self.support
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    /// Evaluate the kernel expansion at one point. The sign is the predicted
    /// class (zero counts as positive).
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.support.dim() {
            return Err(SdfError::DimensionMismatch {
                expected: self.support.dim(),
                got: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let scale = -0.5 / (self.sigma * self.sigma);
        self.coeffs
            .iter()
            .zip(self.support.rows())
            .map(|(c, xi)| c * (scale * self.metric.distance_sq_unchecked(xi, x)).exp())
            .sum()
    }

    /// Evaluate at every query point, in parallel over rows.
    pub fn predict_batch(&self, points: &Points) -> Result<Vec<f64>> {
        if points.dim() != self.support.dim() {
            return Err(SdfError::DimensionMismatch {
                expected: self.support.dim(),
                got: points.dim(),
            });
        }
        Ok((0..points.n_points())
            .into_par_iter()
            .map(|i| self.predict_unchecked(points.row(i)))
            .collect())
    }
}

fn check_kernel_params(sigma: f64, gamma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SdfError::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(SdfError::invalid(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

/// Gram matrix of the Gaussian kernel over the given points: symmetric with
/// a unit diagonal, entries in (0, 1]. Each unordered pair is computed once
/// and mirrored, so the output equals its transpose exactly.
pub fn gram(points: &Points, sigma: f64, metric: &Metric) -> Result<DMatrix<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SdfError::invalid(format!("sigma must be positive, got {sigma}")));
    }
    metric.ensure_dim(points.dim())?;
    let m = points.n_points();
    let scale = -0.5 / (sigma * sigma);

    // Row-parallel upper triangle into a flat row-major buffer.
    let mut data = vec![0.0; m * m];
    data.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        let xi = points.row(i);
        row[i] = 1.0;
        for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
            *slot = (scale * metric.distance_sq_unchecked(xi, points.row(j))).exp();
        }
    });
    for i in 0..m {
        for j in i + 1..m {
            data[j * m + i] = data[i * m + j];
        }
    }
    // Symmetric, so the column-major interpretation is the same matrix.
    Ok(DMatrix::from_vec(m, m, data))
}

/// In-place lower Cholesky factorization. Reports the pivot index when a
/// diagonal entry fails to stay positive.
fn cholesky_factor(a: &mut DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            let l = a[(j, k)];
            d -= l * l;
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(SdfError::Factorization { pivot: j, value: d });
        }
        let root = d.sqrt();
        a[(j, j)] = root;
        for i in j + 1..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= a[(i, k)] * a[(j, k)];
            }
            a[(i, j)] = v / root;
        }
    }
    Ok(())
}

/// Forward/back substitution against an in-place lower Cholesky factor.
fn cholesky_substitute(factor: &DMatrix<f64>, rhs: &[f64]) -> Vec<f64> {
    let n = factor.nrows();
    let mut x = rhs.to_vec();
    // Forward substitution L y = b.
    for i in 0..n {
        let mut v = x[i];
        for k in 0..i {
            v -= factor[(i, k)] * x[k];
        }
        x[i] = v / factor[(i, i)];
    }
    // Back substitution L^T x = y.
    for i in (0..n).rev() {
        let mut v = x[i];
        for k in i + 1..n {
            v -= factor[(k, i)] * x[k];
        }
        x[i] = v / factor[(i, i)];
    }
    x
}

/// Solve `A x = b` for symmetric positive-definite `A`. After the initial
/// Cholesky solve, fixed-precision iterative refinement reuses the factor
/// until the residual meets [`RESIDUAL_TOLERANCE`]; badly conditioned
/// systems (tiny `m gamma` shifts) need one or two refinement steps.
fn cholesky_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let mut factor = a.clone();
    cholesky_factor(&mut factor)?;
    let mut x = cholesky_substitute(&factor, b);

    let b_vec = DVector::from_column_slice(b);
    let threshold = RESIDUAL_TOLERANCE * b_vec.norm();
    for _ in 0..4 {
        let residual = &b_vec - a * DVector::from_column_slice(&x);
        if residual.norm() <= threshold {
            break;
        }
        let correction = cholesky_substitute(&factor, residual.as_slice());
        for (xi, ci) in x.iter_mut().zip(&correction) {
            *xi += ci;
        }
    }
    Ok(x)
}

fn shifted(k: &DMatrix<f64>, m_gamma: f64) -> DMatrix<f64> {
    let mut a = k.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += m_gamma;
    }
    a
}

/// Fit against an already-assembled Gram matrix (shared by `fit_kernel`,
/// `iterate_kernel`, and the cross-validation loop, which reuses one Gram
/// matrix across the gamma grid).
pub(crate) fn fit_with_gram(
    points: &Points,
    k: &DMatrix<f64>,
    b: &[f64],
    sigma: f64,
    gamma: f64,
    metric: &Metric,
) -> Result<KernelModel> {
    let m = points.n_points();
    if b.len() != m {
        return Err(SdfError::LengthMismatch {
            left: m,
            right: b.len(),
        });
    }
    if !b.iter().all(|v| v.is_finite()) {
        return Err(SdfError::invalid("target values must be finite"));
    }
    let m_gamma = m as f64 * gamma;
    let a = shifted(k, m_gamma);
    let coeffs = cholesky_solve(&a, b)?;

    // Residual contract: |(K + m gamma I) c - b| <= 1e-8 |b|.
    let c = DVector::from_column_slice(&coeffs);
    let residual = (&a * &c - DVector::from_column_slice(b)).norm();
    let scale = DVector::from_column_slice(b).norm();
    if residual > RESIDUAL_TOLERANCE * scale {
        return Err(SdfError::DegenerateFit(format!(
            "solve residual {residual:e} exceeds {RESIDUAL_TOLERANCE:e} * |b| = {:e}",
            RESIDUAL_TOLERANCE * scale
        )));
    }

    Ok(KernelModel {
        support: points.clone(),
        coeffs,
        sigma,
        gamma,
        metric: metric.clone(),
    })
}

/// Solve `(K + m gamma I) c = b` and package the kernel expansion.
pub fn fit_kernel(
    points: &Points,
    b: &[f64],
    sigma: f64,
    gamma: f64,
    metric: &Metric,
) -> Result<KernelModel> {
    check_kernel_params(sigma, gamma)?;
    let k = gram(points, sigma, metric)?;
    fit_with_gram(points, &k, b, sigma, gamma, metric)
}

/// Repeated re-estimation: fit, replace `b` with the expansion's values at
/// the training points, and fit again. `iterations = 0` is a plain fit on
/// `b0`; `k` iterations transform the targets by `(K (K + m gamma I)^-1)^k`.
pub fn iterate_kernel(
    points: &Points,
    b0: &[f64],
    sigma: f64,
    gamma: f64,
    metric: &Metric,
    iterations: usize,
) -> Result<KernelModel> {
    check_kernel_params(sigma, gamma)?;
    let k = gram(points, sigma, metric)?;
    let m_gamma = points.n_points() as f64 * gamma;
    let a = shifted(&k, m_gamma);
    let mut b = b0.to_vec();
    for _ in 0..iterations {
        let coeffs = cholesky_solve(&a, &b)?;
        let next = &k * DVector::from_column_slice(&coeffs);
        b = next.as_slice().to_vec();
    }
    fit_with_gram(points, &k, &b, sigma, gamma, metric)
}
