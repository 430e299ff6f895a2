//! Affine signed-distance models `l(x) = w·x + c` fitted by least squares.
//!
//! The fit solves the augmented system (points with an appended constant-1
//! column) through an SVD pseudoinverse: for an overdetermined full-rank
//! system this is the unique least-squares minimizer, otherwise it is the
//! minimum-norm solution over the joint vector (w, c).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Metric, Points};
use crate::error::{Result, SdfError};
use crate::estimate::{initial_estimates, midpoint_refine};

/// Fitted affine model. The sign of `predict` classifies; with a normalized
/// model (`|w| = 1`) the magnitude is the exact point-to-plane distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinearModelRepr", into = "LinearModelRepr")]
pub struct LinearModel {
    w: Vec<f64>,
    c: f64,
    normalized: bool,
}

/// On-disk JSON shape: {"w": [...], "c": ..., "normalized": ..., "dim": n}.
#[derive(Serialize, Deserialize)]
struct LinearModelRepr {
    w: Vec<f64>,
    c: f64,
    normalized: bool,
    dim: usize,
}

impl From<LinearModel> for LinearModelRepr {
    fn from(m: LinearModel) -> Self {
        let dim = m.w.len();
        LinearModelRepr {
            w: m.w,
            c: m.c,
            normalized: m.normalized,
            dim,
        }
    }
}

impl TryFrom<LinearModelRepr> for LinearModel {
    type Error = SdfError;

    fn try_from(r: LinearModelRepr) -> Result<Self> {
        if r.dim != r.w.len() {
            return Err(SdfError::InvalidModel(format!(
                "dim field is {} but w has {} entries",
                r.dim,
                r.w.len()
            )));
        }
        let model = LinearModel::new(r.w, r.c)?;
        if r.normalized {
            let norm = model.w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(SdfError::InvalidModel(format!(
                    "model claims normalized but |w| = {norm}"
                )));
            }
            return Ok(LinearModel {
                normalized: true,
                ..model
            });
        }
        Ok(model)
    }
}

impl LinearModel {
    /// Build a model from raw coefficients (finite, non-empty `w`).
    pub fn new(w: Vec<f64>, c: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(SdfError::invalid("linear model needs at least one coefficient"));
        }
        if !c.is_finite() || !w.iter().all(|v| v.is_finite()) {
            return Err(SdfError::InvalidModel(
                "linear model coefficients must be finite".to_string(),
            ));
        }
        Ok(LinearModel {
            w,
            c,
            normalized: false,
        })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Rescale so that `|w| = 1`. Positive scaling, so the classification of
    /// every point is unchanged.
    pub fn normalize(&self) -> Result<LinearModel> {
        let norm = self.w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SdfError::DegenerateFit(
                "cannot normalize a zero gradient".to_string(),
            ));
        }
        Ok(LinearModel {
            w: self.w.iter().map(|v| v / norm).collect(),
            c: self.c / norm,
            normalized: true,
        })
    }

    /// Evaluate `w·x + c`. The sign is the predicted class (zero counts as
    /// positive).
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(SdfError::DimensionMismatch {
                expected: self.w.len(),
                got: x.len(),
            });
        }
        Ok(self.w.iter().zip(x).map(|(wk, xk)| wk * xk).sum::<f64>() + self.c)
    }

    /// Evaluate at every point, in parallel over rows.
    pub fn predict_batch(&self, points: &Points) -> Result<Vec<f64>> {
        if points.dim() != self.w.len() {
            return Err(SdfError::DimensionMismatch {
                expected: self.w.len(),
                got: points.dim(),
            });
        }
        Ok((0..points.n_points())
            .into_par_iter()
            .map(|i| {
                let x = points.row(i);
                self.w.iter().zip(x).map(|(wk, xk)| wk * xk).sum::<f64>() + self.c
            })
            .collect())
    }
}

/// Least-squares fit of `w·x + c` to target values `b`.
pub fn fit_linear(points: &Points, b: &[f64]) -> Result<LinearModel> {
    let m = points.n_points();
    let n = points.dim();
    if b.len() != m {
        return Err(SdfError::LengthMismatch {
            left: m,
            right: b.len(),
        });
    }
    if !b.iter().all(|v| v.is_finite()) {
        return Err(SdfError::invalid("target values must be finite"));
    }

    // Augmented design matrix [X | 1].
    let a = DMatrix::from_row_iterator(
        m,
        n + 1,
        (0..m).flat_map(|i| points.row(i).iter().copied().chain(std::iter::once(1.0))),
    );
    let rhs = DVector::from_column_slice(b);
    let svd = a.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = sigma_max * (m.max(n + 1) as f64) * f64::EPSILON;
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| SdfError::DegenerateFit(e.to_string()))?;

    let w: Vec<f64> = sol.as_slice()[..n].to_vec();
    let c = sol[n];
    if !c.is_finite() || !w.iter().all(|v| v.is_finite()) {
        return Err(SdfError::DegenerateFit(
            "least-squares solution is not finite".to_string(),
        ));
    }
    Ok(LinearModel {
        w,
        c,
        normalized: false,
    })
}

/// Fit with projection-based refinement for linearly separable problems.
///
/// Starts from midpoint-refined nearest-opposite estimates, then repeats
/// `iterations` times: project each `y_i - x_i` (partner difference) onto the
/// current unit gradient to get a tightened magnitude, re-apply the midpoint
/// deduction with the partner's projected magnitude, and refit. Partner
/// indices stay frozen from the initial estimate. `iterations = 0` is exactly
/// the non-iterated fit.
pub fn iterate_linear(data: &Dataset, metric: &Metric, iterations: usize) -> Result<LinearModel> {
    let est = initial_estimates(data, metric)?;
    let refined = midpoint_refine(&est)?;
    let mut model = fit_linear(data.points(), refined.b())?;

    let m = data.n_samples();
    let opposite = est.opposite_index();
    for step in 0..iterations {
        let norm = model.w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SdfError::DegenerateFit(format!(
                "zero or non-finite gradient at iteration {step}"
            )));
        }
        let unit: Vec<f64> = model.w.iter().map(|v| v / norm).collect();
        let proj: Vec<f64> = (0..m)
            .map(|i| {
                let xi = data.point(i);
                let yi = data.point(opposite[i]);
                yi.iter()
                    .zip(xi)
                    .zip(&unit)
                    .map(|((yk, xk), uk)| (yk - xk) * uk)
                    .sum::<f64>()
                    .abs()
            })
            .collect();
        let b: Vec<f64> = (0..m)
            .map(|i| data.label(i).sign() * (proj[i] - 0.5 * proj[opposite[i]]))
            .collect();
        model = fit_linear(data.points(), &b)?;
    }
    Ok(model)
}
