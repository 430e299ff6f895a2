//! Seeded generators for the synthetic benchmark problems.
//!
//! Everything here is a pure function of its parameters and seed. Multi-trial
//! harnesses derive one independent ChaCha stream per trial via [`trial_rng`],
//! so runs are reproducible regardless of how trials are scheduled.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label, Points};
use crate::error::{Result, SdfError};

/// Sampling distribution for the linearly separable problems. All three live
/// in R^2 and are labeled by the sign of the second coordinate, so the true
/// signed distance to the class boundary is `x2` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearProblemKind {
    /// Uniform on the square [-1, 1]^2.
    Uniform,
    /// Standard normal centered at the origin.
    Normal,
    /// Per-coordinate density 1/(2 sqrt(t)) on [0, 1], mapped to [-1, 1].
    Skewed,
}

impl std::fmt::Display for LinearProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinearProblemKind::Uniform => write!(f, "uniform"),
            LinearProblemKind::Normal => write!(f, "normal"),
            LinearProblemKind::Skewed => write!(f, "skewed"),
        }
    }
}

/// Deterministic RNG for trial `trial` of a run seeded with `seed`.
///
/// Stream-splitting rule: one ChaCha8 generator keyed by `seed`, with the
/// trial index selecting the stream. Streams are statistically independent,
/// so parallel trials stay reproducible in any execution order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn skewed_coordinate<R: Rng>(rng: &mut R) -> f64 {
    // Inverse CDF of the normalized density 1/(2 sqrt(t)) is u^2; the affine
    // map 2t - 1 then carries [0, 1] onto [-1, 1].
    let u: f64 = rng.random();
    2.0 * u * u - 1.0
}

fn sample_linear_point<R: Rng>(kind: LinearProblemKind, rng: &mut R) -> [f64; 2] {
    match kind {
        LinearProblemKind::Uniform => [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        LinearProblemKind::Normal => [rng.sample(StandardNormal), rng.sample(StandardNormal)],
        LinearProblemKind::Skewed => [skewed_coordinate(rng), skewed_coordinate(rng)],
    }
}

/// Linearly separable sample drawn from an explicit RNG (the entry point the
/// multi-trial harness uses with per-trial streams).
pub fn gen_linear_rng<R: Rng>(kind: LinearProblemKind, m: usize, rng: &mut R) -> Result<Dataset> {
    if m < 2 {
        return Err(SdfError::invalid("linear problems need m >= 2 points"));
    }
    let mut data = Vec::with_capacity(2 * m);
    let mut labels = Vec::with_capacity(m);
    while labels.len() < m {
        let p = sample_linear_point(kind, rng);
        // Points exactly on the boundary are resampled so labels stay ±1.
        if p[1] == 0.0 {
            continue;
        }
        labels.push(Label::from_sign(p[1]));
        data.extend_from_slice(&p);
    }
    Dataset::new(Points::from_flat(data, 2)?, labels)
}

/// Linearly separable sample as a pure function of the seed.
pub fn gen_linear(kind: LinearProblemKind, m: usize, seed: u64) -> Result<Dataset> {
    gen_linear_rng(kind, m, &mut trial_rng(seed, 0))
}

/// Ground-truth signed distance for the linear problems: the boundary is the
/// x2 = 0 hyperplane, so `b(x) = x2` under every sampling distribution.
pub fn true_linear_sdf(x: &[f64]) -> f64 {
    x[1]
}

/// Class of the 4×4 checkerboard cell containing `(x1, x2)` on [0, 4)^2:
/// positive when `floor(x1) + floor(x2)` is even (the cell holding (0.5, 0.5)
/// is positive).
pub fn checkerboard_label(x1: f64, x2: f64) -> Result<Label> {
    if !(0.0..4.0).contains(&x1) || !(0.0..4.0).contains(&x2) {
        return Err(SdfError::invalid(format!(
            "point ({x1}, {x2}) lies outside the checkerboard domain [0,4)^2"
        )));
    }
    let parity = (x1.floor() + x2.floor()) as i64;
    Ok(if parity % 2 == 0 {
        Label::Positive
    } else {
        Label::Negative
    })
}

/// Checkerboard training sample from an explicit RNG.
pub fn gen_checkerboard_train_rng<R: Rng>(m: usize, rng: &mut R) -> Result<Dataset> {
    if m < 2 {
        return Err(SdfError::invalid("checkerboard training sets need m >= 2 points"));
    }
    let mut data = Vec::with_capacity(2 * m);
    let mut labels = Vec::with_capacity(m);
    while labels.len() < m {
        let x1 = 4.0 * rng.random::<f64>();
        let x2 = 4.0 * rng.random::<f64>();
        // Resample points sitting exactly on a cell boundary.
        if x1.fract() == 0.0 || x2.fract() == 0.0 {
            continue;
        }
        labels.push(checkerboard_label(x1, x2)?);
        data.push(x1);
        data.push(x2);
    }
    Dataset::new(Points::from_flat(data, 2)?, labels)
}

/// Checkerboard training sample as a pure function of the seed: m points
/// uniform on [0, 4)^2, labeled by cell parity.
pub fn gen_checkerboard_train(m: usize, seed: u64) -> Result<Dataset> {
    gen_checkerboard_train_rng(m, &mut trial_rng(seed, 0))
}

/// Cell-centered evaluation grid: `resolution^2` points at
/// `((i + 0.5) * 4 / resolution, (j + 0.5) * 4 / resolution)`, labeled by
/// cell parity. Resolution 200 yields exactly 40,000 boundary-free points.
pub fn gen_checkerboard_grid(resolution: usize) -> Result<Dataset> {
    if resolution == 0 {
        return Err(SdfError::invalid("grid resolution must be at least 1"));
    }
    let step = 4.0 / resolution as f64;
    let mut data = Vec::with_capacity(2 * resolution * resolution);
    let mut labels = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let x1 = (i as f64 + 0.5) * step;
            let x2 = (j as f64 + 0.5) * step;
            labels.push(checkerboard_label(x1, x2)?);
            data.push(x1);
            data.push(x2);
        }
    }
    Dataset::new(Points::from_flat(data, 2)?, labels)
}
