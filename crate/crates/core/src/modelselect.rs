//! Hyperparameter selection by cross-validation and the inter-distance
//! sigma heuristics.
//!
//! Folds are stratified by class so small minority classes cannot produce
//! single-class training folds. Selection scores are held-out classification
//! accuracies; ties break to the smallest sigma, then the smallest gamma,
//! then grid order.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    correlation_weights, interdistance_stat, Dataset, DistanceStat, Label, Metric,
};
use crate::error::{Result, SdfError};
use crate::estimate::{initial_estimates, midpoint_refine, EstimateStage};
use crate::kernel::{fit_with_gram, gram};

/// Fold scheme for cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldSpec {
    /// k-fold with stratified, size-balanced folds (k >= 2).
    K(usize),
    LeaveOneOut,
}

/// Grid-search configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub sigma_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub folds: FoldSpec,
    pub seed: u64,
    pub estimate_stage: EstimateStage,
    /// Recompute correlation weights on each training subset and use the
    /// resulting weighted metric in place of the supplied one.
    pub reweight: bool,
}

impl CvConfig {
    fn validate(&self, m: usize) -> Result<()> {
        if self.sigma_grid.is_empty() || self.gamma_grid.is_empty() {
            return Err(SdfError::invalid("sigma and gamma grids must be non-empty"));
        }
        for &s in &self.sigma_grid {
            if !(s > 0.0 && s.is_finite()) {
                return Err(SdfError::invalid(format!("sigma grid value {s} must be positive")));
            }
        }
        for &g in &self.gamma_grid {
            if !(g > 0.0 && g.is_finite()) {
                return Err(SdfError::invalid(format!("gamma grid value {g} must be positive")));
            }
        }
        match self.folds {
            FoldSpec::K(k) if k < 2 => Err(SdfError::invalid("fold count must be at least 2")),
            FoldSpec::K(k) if k > m => Err(SdfError::invalid(format!(
                "fold count {k} exceeds sample count {m}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Grid-search result. `table[i][j]` is the mean held-out accuracy of
/// `(sigma_grid[i], gamma_grid[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub best_sigma: f64,
    pub best_gamma: f64,
    pub table: Vec<Vec<f64>>,
    pub sigma_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    /// Held-out sample indices per fold, in fold order.
    pub fold_assignments: Vec<Vec<usize>>,
}

/// Build stratified folds: one shuffled round-robin deal across both classes
/// keeps total fold sizes within one of each other. Retries the shuffle up to
/// 100 times until every fold's training part contains both classes.
fn stratified_folds(data: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, label) in data.labels().iter().enumerate() {
        match label {
            Label::Negative => by_class[0].push(i),
            Label::Positive => by_class[1].push(i),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let mut folds = vec![Vec::new(); k];
        let mut slot = 0usize;
        for class in by_class.iter() {
            let mut shuffled = class.clone();
            shuffled.shuffle(&mut rng);
            for idx in shuffled {
                folds[slot % k].push(idx);
                slot += 1;
            }
        }
        // Valid when no fold swallows an entire class.
        let valid = by_class.iter().all(|class| {
            folds
                .iter()
                .all(|fold| fold.iter().filter(|i| class.contains(i)).count() < class.len())
        });
        if valid {
            return Ok(folds);
        }
    }
    let (neg, pos) = data.class_counts();
    let (label, count) = if neg <= pos { ("-1", neg) } else { ("+1", pos) };
    Err(SdfError::Stratification { label, count })
}

struct FoldContext {
    train: Dataset,
    test_indices: Vec<usize>,
    metric: Metric,
    targets: Vec<f64>,
}

fn prepare_fold(
    data: &Dataset,
    metric: &Metric,
    fold: &[usize],
    stage: EstimateStage,
    reweight: bool,
) -> Result<FoldContext> {
    let train_indices: Vec<usize> = (0..data.n_samples()).filter(|i| !fold.contains(i)).collect();
    let train = data.subset(&train_indices);
    let fold_metric = if reweight {
        Metric::weighted(correlation_weights(&train)?)?
    } else {
        metric.clone()
    };
    let est = initial_estimates(&train, &fold_metric)?;
    let targets = match stage {
        EstimateStage::Initial => est.b().to_vec(),
        EstimateStage::MidpointRefined => midpoint_refine(&est)?.b().to_vec(),
    };
    Ok(FoldContext {
        train,
        test_indices: fold.to_vec(),
        metric: fold_metric,
        targets,
    })
}

/// Grid search over (sigma, gamma): per fold, estimates and (optionally)
/// correlation weights come from the training part only; the score is the
/// held-out classification accuracy averaged over folds.
pub fn cross_validate(data: &Dataset, metric: &Metric, config: &CvConfig) -> Result<CvResult> {
    let m = data.n_samples();
    config.validate(m)?;
    let k = match config.folds {
        FoldSpec::K(k) => k,
        FoldSpec::LeaveOneOut => m,
    };
    let folds = stratified_folds(data, k, config.seed)?;

    let contexts: Vec<FoldContext> = folds
        .par_iter()
        .map(|fold| prepare_fold(data, metric, fold, config.estimate_stage, config.reweight))
        .collect::<Result<_>>()?;

    // One Gram matrix per (fold, sigma); the gamma grid reuses it.
    let n_sigma = config.sigma_grid.len();
    let n_gamma = config.gamma_grid.len();
    let correct: Vec<Vec<usize>> = (0..contexts.len() * n_sigma)
        .into_par_iter()
        .map(|task| -> Result<Vec<usize>> {
            let ctx = &contexts[task / n_sigma];
            let sigma = config.sigma_grid[task % n_sigma];
            let k_matrix = gram(ctx.train.points(), sigma, &ctx.metric)?;
            config
                .gamma_grid
                .iter()
                .map(|&gamma| {
                    let model = fit_with_gram(
                        ctx.train.points(),
                        &k_matrix,
                        &ctx.targets,
                        sigma,
                        gamma,
                        &ctx.metric,
                    )?;
                    let mut hits = 0usize;
                    for &i in &ctx.test_indices {
                        let value = model.predict(data.point(i))?;
                        if Label::from_sign(value) == data.label(i) {
                            hits += 1;
                        }
                    }
                    Ok(hits)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut table = vec![vec![0.0; n_gamma]; n_sigma];
    for (si, row) in table.iter_mut().enumerate() {
        for (gi, cell) in row.iter_mut().enumerate() {
            let hits: usize = (0..contexts.len())
                .map(|f| correct[f * n_sigma + si][gi])
                .sum();
            *cell = hits as f64 / m as f64;
        }
    }

    // Best cell: highest accuracy, then smallest sigma, then smallest gamma,
    // then first in grid order.
    let mut best = (0usize, 0usize);
    for si in 0..n_sigma {
        for gi in 0..n_gamma {
            let (bs, bg) = best;
            let (acc, sigma, gamma) = (table[si][gi], config.sigma_grid[si], config.gamma_grid[gi]);
            let (bacc, bsigma, bgamma) = (table[bs][bg], config.sigma_grid[bs], config.gamma_grid[bg]);
            let better = acc > bacc
                || (acc == bacc && sigma < bsigma)
                || (acc == bacc && sigma == bsigma && gamma < bgamma);
            if better {
                best = (si, gi);
            }
        }
    }

    Ok(CvResult {
        best_sigma: config.sigma_grid[best.0],
        best_gamma: config.gamma_grid[best.1],
        table,
        sigma_grid: config.sigma_grid.clone(),
        gamma_grid: config.gamma_grid.clone(),
        fold_assignments: folds,
    })
}

/// How the metric is derived inside LOOCV loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricRule {
    Euclidean,
    /// Correlation weights recomputed on every leave-one-out subset,
    /// independent of the excluded sample.
    CorrelationWeighted,
}

/// Leave-one-out cross-validation accuracy of the kernel classifier. For
/// every held-out sample, the metric weights (under
/// [`MetricRule::CorrelationWeighted`]) and sigma (via `sigma_rule`) are
/// recomputed on the remaining m−1 points before fitting.
pub fn loocv(
    data: &Dataset,
    rule: MetricRule,
    sigma_rule: DistanceStat,
    gamma: f64,
    stage: EstimateStage,
) -> Result<f64> {
    let m = data.n_samples();
    if m < 3 {
        return Err(SdfError::invalid("LOOCV needs at least three samples"));
    }
    let (neg, pos) = data.class_counts();
    if neg < 2 || pos < 2 {
        let (label, count) = if neg < 2 { ("-1", neg) } else { ("+1", pos) };
        return Err(SdfError::Stratification { label, count });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(SdfError::invalid(format!("gamma must be positive, got {gamma}")));
    }

    let hits: Vec<bool> = (0..m)
        .into_par_iter()
        .map(|i| -> Result<bool> {
            let indices: Vec<usize> = (0..m).filter(|&j| j != i).collect();
            let train = data.subset(&indices);
            let metric = match rule {
                MetricRule::Euclidean => Metric::Euclidean,
                MetricRule::CorrelationWeighted => {
                    Metric::weighted(correlation_weights(&train)?)?
                }
            };
            let sigma = interdistance_stat(&train, &metric, sigma_rule)?;
            let est = initial_estimates(&train, &metric)?;
            let targets = match stage {
                EstimateStage::Initial => est.b().to_vec(),
                EstimateStage::MidpointRefined => midpoint_refine(&est)?.b().to_vec(),
            };
            let model =
                crate::kernel::fit_kernel(train.points(), &targets, sigma, gamma, &metric)?;
            let value = model.predict(data.point(i))?;
            Ok(Label::from_sign(value) == data.label(i))
        })
        .collect::<Result<_>>()?;

    Ok(hits.iter().filter(|h| **h).count() as f64 / m as f64)
}

/// Sigma heuristic: the mean or RMS inter-point distance of the training
/// data under the given metric.
pub fn sigma_heuristic(data: &Dataset, metric: &Metric, stat: DistanceStat) -> Result<f64> {
    interdistance_stat(data, metric, stat)
}

/// Export the accuracy table as CSV: one row per sigma, one column per gamma.
pub fn write_cv_csv(result: &CvResult, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["sigma".to_string()];
    header.extend(result.gamma_grid.iter().map(|g| g.to_string()));
    writer.write_record(&header)?;
    for (si, row) in result.table.iter().enumerate() {
        let mut record = vec![result.sigma_grid[si].to_string()];
        record.extend(row.iter().map(|a| a.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
