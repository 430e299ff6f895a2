//! Multi-trial experiment harness with statistical reports.
//!
//! Trials run on independent per-trial RNG streams and results are collected
//! in trial order, so serial and parallel executions produce identical
//! reports.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{correlation_weights, Label, Metric};
use crate::error::{Result, SdfError};
use crate::estimate::{initial_estimates, midpoint_refine, EstimateStage};
use crate::kernel::fit_kernel;
use crate::linear::iterate_linear;
use crate::modelselect::{cross_validate, CvConfig, FoldSpec};
use crate::synth::{
    gen_checkerboard_grid, gen_checkerboard_train_rng, gen_linear_rng, trial_rng,
    LinearProblemKind,
};

/// Fraction of predictions whose sign (zero counting as positive) matches
/// the label.
pub fn accuracy(predictions: &[f64], labels: &[Label]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(SdfError::LengthMismatch {
            left: predictions.len(),
            right: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(SdfError::invalid("accuracy over an empty prediction set"));
    }
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, l)| Label::from_sign(**p) == **l)
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Aggregated outcome of one experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    /// Training-set size the trials used.
    pub train_size: usize,
    pub per_trial_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation (divisor m−1); zero for a single trial.
    pub std_accuracy: f64,
    pub config_echo: serde_json::Value,
    pub wall_time_seconds: f64,
}

impl ExperimentReport {
    fn from_trials(
        name: String,
        train_size: usize,
        per_trial_accuracy: Vec<f64>,
        config_echo: serde_json::Value,
        wall_time_seconds: f64,
    ) -> Self {
        let (mean, std) = mean_std(&per_trial_accuracy);
        ExperimentReport {
            name,
            train_size,
            per_trial_accuracy,
            mean_accuracy: mean,
            std_accuracy: std,
            config_echo,
            wall_time_seconds,
        }
    }
}

/// Mean and sample standard deviation (divisor m−1, zero when m < 2).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Configuration for the linearly separable suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSuiteConfig {
    pub kind: LinearProblemKind,
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub test_size: usize,
    pub iterations: usize,
    pub seed: u64,
}

/// Run the linear suite: for each training size, `trials` independent
/// train/test draws, a projection-iterated linear fit, and the accuracy on a
/// fresh test sample. Returns one report per training size.
///
/// Trial `t` of the i-th training size draws from stream `i * trials + t`;
/// the training set is drawn first, then the test set, from the same stream.
pub fn run_linear_suite(config: &LinearSuiteConfig) -> Result<Vec<ExperimentReport>> {
    if config.trials == 0 {
        return Err(SdfError::invalid("suite needs at least one trial"));
    }
    if config.m_values.is_empty() {
        return Err(SdfError::invalid("suite needs at least one training size"));
    }
    let echo = serde_json::to_value(config)?;

    let mut reports = Vec::with_capacity(config.m_values.len());
    for (mi, &m) in config.m_values.iter().enumerate() {
        let start = Instant::now();
        let accs: Vec<f64> = (0..config.trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let stream = (mi * config.trials + t) as u64;
                let mut rng = trial_rng(config.seed, stream);
                let train = gen_linear_rng(config.kind, m, &mut rng)?;
                let test = gen_linear_rng(config.kind, config.test_size, &mut rng)?;
                let model = iterate_linear(&train, &Metric::Euclidean, config.iterations)?;
                let predictions = model.predict_batch(test.points())?;
                accuracy(&predictions, test.labels())
            })
            .collect::<Result<_>>()?;
        reports.push(ExperimentReport::from_trials(
            format!("linear-{}-iter{}-m{}", config.kind, config.iterations, m),
            m,
            accs,
            echo.clone(),
            start.elapsed().as_secs_f64(),
        ));
    }
    Ok(reports)
}

/// Configuration for the checkerboard suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckerboardConfig {
    pub train_m: usize,
    pub grid_resolution: usize,
    pub trials: usize,
    pub cv: CvConfig,
    pub seed: u64,
}

/// Default grid search used by the checkerboard benchmark: sigma spanning
/// a quarter cell up to half the board, gamma over six decades, five
/// stratified folds, midpoint-refined estimates.
pub fn default_checkerboard_cv(seed: u64) -> CvConfig {
    CvConfig {
        sigma_grid: vec![0.125, 0.25, 0.5, 1.0, 2.0],
        gamma_grid: vec![1e-7, 1e-5, 1e-3],
        folds: FoldSpec::K(5),
        seed,
        estimate_stage: EstimateStage::MidpointRefined,
        reweight: false,
    }
}

/// Run the checkerboard suite: per trial, a fresh training sample, sigma and
/// gamma chosen by cross-validation on that training set only, a kernel fit
/// on its estimates, and the accuracy on the fixed cell-centered grid.
///
/// Trial `t` draws training data from stream `t` and shifts the fold seed by
/// `t` so fold shuffles differ across trials.
pub fn run_checkerboard_suite(config: &CheckerboardConfig) -> Result<ExperimentReport> {
    if config.trials == 0 {
        return Err(SdfError::invalid("suite needs at least one trial"));
    }
    let start = Instant::now();
    let grid = gen_checkerboard_grid(config.grid_resolution)?;
    let echo = serde_json::to_value(config)?;

    let accs: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = trial_rng(config.seed, t as u64);
            let train = gen_checkerboard_train_rng(config.train_m, &mut rng)?;
            let cv = CvConfig {
                seed: config.cv.seed.wrapping_add(t as u64),
                ..config.cv.clone()
            };
            let selection = cross_validate(&train, &Metric::Euclidean, &cv)?;
            let metric = if cv.reweight {
                Metric::weighted(correlation_weights(&train)?)?
            } else {
                Metric::Euclidean
            };
            let est = initial_estimates(&train, &metric)?;
            let targets = match cv.estimate_stage {
                EstimateStage::Initial => est.b().to_vec(),
                EstimateStage::MidpointRefined => midpoint_refine(&est)?.b().to_vec(),
            };
            let model = fit_kernel(
                train.points(),
                &targets,
                selection.best_sigma,
                selection.best_gamma,
                &metric,
            )?;
            let predictions = model.predict_batch(grid.points())?;
            accuracy(&predictions, grid.labels())
        })
        .collect::<Result<_>>()?;

    Ok(ExperimentReport::from_trials(
        format!("checkerboard-m{}", config.train_m),
        config.train_m,
        accs,
        echo,
        start.elapsed().as_secs_f64(),
    ))
}

/// One line of a Figure-1 style plot table or an external baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub variant: String,
    pub m: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: Option<f64>,
}

/// Plot rows for a suite's reports under one variant label.
pub fn plot_rows(variant: &str, reports: &[ExperimentReport]) -> Vec<PlotRow> {
    reports
        .iter()
        .map(|r| PlotRow {
            variant: variant.to_string(),
            m: r.train_size,
            mean_accuracy: r.mean_accuracy,
            std_accuracy: Some(r.std_accuracy),
        })
        .collect()
}

/// Read externally produced baseline rows (`variant,m,mean_accuracy` with an
/// optional `std_accuracy` column) for side-by-side plot tables.
pub fn read_baseline_csv(path: &Path) -> Result<Vec<PlotRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let expected = ["variant", "m", "mean_accuracy"];
    if headers.len() < 3 || headers[..3] != expected {
        return Err(SdfError::invalid(format!(
            "baseline CSV must start with columns {expected:?}, found {headers:?}"
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parse = |idx: usize| -> Result<f64> {
            record
                .get(idx)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|_| SdfError::invalid(format!("bad baseline value {:?}", record.get(idx))))
        };
        rows.push(PlotRow {
            variant: record.get(0).unwrap_or("").to_string(),
            m: parse(1)? as usize,
            mean_accuracy: parse(2)?,
            std_accuracy: match record.get(3) {
                Some(s) if !s.trim().is_empty() => Some(parse(3)?),
                _ => None,
            },
        });
    }
    Ok(rows)
}

/// Write the plot table: `variant,m,log10_m,mean_accuracy,std_accuracy`.
pub fn write_plot_csv(rows: &[PlotRow], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["variant", "m", "log10_m", "mean_accuracy", "std_accuracy"])?;
    for row in rows {
        writer.write_record(&[
            row.variant.clone(),
            row.m.to_string(),
            (row.m as f64).log10().to_string(),
            row.mean_accuracy.to_string(),
            row.std_accuracy.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Write full reports as a JSON array.
pub fn write_reports_json(reports: &[ExperimentReport], path: &Path) -> Result<()> {
    let mut writer = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut writer, reports)?;
    use std::io::Write;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

/// Write one CSV row per trial: `name,m,trial,accuracy`.
pub fn write_trials_csv(reports: &[ExperimentReport], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["name", "m", "trial", "accuracy"])?;
    for report in reports {
        for (t, acc) in report.per_trial_accuracy.iter().enumerate() {
            writer.write_record(&[
                report.name.clone(),
                report.train_size.to_string(),
                t.to_string(),
                acc.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}
