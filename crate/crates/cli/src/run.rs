//! Subcommand implementations: thin compositions of library operations.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use sdfclass_core::dataset::{
    correlation_weights, csv_headers, load_csv, load_points_csv, write_dataset_csv,
    ColumnSelector, Dataset, Metric,
};
use sdfclass_core::estimate::{
    initial_estimates, midpoint_refine, write_estimates_csv, EstimateStage, SdfEstimates,
};
use sdfclass_core::experiments::{
    plot_rows, read_baseline_csv, run_checkerboard_suite, run_linear_suite, write_plot_csv,
    write_reports_json, write_trials_csv, CheckerboardConfig, ExperimentReport, LinearSuiteConfig,
    PlotRow,
};
use sdfclass_core::kernel::iterate_kernel;
use sdfclass_core::linear::iterate_linear;
use sdfclass_core::model::{write_predictions_csv, Model};
use sdfclass_core::modelselect::{
    cross_validate, loocv, sigma_heuristic, write_cv_csv, CvConfig, FoldSpec, MetricRule,
};
use sdfclass_core::synth::{
    gen_checkerboard_grid, gen_checkerboard_train, gen_linear, LinearProblemKind,
};

use crate::cli::{
    BenchCheckerboardArgs, BenchLinearArgs, CvArgs, EstimateArgs, GenArgs, GenKind, LoocvArgs,
    MetricArg, ModelKindArg, PredictArgs, TrainArgs,
};
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn label_selector(raw: &str) -> ColumnSelector {
    ColumnSelector::from_str(raw).expect("infallible")
}

fn load_labeled(data: &Path, label_column: &str, positive_label: &str) -> Result<Dataset, CliError> {
    Ok(load_csv(data, &label_selector(label_column), positive_label)?)
}

/// Resolve the metric flag against a concrete dataset.
fn resolve_metric(arg: MetricArg, data: &Dataset) -> Result<Metric, CliError> {
    Ok(match arg {
        MetricArg::Euclidean => Metric::Euclidean,
        MetricArg::CorrelationWeighted => Metric::weighted(correlation_weights(data)?)?,
    })
}

fn estimates_for_stage(
    data: &Dataset,
    metric: &Metric,
    stage: EstimateStage,
) -> Result<SdfEstimates, CliError> {
    let est = initial_estimates(data, metric)?;
    Ok(match stage {
        EstimateStage::Initial => est,
        EstimateStage::MidpointRefined => midpoint_refine(&est)?,
    })
}

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let need_m_seed = |what: &str| -> Result<(usize, u64), CliError> {
        if args.resolution.is_some() {
            return Err(usage("--resolution only applies to --kind checkerboard-grid"));
        }
        let m = args.m.ok_or_else(|| usage(format!("--m is required for --kind {what}")))?;
        let seed = args
            .seed
            .ok_or_else(|| usage(format!("--seed is required for --kind {what}")))?;
        Ok((m, seed))
    };
    let dataset = match args.kind {
        GenKind::Uniform | GenKind::Normal | GenKind::Skewed => {
            let kind = match args.kind {
                GenKind::Uniform => LinearProblemKind::Uniform,
                GenKind::Normal => LinearProblemKind::Normal,
                _ => LinearProblemKind::Skewed,
            };
            let (m, seed) = need_m_seed(&kind.to_string())?;
            gen_linear(kind, m, seed)?
        }
        GenKind::Checkerboard => {
            let (m, seed) = need_m_seed("checkerboard")?;
            gen_checkerboard_train(m, seed)?
        }
        GenKind::CheckerboardGrid => {
            if args.m.is_some() || args.seed.is_some() {
                return Err(usage(
                    "--m and --seed do not apply to --kind checkerboard-grid",
                ));
            }
            let resolution = args
                .resolution
                .ok_or_else(|| usage("--resolution is required for --kind checkerboard-grid"))?;
            gen_checkerboard_grid(resolution)?
        }
    };
    write_dataset_csv(&dataset, &args.out)?;
    println!(
        "wrote {} samples x {} features to {}",
        dataset.n_samples(),
        dataset.n_features(),
        args.out.display()
    );
    Ok(())
}

pub fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let data = load_labeled(&args.data, &args.label_column, &args.positive_label)?;
    let metric = resolve_metric(args.metric, &data)?;
    let est = estimates_for_stage(&data, &metric, args.stage.into())?;
    write_estimates_csv(&data, &est, &args.out)?;
    println!("wrote {} estimates to {}", est.len(), args.out.display());
    Ok(())
}

pub fn train(args: &TrainArgs) -> Result<(), CliError> {
    // Kernel-only flags are rejected up front so a bad invocation leaves no
    // partial output behind.
    if args.model == ModelKindArg::Linear {
        if args.sigma.is_some() || args.sigma_rule.is_some() || args.gamma.is_some() {
            return Err(usage(
                "--sigma, --sigma-rule and --gamma only apply to --model kernel",
            ));
        }
    } else if args.sigma.is_some() && args.sigma_rule.is_some() {
        return Err(usage("--sigma conflicts with --sigma-rule; give one"));
    }

    let data = load_labeled(&args.data, &args.label_column, &args.positive_label)?;
    let metric = resolve_metric(args.metric, &data)?;
    let model: Model = match args.model {
        ModelKindArg::Linear => iterate_linear(&data, &metric, args.iterations)?.into(),
        ModelKindArg::Kernel => {
            let sigma = match (args.sigma, args.sigma_rule) {
                (Some(s), None) => s,
                (None, Some(rule)) => sigma_heuristic(&data, &metric, rule.into())?,
                (None, None) => {
                    return Err(usage(
                        "kernel models need --sigma or --sigma-rule; there is no default width",
                    ))
                }
                (Some(_), Some(_)) => unreachable!("rejected above"),
            };
            let gamma = args.gamma.unwrap_or(1e-7);
            let est = estimates_for_stage(&data, &metric, args.stage.into())?;
            iterate_kernel(
                data.points(),
                est.b(),
                sigma,
                gamma,
                &metric,
                args.iterations,
            )?
            .into()
        }
    };
    model.save(&args.out)?;
    match &model {
        Model::Linear(m) => println!(
            "wrote linear model (dim {}) to {}",
            m.dim(),
            args.out.display()
        ),
        Model::Kernel(m) => println!(
            "wrote kernel model (m {}, sigma {}, gamma {}) to {}",
            m.coeffs().len(),
            m.sigma(),
            m.gamma(),
            args.out.display()
        ),
    }
    Ok(())
}

pub fn predict(args: &PredictArgs) -> Result<(), CliError> {
    let model = Model::load(&args.model)?;
    let exclude = match &args.label_column {
        Some(name) => Some(label_selector(name)),
        None => {
            let headers = csv_headers(&args.data)?;
            headers
                .iter()
                .any(|h| h == "label")
                .then(|| ColumnSelector::Name("label".to_string()))
        }
    };
    let points = load_points_csv(&args.data, exclude.as_ref())?;
    // predict_batch reports the mismatch, but check here so the message
    // names both files.
    if points.dim() != model.dim() {
        return Err(CliError::Data(sdfclass_core::SdfError::DimensionMismatch {
            expected: model.dim(),
            got: points.dim(),
        }));
    }
    let values = model.predict_batch(&points)?;
    write_predictions_csv(&values, &args.out)?;
    println!("wrote {} predictions to {}", values.len(), args.out.display());
    Ok(())
}

pub fn cv(args: &CvArgs) -> Result<(), CliError> {
    if args.sigma_grid.is_empty() || args.gamma_grid.is_empty() {
        return Err(usage("--sigma-grid and --gamma-grid must be non-empty"));
    }
    let folds = if args.folds == "loo" {
        FoldSpec::LeaveOneOut
    } else {
        match args.folds.parse::<usize>() {
            Ok(k) if k >= 2 => FoldSpec::K(k),
            _ => return Err(usage(format!("--folds must be an integer >= 2 or \"loo\", got {:?}", args.folds))),
        }
    };
    let data = load_labeled(&args.data, &args.label_column, &args.positive_label)?;
    let config = CvConfig {
        sigma_grid: args.sigma_grid.clone(),
        gamma_grid: args.gamma_grid.clone(),
        folds,
        seed: args.seed,
        estimate_stage: args.stage.into(),
        reweight: args.metric == MetricArg::CorrelationWeighted,
    };
    let result = cross_validate(&data, &Metric::Euclidean, &config)?;
    write_cv_csv(&result, &args.out)?;
    let best_acc = result
        .table
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(*v));
    println!(
        "best sigma {} gamma {} (mean accuracy {})",
        result.best_sigma, result.best_gamma, best_acc
    );
    Ok(())
}

pub fn run_loocv(args: &LoocvArgs) -> Result<(), CliError> {
    let data = load_labeled(&args.data, &args.label_column, &args.positive_label)?;
    let rule = match args.metric {
        MetricArg::Euclidean => MetricRule::Euclidean,
        MetricArg::CorrelationWeighted => MetricRule::CorrelationWeighted,
    };
    let stage: EstimateStage = args.stage.into();
    let accuracy = loocv(&data, rule, args.sigma_rule.into(), args.gamma, stage)?;
    println!("{accuracy}");
    if let Some(out) = &args.out {
        let doc = serde_json::json!({
            "accuracy": accuracy,
            "config": {
                "data": args.data.display().to_string(),
                "metric": rule,
                "sigma_rule": sdfclass_core::DistanceStat::from(args.sigma_rule),
                "gamma": args.gamma,
                "estimate_stage": stage,
                "m": data.n_samples(),
                "n": data.n_features(),
            },
        });
        std::fs::write(out, format!("{:#}\n", doc)).map_err(sdfclass_core::SdfError::from)?;
    }
    Ok(())
}

/// Base path for report files: `reports/run.json` -> `reports/run`.
fn report_base(out: &Path) -> PathBuf {
    match out.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("csv") => out.with_extension(""),
        _ => out.to_path_buf(),
    }
}

fn write_report_files(
    base: &Path,
    reports: &[ExperimentReport],
    mut rows: Vec<PlotRow>,
    baseline: Option<&PathBuf>,
) -> Result<(), CliError> {
    if let Some(path) = baseline {
        rows.extend(read_baseline_csv(path)?);
    }
    let json = base.with_extension("json");
    let csv_path = base.with_extension("csv");
    let plot = base.with_file_name(format!(
        "{}_plot.csv",
        base.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    ));
    write_reports_json(reports, &json)?;
    write_trials_csv(reports, &csv_path)?;
    write_plot_csv(&rows, &plot)?;
    println!(
        "wrote {}, {} and {}",
        json.display(),
        csv_path.display(),
        plot.display()
    );
    Ok(())
}

pub fn bench_linear(args: &BenchLinearArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let kind: LinearProblemKind = args.kind.into();
    let config = LinearSuiteConfig {
        kind,
        m_values: args.m_list.clone(),
        trials: args.trials,
        test_size: args.test_size,
        iterations: args.iterations,
        seed: args.seed,
    };
    let reports = run_linear_suite(&config)?;
    for report in &reports {
        println!(
            "m={} mean={:.5} std={:.5} ({:.1}s)",
            report.train_size, report.mean_accuracy, report.std_accuracy, report.wall_time_seconds
        );
    }
    let variant = format!("sdf-{kind}-iter{}", args.iterations);
    let rows = plot_rows(&variant, &reports);
    write_report_files(&report_base(&args.out), &reports, rows, args.baseline.as_ref())
}

pub fn bench_checkerboard(args: &BenchCheckerboardArgs) -> Result<(), CliError> {
    let trials = args.trials.unwrap_or(if args.full { 100 } else { 10 });
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let config = CheckerboardConfig {
        train_m: args.train_m,
        grid_resolution: args.resolution,
        trials,
        cv: CvConfig {
            sigma_grid: args.sigma_grid.clone(),
            gamma_grid: args.gamma_grid.clone(),
            folds: FoldSpec::K(args.folds),
            seed: args.seed,
            estimate_stage: args.stage.into(),
            reweight: false,
        },
        seed: args.seed,
    };
    let report = run_checkerboard_suite(&config)?;
    println!(
        "trials={} mean={:.5} std={:.5} ({:.1}s)",
        trials, report.mean_accuracy, report.std_accuracy, report.wall_time_seconds
    );
    let reports = vec![report];
    let rows = plot_rows("sdf-checkerboard", &reports);
    write_report_files(&report_base(&args.out), &reports, rows, args.baseline.as_ref())
}
