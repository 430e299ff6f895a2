//! Binary classification by signed-distance-function reconstruction.
//!
//! Instead of regressing the ±1 indicator of class membership, the
//! classifiers here first approximate the signed distance to the class
//! boundary at every training point (nearest-opposite-class distances with a
//! midpoint refinement) and then fit either an affine function or a
//! Gaussian-kernel ridge expansion to those values. The sign of the fitted
//! function classifies; its magnitude estimates how far a query sits from
//! the decision surface.
//!
//! ```
//! use sdfclass_core::{dataset::Metric, estimate, kernel, synth, Label};
//!
//! let data = synth::gen_checkerboard_train(200, 7)?;
//! let est = estimate::midpoint_refine(&estimate::initial_estimates(&data, &Metric::Euclidean)?)?;
//! let model = kernel::fit_kernel(data.points(), est.b(), 0.5, 1e-5, &Metric::Euclidean)?;
//! let class = Label::from_sign(model.predict(&[0.5, 0.5])?);
//! assert_eq!(class, Label::Positive);
//! # Ok::<(), sdfclass_core::SdfError>(())
//! ```

pub mod dataset;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod kernel;
pub mod linear;
pub mod model;
pub mod modelselect;
pub mod synth;

pub use dataset::{ColumnSelector, Dataset, DistanceStat, Label, Metric, Points};
pub use error::{Result, SdfError};
pub use estimate::{EstimateStage, SdfEstimates};
pub use experiments::ExperimentReport;
pub use kernel::KernelModel;
pub use linear::LinearModel;
pub use model::Model;
pub use modelselect::{CvConfig, CvResult, FoldSpec, MetricRule};
pub use synth::LinearProblemKind;
