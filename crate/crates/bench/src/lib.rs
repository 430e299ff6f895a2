//! Benchmark-only crate; see `benches/core.rs`.
//!
//! Shared fixtures for the criterion targets live here so the bench file
//! stays focused on measurement.

use sdfclass_core::dataset::Dataset;
use sdfclass_core::synth::{gen_checkerboard_train, gen_linear, LinearProblemKind};

/// Deterministic uniform linear dataset for fitting benchmarks.
pub fn linear_fixture(m: usize) -> Dataset {
    gen_linear(LinearProblemKind::Uniform, m, 42).expect("fixture generation")
}

/// Deterministic checkerboard dataset for kernel benchmarks.
pub fn checkerboard_fixture(m: usize) -> Dataset {
    gen_checkerboard_train(m, 42).expect("fixture generation")
}
