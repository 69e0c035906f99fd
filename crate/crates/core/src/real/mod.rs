//! Closed-form characteristic functions on the real line, sampled on grids.
//!
//! Nothing here estimates from data: every function is a closed form and
//! every check is a deterministic scan over a [`RealGrid`].

mod grid;
mod model;
mod pipeline;
mod trace;

pub use grid::{AuxiliaryMarginal, RealGrid};
pub use model::{build_re1_pair, eval_cf, CFModel};
pub use pipeline::{
    cauchy_modulus_check, contraction_bound, contraction_vanishes, equal_ratio_real,
    min_shift_distance, real_joint_cf, real_joint_deviation, run_real_pipeline, sigma_constraint,
    CascadeRow, CauchyReport, ContractionBound, EqualRatioReport, RealPipelineReport,
};
pub use trace::{fit_quadratic, log_ratio, third_difference_residual, LogRatioTrace, QuadraticFit};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("phase jump of {jump:.3} rad near y = {y}")]
    UnwrapFailure { y: f64, jump: f64 },
    #[error("grid half-width {span} too narrow for step h = {h}")]
    GridTooNarrow { h: f64, span: f64 },
    #[error("h = {h} is not a positive multiple of the grid step {step}")]
    StepMismatch { h: f64, step: f64 },
    #[error("|k| = 1 (k = {0}) gives no contraction")]
    NotContractive(f64),
    #[error("characteristic function vanishes near y = {0}")]
    VanishingCF(f64),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ψ(0) = {0} instead of 0")]
    NotAnchored(String),
    #[error("a2 + a3 = 0")]
    OppositeCoefficients,
}
