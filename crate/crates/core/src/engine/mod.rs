//! Classification of coefficient quadruples, shift certification on Z(m),
//! and the counterexample constructions.

mod certify;
mod classify;
mod counterexample;

pub use certify::{
    case_equal_ratio_reduction, certify_shifts_zm, certify_shifts_zm_with, match_character,
    random_nonvanishing_dist, verify_joint_equality, CertCase, Certification, CertifyOptions,
    CounterexampleWitness, EqualRatioReduction, ShiftCertificate, TranscriptEntry,
};
pub use classify::{
    classification_sweep, classify, CaseLabel, CoefficientQuad, FieldTag, Outcome, Recipe,
    SweepRow, Verdict,
};
pub use counterexample::{
    build_counterexample_pr1_level, build_counterexample_pr2, product_identity_violation, Pr1Level,
};

use crate::cyclic::CyclicError;
use crate::padic::PAdicError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("coefficient {0} is zero")]
    ZeroCoefficient(&'static str),
    #[error("coefficient {name} = {value} is not a unit modulo {modulus}")]
    NonUnitCoefficient {
        name: &'static str,
        value: usize,
        modulus: u64,
    },
    #[error("modulus {0} is even; doubling is not invertible")]
    EvenModulus(u64),
    #[error("characteristic function of {which} has modulus {value:.3e} at y = {y}")]
    VanishingCF { which: String, y: usize, value: f64 },
    #[error("joint characteristic functions differ by {deviation:.3e} at (u, v) = ({u}, {v})")]
    JointMismatch { deviation: f64, u: usize, v: usize },
    #[error("g is not multiplicative: residual {residual:.3e} at (u, v) = ({u}, {v})")]
    NotMultiplicative { u: usize, v: usize, residual: f64 },
    #[error("quadruple does not satisfy a2·b3 = a3·b2")]
    NotEqualRatio,
    #[error("ε = {0} lies outside the admissible interval")]
    EpsilonOutOfRange(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level n = {0} is not supported")]
    InvalidLevel(u32),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("cannot parse {0}")]
    Parse(String),
    #[error(transparent)]
    Cyclic(#[from] CyclicError),
    #[error(transparent)]
    PAdic(#[from] PAdicError),
}
