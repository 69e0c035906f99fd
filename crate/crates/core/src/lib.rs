//! Identifiability up to shift for the pair of linear forms
//!
//! ```text
//! L1 = ξ1 + a2·ξ2 + a3·ξ3
//! L2 = b2·ξ2 + b3·ξ3 + ξ4
//! ```
//!
//! of independent random variables with nonvanishing characteristic
//! functions, over four scalar fields: the reals, the discrete rationals,
//! the p-adic numbers and the prime fields Z(p).
//!
//! The crate is split by where the computation happens:
//!
//! * [`cyclic`] holds exact distributions on finite cyclic groups Z(m), their
//!   characteristic functions, convolution and shift equivalence.
//! * [`padic`] is a small p-adic scalar type with tracked precision.
//! * [`real`] evaluates closed-form characteristic functions on the real line
//!   and runs the log-ratio machinery on grids.
//! * [`engine`] classifies coefficient quadruples, certifies shifts on Z(m)
//!   and builds the counterexamples.

pub mod cyclic;
pub mod engine;
pub mod numfmt;
pub mod padic;
pub mod quad;
pub mod real;

pub use quad::Quad;

/// Default tolerance for characteristic-function level comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
