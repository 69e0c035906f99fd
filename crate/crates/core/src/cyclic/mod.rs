//! Distributions and characteristic functions on finite cyclic groups Z(m).
//!
//! The character pairing is fixed as `(x, y) = exp(2πi·x·y/m)`. Mass vectors
//! may be backed by exact rationals ([`num_rational::BigRational`]) or by
//! `f64`; characteristic functions are always `Complex64`.

mod difference;
mod dist;
mod fourier;

pub use difference::{
    difference_power, is_polynomial_of_degree, polynomial_violation, PolynomialViolation,
};
pub use dist::{convolve, shift_equivalent, shift_equivalent_within, DistZm, Mass};
pub use fourier::{
    char_fn, character, inverse_char_fn, inverse_char_fn_with_tol, joint_cf, nonvanishing,
    reduce_quad, CharTable, JointCF, DEFAULT_NONVANISHING_FLOOR,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CyclicError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not a distribution: {0}")]
    NotADistribution(String),
    #[error("coefficient {name} is zero modulo {modulus}")]
    ZeroCoefficient { name: &'static str, modulus: u64 },
    #[error("malformed table: {0}")]
    Malformed(String),
}

/// Order of the cyclic group Z(m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct CyclicModulus(u64);

impl CyclicModulus {
    pub fn new(m: u64) -> Result<Self, CyclicError> {
        if m < 2 {
            return Err(CyclicError::InvalidModulus(m));
        }
        Ok(CyclicModulus(m))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn order(self) -> usize {
        self.0 as usize
    }

    pub fn is_prime(self) -> bool {
        is_prime(self.0)
    }

    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }

    /// Reduces a signed integer into `[0, m)`.
    pub fn reduce(self, x: i64) -> usize {
        x.rem_euclid(self.0 as i64) as usize
    }

    pub fn add(self, x: usize, y: usize) -> usize {
        (x + y) % self.order()
    }

    pub fn sub(self, x: usize, y: usize) -> usize {
        (x + self.order() - y % self.order()) % self.order()
    }

    pub fn neg(self, x: usize) -> usize {
        self.sub(0, x)
    }

    pub fn mul(self, x: usize, y: usize) -> usize {
        ((x as u128 * y as u128) % self.0 as u128) as usize
    }

    /// Multiplicative inverse, when `x` is a unit.
    pub fn inv(self, x: usize) -> Option<usize> {
        let (g, s, _) = ext_gcd(x as i128 % self.0 as i128, self.0 as i128);
        (g == 1).then(|| s.rem_euclid(self.0 as i128) as usize)
    }

    /// `exp(2πi·k/m)` for `k = 0..m`.
    pub fn roots_of_unity(self) -> Vec<Complex64> {
        let m = self.0 as f64;
        (0..self.order())
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / m))
            .collect()
    }
}

impl TryFrom<u64> for CyclicModulus {
    type Error = CyclicError;
    fn try_from(m: u64) -> Result<Self, Self::Error> {
        CyclicModulus::new(m)
    }
}

impl From<CyclicModulus> for u64 {
    fn from(m: CyclicModulus) -> u64 {
        m.0
    }
}

impl std::fmt::Display for CyclicModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Z({})", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}
