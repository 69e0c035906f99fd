//! p-adic numbers with a capped relative precision.
//!
//! A nonzero scalar is `p^v · u` where the unit `u` is known modulo `p^N`
//! (`N` certified digits). Scalars built from rationals additionally carry
//! their exact value, which lets predicates such as `a2·b3 = a3·b2` be
//! decided rather than guessed. Once an inexact operand is involved, digits
//! that cancel completely raise [`PAdicError::PrecisionExhausted`].

use crate::cyclic::is_prime;
use crate::numfmt::{format_rational, parse_rational};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

pub const DEFAULT_PRECISION: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PAdicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cancellation left no certified digits")]
    PrecisionExhausted,
    #[error("valuation {0} is negative")]
    NegativeValuation(i64),
    #[error("need {needed} certified digits, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("coefficient {0} is zero")]
    ZeroCoefficient(&'static str),
    #[error("{0}^{1} does not fit a machine word")]
    LevelTooLarge(u64, u32),
    #[error("cannot parse p-adic scalar: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Zero,
    Unit {
        valuation: i64,
        unit: BigUint,
        precision: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicScalar {
    p: u64,
    repr: Repr,
    exact: Option<BigRational>,
}

/// How the coefficients of a quadruple relate over Q_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PAdicQuadClass {
    /// `a2·b3 ≠ a3·b2`.
    DetNonzero,
    /// `a2·b3 = a3·b2` and `|a2|_p ≠ |a3|_p`.
    EqualRatioDistinctNorms,
    /// `a2·b3 = a3·b2` and `|a2|_p = |a3|_p`.
    EqualRatioEqualNorms,
}

fn pow_p(p: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

fn check_prime(p: u64) -> Result<(), PAdicError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(PAdicError::NotPrime(p))
    }
}

/// Splits a nonzero integer into `p^v · rest` with `p ∤ rest`.
fn split_valuation(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut rest = n.clone();
    let mut v = 0;
    while (&rest % &pb).is_zero() {
        rest /= &pb;
        v += 1;
    }
    (v, rest)
}

impl PAdicScalar {
    pub fn zero(p: u64) -> Result<Self, PAdicError> {
        check_prime(p)?;
        Ok(PAdicScalar {
            p,
            repr: Repr::Zero,
            exact: Some(BigRational::zero()),
        })
    }

    /// Exact scalar with `precision` digits of its expansion materialized.
    pub fn from_rational(r: &BigRational, p: u64, precision: u32) -> Result<Self, PAdicError> {
        check_prime(p)?;
        if r.is_zero() {
            return PAdicScalar::zero(p);
        }
        let precision = precision.max(1);
        let (vn, n) = split_valuation(r.numer(), p);
        let (vd, d) = split_valuation(r.denom(), p);
        let modulus = BigInt::from(pow_p(p, precision));
        let d_inv = d
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("denominator unit is invertible");
        let unit = (n * d_inv).mod_floor(&modulus);
        Ok(PAdicScalar {
            p,
            repr: Repr::Unit {
                valuation: vn - vd,
                unit: unit.to_biguint().expect("reduced mod p^N"),
                precision,
            },
            exact: Some(r.clone()),
        })
    }

    pub fn from_i64(n: i64, p: u64) -> Result<Self, PAdicError> {
        PAdicScalar::from_rational(&BigRational::from_integer(n.into()), p, DEFAULT_PRECISION)
    }

    /// Inexact scalar `p^valuation · Σ digits[i]·p^i`, certified to
    /// `digits.len()` digits.
    pub fn from_digits(p: u64, valuation: i64, digits: &[u64]) -> Result<Self, PAdicError> {
        check_prime(p)?;
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(PAdicError::Parse(format!(
                "digit {d} out of range for p = {p}"
            )));
        }
        let Some(lead) = digits.iter().position(|&d| d != 0) else {
            return Err(PAdicError::PrecisionExhausted);
        };
        let used = &digits[lead..];
        let unit = used
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * p + d);
        Ok(PAdicScalar {
            p,
            repr: Repr::Unit {
                valuation: valuation + lead as i64,
                unit,
                precision: used.len() as u32,
            },
            exact: None,
        })
    }

    /// Inexact unit-times-power with uniformly random digits.
    pub fn sample<R: Rng + ?Sized>(
        p: u64,
        valuation: i64,
        precision: u32,
        rng: &mut R,
    ) -> Result<Self, PAdicError> {
        let mut digits: Vec<u64> = (0..precision).map(|_| rng.gen_range(0..p)).collect();
        if let Some(first) = digits.first_mut() {
            *first = rng.gen_range(1..p);
        }
        PAdicScalar::from_digits(p, valuation, &digits)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.repr == Repr::Zero
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    /// `None` for zero (valuation +∞).
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Unit { valuation, .. } => Some(valuation),
        }
    }

    /// Number of certified unit digits; `None` for zero.
    pub fn precision(&self) -> Option<u32> {
        match self.repr {
            Repr::Zero => None,
            Repr::Unit { precision, .. } => Some(precision),
        }
    }

    /// Base-p digits of the unit part, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Zero => Vec::new(),
            Repr::Unit {
                unit, precision, ..
            } => {
                let mut rest = unit.clone();
                (0..*precision)
                    .map(|_| {
                        let (q, r) = rest.div_rem(&BigUint::from(self.p));
                        rest = q;
                        r.to_u64().expect("digit below p")
                    })
                    .collect()
            }
        }
    }

    /// `|x|_p = p^(−v)`, and `0` for zero.
    pub fn norm(&self) -> BigRational {
        match self.repr {
            Repr::Zero => BigRational::zero(),
            Repr::Unit { valuation, .. } => {
                let pv = BigRational::from_integer(BigInt::from(self.p));
                if valuation >= 0 {
                    num_traits::pow(pv, valuation as usize).recip()
                } else {
                    num_traits::pow(pv, (-valuation) as usize)
                }
            }
        }
    }

    fn same_prime(&self, other: &Self) -> Result<(), PAdicError> {
        if self.p != other.p {
            return Err(PAdicError::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    fn exact_precision(&self, other: &Self) -> u32 {
        self.precision()
            .into_iter()
            .chain(other.precision())
            .max()
            .unwrap_or(DEFAULT_PRECISION)
    }

    pub fn neg(&self) -> PAdicScalar {
        match (&self.repr, &self.exact) {
            (Repr::Zero, _) => self.clone(),
            (
                Repr::Unit {
                    valuation,
                    unit,
                    precision,
                },
                exact,
            ) => {
                let modulus = pow_p(self.p, *precision);
                PAdicScalar {
                    p: self.p,
                    repr: Repr::Unit {
                        valuation: *valuation,
                        unit: (&modulus - unit) % &modulus,
                        precision: *precision,
                    },
                    exact: exact.as_ref().map(|r| -r),
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<PAdicScalar, PAdicError> {
        self.same_prime(other)?;
        if let (Some(x), Some(y)) = (&self.exact, &other.exact) {
            return PAdicScalar::from_rational(&(x + y), self.p, self.exact_precision(other));
        }
        let (x, y) = match (&self.repr, &other.repr) {
            (Repr::Zero, _) => return Ok(other.clone()),
            (_, Repr::Zero) => return Ok(self.clone()),
            (Repr::Unit { valuation: vx, .. }, Repr::Unit { valuation: vy, .. }) => {
                if vx <= vy {
                    (self, other)
                } else {
                    (other, self)
                }
            }
        };
        let (
            Repr::Unit {
                valuation: vx,
                unit: ux,
                precision: nx,
            },
            Repr::Unit {
                valuation: vy,
                unit: uy,
                precision: ny,
            },
        ) = (&x.repr, &y.repr)
        else {
            unreachable!("zeros handled above")
        };
        let shift = (vy - vx) as u64;
        let rel = (*nx as u64).min(shift + *ny as u64) as u32;
        let modulus = pow_p(self.p, rel);
        let shifted = if shift >= rel as u64 {
            BigUint::zero()
        } else {
            uy * pow_p(self.p, shift as u32)
        };
        let mut sum = (ux + shifted) % &modulus;
        if sum.is_zero() {
            return Err(PAdicError::PrecisionExhausted);
        }
        let mut t = 0u32;
        let pb = BigUint::from(self.p);
        while (&sum % &pb).is_zero() {
            sum /= &pb;
            t += 1;
        }
        Ok(PAdicScalar {
            p: self.p,
            repr: Repr::Unit {
                valuation: vx + t as i64,
                unit: sum,
                precision: rel - t,
            },
            exact: None,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<PAdicScalar, PAdicError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<PAdicScalar, PAdicError> {
        self.same_prime(other)?;
        if self.is_zero() || other.is_zero() {
            return PAdicScalar::zero(self.p);
        }
        if let (Some(x), Some(y)) = (&self.exact, &other.exact) {
            return PAdicScalar::from_rational(&(x * y), self.p, self.exact_precision(other));
        }
        let (
            Repr::Unit {
                valuation: vx,
                unit: ux,
                precision: nx,
            },
            Repr::Unit {
                valuation: vy,
                unit: uy,
                precision: ny,
            },
        ) = (&self.repr, &other.repr)
        else {
            unreachable!("zeros handled above")
        };
        let precision = (*nx).min(*ny);
        Ok(PAdicScalar {
            p: self.p,
            repr: Repr::Unit {
                valuation: vx + vy,
                unit: (ux * uy) % pow_p(self.p, precision),
                precision,
            },
            exact: None,
        })
    }

    pub fn inv(&self) -> Result<PAdicScalar, PAdicError> {
        match (&self.repr, &self.exact) {
            (Repr::Zero, _) => Err(PAdicError::DivisionByZero),
            (Repr::Unit { precision, .. }, Some(r)) => {
                PAdicScalar::from_rational(&r.recip(), self.p, *precision)
            }
            (
                Repr::Unit {
                    valuation,
                    unit,
                    precision,
                },
                None,
            ) => {
                let modulus = pow_p(self.p, *precision);
                Ok(PAdicScalar {
                    p: self.p,
                    repr: Repr::Unit {
                        valuation: -valuation,
                        unit: unit.modinv(&modulus).expect("unit part is a unit"),
                        precision: *precision,
                    },
                    exact: None,
                })
            }
        }
    }

    /// Image in Z(p^n) of a scalar with nonnegative valuation.
    pub fn reduce_level(&self, n: u32) -> Result<u64, PAdicError> {
        let level = (self.p as u128)
            .checked_pow(n)
            .filter(|&l| l <= u64::MAX as u128)
            .ok_or(PAdicError::LevelTooLarge(self.p, n))? as u64;
        match &self.repr {
            Repr::Zero => Ok(0),
            Repr::Unit {
                valuation,
                unit,
                precision,
            } => {
                if *valuation < 0 {
                    return Err(PAdicError::NegativeValuation(*valuation));
                }
                let known = valuation + *precision as i64;
                if known < n as i64 {
                    return Err(PAdicError::InsufficientPrecision {
                        needed: n as i64,
                        available: known,
                    });
                }
                if *valuation >= n as i64 {
                    return Ok(0);
                }
                let value = pow_p(self.p, *valuation as u32) * unit % BigUint::from(level);
                Ok(value.to_u64().expect("reduced below p^n"))
            }
        }
    }

    /// Parses `"12"`, `"-1/3"`, `"0.5"` (exact) or `"3^-1*(1 2 0)"` (inexact,
    /// digits least significant first).
    pub fn parse(text: &str, p: u64) -> Result<PAdicScalar, PAdicError> {
        let s = text.trim();
        let Some((head, tail)) = s.split_once('*') else {
            let r = parse_rational(s).map_err(|e| PAdicError::Parse(e.to_string()))?;
            return PAdicScalar::from_rational(&r, p, DEFAULT_PRECISION);
        };
        let bad = || PAdicError::Parse(text.to_string());
        let (base, exp) = head.trim().split_once('^').ok_or_else(bad)?;
        if base.trim().parse::<u64>().map_err(|_| bad())? != p {
            return Err(PAdicError::PrimeMismatch(
                base.trim().parse().unwrap_or(0),
                p,
            ));
        }
        let valuation: i64 = exp.trim().parse().map_err(|_| bad())?;
        let mut body = tail.trim();
        if let Some(idx) = body.rfind(")_") {
            body = &body[..idx + 1];
        }
        let body = body.trim_start_matches('(').trim_end_matches(')').trim();
        let digits: Vec<u64> = if body.contains(char::is_whitespace) {
            body.split_whitespace()
                .map(|d| d.parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        } else {
            body.chars()
                .map(|c| c.to_digit(10).map(u64::from).ok_or_else(bad))
                .collect::<Result<_, _>>()?
        };
        PAdicScalar::from_digits(p, valuation, &digits)
    }
}

impl fmt::Display for PAdicScalar {
    /// `p^v * (d0 d1 d2 ...)_p ± O(p^(v+N))`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Unit {
                valuation,
                precision,
                ..
            } => {
                let digits: Vec<String> = self.digits().iter().map(u64::to_string).collect();
                write!(
                    f,
                    "{p}^{valuation} * ({})_{p} ± O({p}^{})",
                    digits.join(" "),
                    valuation + *precision as i64,
                    p = self.p
                )
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PAdicJson {
    p: u64,
    val: Option<i64>,
    digits: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

impl Serialize for PAdicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PAdicJson {
            p: self.p,
            val: self.valuation(),
            digits: self.digits(),
            exact: self.exact.as_ref().map(format_rational),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PAdicScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PAdicJson::deserialize(deserializer)?;
        let scalar = match (&raw.exact, raw.val) {
            (Some(text), _) => {
                let r = parse_rational(text).map_err(D::Error::custom)?;
                let precision = (raw.digits.len() as u32).max(1);
                PAdicScalar::from_rational(&r, raw.p, precision)
            }
            (None, None) => PAdicScalar::zero(raw.p),
            (None, Some(v)) => PAdicScalar::from_digits(raw.p, v, &raw.digits),
        };
        scalar.map_err(D::Error::custom)
    }
}

/// Classifies `(a2, a3, b2, b3)` by the determinant `a2·b3 − a3·b2` and, on
/// the equal-ratio wall, by comparing valuations of `a2` and `a3`.
pub fn classify_qp_quad(
    a2: &PAdicScalar,
    a3: &PAdicScalar,
    b2: &PAdicScalar,
    b3: &PAdicScalar,
) -> Result<PAdicQuadClass, PAdicError> {
    for (name, c) in [("a2", a2), ("a3", a3), ("b2", b2), ("b3", b3)] {
        a2.same_prime(c)?;
        if c.is_zero() {
            return Err(PAdicError::ZeroCoefficient(name));
        }
    }
    let det = a2.mul(b3)?.sub(&a3.mul(b2)?)?;
    if !det.is_zero() {
        return Ok(PAdicQuadClass::DetNonzero);
    }
    if a2.valuation() != a3.valuation() {
        Ok(PAdicQuadClass::EqualRatioDistinctNorms)
    } else {
        Ok(PAdicQuadClass::EqualRatioEqualNorms)
    }
}

/// Smallest `k ≥ 0` such that `p^k·x` has nonnegative valuation for every
/// `x` in `scalars`.
pub fn integral_scaling_exponent<'a>(scalars: impl IntoIterator<Item = &'a PAdicScalar>) -> u32 {
    scalars
        .into_iter()
        .filter_map(PAdicScalar::valuation)
        .map(|v| (-v).max(0) as u32)
        .max()
        .unwrap_or(0)
}

/// `p^k` as an exact scalar.
pub fn prime_power(p: u64, k: i64) -> Result<PAdicScalar, PAdicError> {
    let base = BigRational::from_integer(BigInt::from(p));
    let r = if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base, (-k) as usize).recip()
    };
    PAdicScalar::from_rational(&r, p, DEFAULT_PRECISION)
}

impl PAdicScalar {
    pub fn one(p: u64) -> Result<Self, PAdicError> {
        PAdicScalar::from_rational(&BigRational::one(), p, DEFAULT_PRECISION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn int(n: i64, p: u64) -> PAdicScalar {
        PAdicScalar::from_i64(n, p).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn one_plus_two_is_three_over_three() {
        let one = PAdicScalar::from_digits(3, 0, &[1, 0, 0, 0]).unwrap();
        let two = PAdicScalar::from_digits(3, 0, &[2, 0, 0, 0]).unwrap();
        let s = one.add(&two).unwrap();
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.digits(), vec![1, 0, 0]);
        assert_eq!(s.precision(), Some(3));

        let s = int(1, 3).add(&int(2, 3)).unwrap();
        assert_eq!(s, int(3, 3));
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.digits()[0], 1);
    }

    #[test]
    fn norms() {
        assert_eq!(int(12, 3).norm(), q(1, 3));
        let third = PAdicScalar::from_rational(&q(1, 3), 3, 8).unwrap();
        assert_eq!(third.norm(), q(3, 1));
        assert_eq!(PAdicScalar::zero(5).unwrap().norm(), q(0, 1));
        assert_eq!(int(-7, 7).norm(), q(1, 7));
    }

    #[test]
    fn negation_cancels_to_the_zero_flag_for_exact_values() {
        for n in [1i64, -4, 12, 250] {
            let x = int(n, 5);
            let s = x.neg().add(&x).unwrap();
            assert!(s.is_zero());
        }
        let third = PAdicScalar::from_rational(&q(-2, 9), 3, 10).unwrap();
        assert!(third.add(&third.neg()).unwrap().is_zero());
    }

    #[test]
    fn inexact_cancellation_is_reported() {
        let x = PAdicScalar::from_digits(5, 2, &[3, 1, 4, 1]).unwrap();
        assert_eq!(x.add(&x.neg()), Err(PAdicError::PrecisionExhausted));
    }

    #[test]
    fn negative_integers_have_trailing_high_digits() {
        let m1 = int(-1, 3);
        assert!(m1.digits().iter().all(|&d| d == 2));
        assert_eq!(m1.digits().len(), DEFAULT_PRECISION as usize);
    }

    #[test]
    fn inverse_and_division_by_zero() {
        assert_eq!(
            PAdicScalar::zero(3).unwrap().inv(),
            Err(PAdicError::DivisionByZero)
        );
        let x = int(18, 3);
        let inv = x.inv().unwrap();
        assert_eq!(inv.valuation(), Some(-2));
        assert_eq!(x.mul(&inv).unwrap(), PAdicScalar::one(3).unwrap());
    }

    #[test]
    fn random_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [3u64, 5, 7] {
            for _ in 0..200 {
                let v = rng.gen_range(-4..5);
                let x = PAdicScalar::sample(p, v, DEFAULT_PRECISION, &mut rng).unwrap();
                let one = x.mul(&x.inv().unwrap()).unwrap();
                assert_eq!(one.valuation(), Some(0));
                let mut expected = vec![0; DEFAULT_PRECISION as usize];
                expected[0] = 1;
                assert_eq!(one.digits(), expected);
            }
        }
    }

    #[test]
    fn precision_is_propagated() {
        let x = PAdicScalar::from_digits(3, 0, &[1, 2, 0, 1, 1]).unwrap();
        let y = PAdicScalar::from_digits(3, 2, &[2, 2]).unwrap();
        assert_eq!(x.mul(&y).unwrap().precision(), Some(2));
        // absolute precision min(0+5, 2+2) = 4 digits relative to valuation 0
        assert_eq!(x.add(&y).unwrap().precision(), Some(4));
        // 1 + 2 = 3 consumes one digit
        let w = PAdicScalar::from_digits(3, 0, &[1, 0, 0, 1, 1]).unwrap();
        let z = PAdicScalar::from_digits(3, 0, &[2, 0, 0, 0, 0]).unwrap();
        let s = w.add(&z).unwrap();
        assert_eq!((s.valuation(), s.precision()), (Some(1), Some(4)));
    }

    #[test]
    fn classification_examples() {
        let c = |a: [i64; 4], p| {
            let s = a.map(|n| int(n, p));
            classify_qp_quad(&s[0], &s[1], &s[2], &s[3]).unwrap()
        };
        assert_eq!(c([1, 3, 1, 3], 3), PAdicQuadClass::EqualRatioDistinctNorms);
        assert_eq!(c([1, 2, 2, 1], 5), PAdicQuadClass::DetNonzero);
        assert_eq!(c([1, 2, 2, 4], 5), PAdicQuadClass::EqualRatioEqualNorms);
        let s = [1, 0, 1, 1].map(|n| int(n, 5));
        assert_eq!(
            classify_qp_quad(&s[0], &s[1], &s[2], &s[3]),
            Err(PAdicError::ZeroCoefficient("a3"))
        );
    }

    #[test]
    fn unprovable_equal_ratio_is_an_error() {
        let a = PAdicScalar::from_digits(5, 0, &[1, 2, 3]).unwrap();
        let one = int(1, 5);
        assert_eq!(
            classify_qp_quad(&a, &a, &one, &one),
            Err(PAdicError::PrecisionExhausted)
        );
    }

    #[test]
    fn reduce_level_examples() {
        assert_eq!(int(12, 3).reduce_level(2), Ok(3));
        assert_eq!(PAdicScalar::zero(3).unwrap().reduce_level(4), Ok(0));
        assert_eq!(int(-1, 3).reduce_level(3), Ok(26));
        let third = PAdicScalar::from_rational(&q(1, 3), 3, 8).unwrap();
        assert_eq!(
            third.reduce_level(2),
            Err(PAdicError::NegativeValuation(-1))
        );
        let short = PAdicScalar::from_digits(3, 0, &[1, 1]).unwrap();
        assert!(matches!(
            short.reduce_level(3),
            Err(PAdicError::InsufficientPrecision { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let k = rng.gen_range(0..125i64);
            assert_eq!(int(k, 5).reduce_level(3), Ok(k as u64));
        }
    }

    #[test]
    fn text_form_and_parse() {
        let x = PAdicScalar::from_digits(3, 1, &[1, 0, 2]).unwrap();
        assert_eq!(x.to_string(), "3^1 * (1 0 2)_3 ± O(3^4)");
        assert_eq!(PAdicScalar::parse("3^1*(1 0 2)", 3).unwrap(), x);
        assert_eq!(PAdicScalar::parse("3^1*102", 3).unwrap(), x);
        assert_eq!(PAdicScalar::parse("3^1 * (1 0 2)_3", 3).unwrap(), x);
        assert_eq!(PAdicScalar::parse("12", 3).unwrap(), int(12, 3));
        assert_eq!(
            PAdicScalar::parse("-1/3", 3).unwrap().exact_value(),
            Some(&q(-1, 3))
        );
        assert!(PAdicScalar::parse("5^1*(1)", 3).is_err());
        assert!(PAdicScalar::parse("3^1*(1 3)", 3).is_err());
        assert!(PAdicScalar::parse("abc", 3).is_err());
        assert_eq!(PAdicScalar::zero(3).unwrap().to_string(), "0");
    }

    #[test]
    fn json_shape() {
        let x = PAdicScalar::from_digits(5, -1, &[2, 4]).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, r#"{"p":5,"val":-1,"digits":[2,4]}"#);
        assert_eq!(serde_json::from_str::<PAdicScalar>(&text).unwrap(), x);
        let z = serde_json::to_string(&PAdicScalar::zero(5).unwrap()).unwrap();
        assert_eq!(z, r#"{"p":5,"val":null,"digits":[],"exact":"0"}"#);
        let e = int(10, 5);
        assert_eq!(
            serde_json::from_str::<PAdicScalar>(&serde_json::to_string(&e).unwrap()).unwrap(),
            e
        );
    }

    #[test]
    fn rejects_composite_primes_and_mixed_primes() {
        assert_eq!(PAdicScalar::from_i64(3, 4), Err(PAdicError::NotPrime(4)));
        assert_eq!(
            int(1, 3).add(&int(1, 5)),
            Err(PAdicError::PrimeMismatch(3, 5))
        );
    }

    #[test]
    fn scaling_exponent() {
        let xs = [
            PAdicScalar::from_rational(&q(1, 9), 3, 8).unwrap(),
            int(2, 3),
            PAdicScalar::from_rational(&q(5, 3), 3, 8).unwrap(),
        ];
        assert_eq!(integral_scaling_exponent(&xs), 2);
        let scaled = xs[0].mul(&prime_power(3, 2).unwrap()).unwrap();
        assert_eq!(scaled.valuation(), Some(0));
    }
}
