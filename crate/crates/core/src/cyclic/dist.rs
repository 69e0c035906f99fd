use super::{CyclicError, CyclicModulus};
use crate::numfmt::{format_rational, parse_rational, rational_to_f64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Sub};

/// Scalar type backing a mass vector.
///
/// `f64` compares within a tolerance, [`BigRational`] compares exactly.
pub trait Mass:
    Clone
    + fmt::Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn to_f64(&self) -> f64;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Mass-level equality. Exact backings ignore `tol`.
    fn close_to(&self, other: &Self, tol: f64) -> bool;
    fn sums_to_one(sum: &Self) -> bool;
    fn to_decimal_string(&self) -> String;
    fn parse_decimal(s: &str) -> Option<Self>;
}

impl Mass for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn sums_to_one(sum: &Self) -> bool {
        (sum - 1.0).abs() <= 1e-12
    }

    fn to_decimal_string(&self) -> String {
        format!("{self}")
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        match s.trim().split_once('/') {
            Some(_) => parse_rational(s).ok().map(|r| rational_to_f64(&r)),
            None => s.trim().parse().ok(),
        }
    }
}

impl Mass for BigRational {
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn sums_to_one(sum: &Self) -> bool {
        sum.is_one()
    }

    fn to_decimal_string(&self) -> String {
        format_rational(self)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        parse_rational(s).ok()
    }
}

/// A probability vector on Z(m).
#[derive(Debug, Clone, PartialEq)]
pub struct DistZm<T = f64> {
    modulus: CyclicModulus,
    probs: Vec<T>,
}

impl<T: Mass> DistZm<T> {
    pub fn new(modulus: CyclicModulus, probs: Vec<T>) -> Result<Self, CyclicError> {
        if probs.len() != modulus.order() {
            return Err(CyclicError::LengthMismatch {
                expected: modulus.order(),
                got: probs.len(),
            });
        }
        if let Some(x) = probs.iter().position(|p| *p < T::zero()) {
            return Err(CyclicError::NotADistribution(format!(
                "negative mass {:?} at {x}",
                probs[x]
            )));
        }
        let total = probs.iter().cloned().fold(T::zero(), |acc, p| acc + p);
        if !T::sums_to_one(&total) {
            return Err(CyclicError::NotADistribution(format!(
                "masses sum to {:?}",
                total
            )));
        }
        Ok(DistZm { modulus, probs })
    }

    /// Degenerate distribution `E_a`.
    pub fn point_mass(modulus: CyclicModulus, a: usize) -> Self {
        let mut probs = vec![T::zero(); modulus.order()];
        probs[a % modulus.order()] = T::one();
        DistZm { modulus, probs }
    }

    pub fn uniform(modulus: CyclicModulus) -> Self {
        let m = modulus.get() as i64;
        DistZm {
            modulus,
            probs: vec![T::from_ratio(1, m); modulus.order()],
        }
    }

    pub fn modulus(&self) -> CyclicModulus {
        self.modulus
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn mass(&self, x: usize) -> &T {
        &self.probs[x % self.probs.len()]
    }

    /// `self ∗ E_alpha`, i.e. the law of `ξ + alpha`.
    pub fn shifted(&self, alpha: usize) -> Self {
        let m = self.modulus;
        let probs = (0..m.order())
            .map(|x| self.probs[m.sub(x, alpha)].clone())
            .collect();
        DistZm { modulus: m, probs }
    }

    pub fn to_f64(&self) -> DistZm<f64> {
        DistZm {
            modulus: self.modulus,
            probs: self.probs.iter().map(Mass::to_f64).collect(),
        }
    }

    pub fn close_to(&self, other: &Self, tol: f64) -> bool {
        self.modulus == other.modulus
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(a, b)| a.close_to(b, tol))
    }
}

impl DistZm<f64> {
    /// Builds a distribution from nonnegative weights by normalizing them.
    pub fn from_weights(modulus: CyclicModulus, weights: &[f64]) -> Result<Self, CyclicError> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(CyclicError::NotADistribution(
                "weights must be nonnegative with positive sum".into(),
            ));
        }
        DistZm::new(modulus, weights.iter().map(|w| w / total).collect())
    }

    /// Accepts masses in `[-tol, 0)` as rounding noise and clamps them.
    pub fn from_recovered(
        modulus: CyclicModulus,
        mut probs: Vec<f64>,
        tol: f64,
    ) -> Result<Self, CyclicError> {
        for (x, p) in probs.iter_mut().enumerate() {
            if *p < -tol || !p.is_finite() {
                return Err(CyclicError::NotADistribution(format!(
                    "recovered mass {p} at {x}"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol.max(1e-12) {
            return Err(CyclicError::NotADistribution(format!(
                "recovered masses sum to {total}"
            )));
        }
        Ok(DistZm { modulus, probs })
    }
}

impl DistZm<BigRational> {
    /// Exact rational distribution from `(numerator, denominator)` pairs.
    pub fn from_fractions(
        modulus: CyclicModulus,
        fractions: &[(i64, i64)],
    ) -> Result<Self, CyclicError> {
        DistZm::new(
            modulus,
            fractions
                .iter()
                .map(|&(n, d)| BigRational::from_ratio(n, d))
                .collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct DistJson {
    m: u64,
    probs: Vec<String>,
}

impl<T: Mass> Serialize for DistZm<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DistJson {
            m: self.modulus.get(),
            probs: self.probs.iter().map(Mass::to_decimal_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Mass> Deserialize<'de> for DistZm<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = DistJson::deserialize(deserializer)?;
        let modulus = CyclicModulus::new(raw.m).map_err(D::Error::custom)?;
        let probs = raw
            .probs
            .iter()
            .map(|s| T::parse_decimal(s).ok_or_else(|| D::Error::custom(format!("bad mass {s:?}"))))
            .collect::<Result<Vec<T>, _>>()?;
        DistZm::new(modulus, probs).map_err(D::Error::custom)
    }
}

/// `result[x] = Σ_t a[t]·b[x − t]`.
pub fn convolve<T: Mass>(a: &DistZm<T>, b: &DistZm<T>) -> Result<DistZm<T>, CyclicError> {
    let m = check_same(a.modulus, b.modulus)?;
    let probs = (0..m.order())
        .map(|x| {
            (0..m.order()).fold(T::zero(), |acc, t| {
                acc + a.probs[t].clone() * b.probs[m.sub(x, t)].clone()
            })
        })
        .collect();
    Ok(DistZm { modulus: m, probs })
}

/// Least `alpha` with `nu = mu ∗ E_alpha`, comparing masses within `1e-10`
/// for float backing and exactly for rational backing.
pub fn shift_equivalent<T: Mass>(
    mu: &DistZm<T>,
    nu: &DistZm<T>,
) -> Result<Option<usize>, CyclicError> {
    shift_equivalent_within(mu, nu, crate::DEFAULT_TOLERANCE)
}

pub fn shift_equivalent_within<T: Mass>(
    mu: &DistZm<T>,
    nu: &DistZm<T>,
    tol: f64,
) -> Result<Option<usize>, CyclicError> {
    let m = check_same(mu.modulus, nu.modulus)?;
    Ok((0..m.order()).find(|&alpha| {
        (0..m.order()).all(|x| nu.probs[x].close_to(&mu.probs[m.sub(x, alpha)], tol))
    }))
}

fn check_same(a: CyclicModulus, b: CyclicModulus) -> Result<CyclicModulus, CyclicError> {
    if a != b {
        return Err(CyclicError::ModulusMismatch(a.get(), b.get()));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64) -> CyclicModulus {
        CyclicModulus::new(m).unwrap()
    }

    #[test]
    fn validates_masses() {
        assert!(DistZm::new(z(3), vec![0.5, 0.5, 0.0]).is_ok());
        assert!(matches!(
            DistZm::new(z(3), vec![0.5, 0.5]),
            Err(CyclicError::LengthMismatch { .. })
        ));
        assert!(DistZm::new(z(3), vec![1.5, -0.5, 0.0]).is_err());
        assert!(DistZm::new(z(3), vec![0.5, 0.4, 0.0]).is_err());
        assert!(DistZm::<BigRational>::from_fractions(z(3), &[(1, 3), (1, 3), (1, 4)]).is_err());
    }

    #[test]
    fn identity_and_point_masses() {
        let m = z(5);
        let mu = DistZm::from_weights(m, &[0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        let e0 = DistZm::point_mass(m, 0);
        assert!(convolve(&mu, &e0).unwrap().close_to(&mu, 1e-15));
        let e2: DistZm<BigRational> = DistZm::point_mass(m, 2);
        let e4: DistZm<BigRational> = DistZm::point_mass(m, 4);
        assert_eq!(convolve(&e2, &e4).unwrap(), DistZm::point_mass(m, 1));
    }

    #[test]
    fn convolution_rejects_mismatch() {
        let a: DistZm = DistZm::uniform(z(3));
        let b: DistZm = DistZm::uniform(z(5));
        assert_eq!(convolve(&a, &b), Err(CyclicError::ModulusMismatch(3, 5)));
        assert!(shift_equivalent(&a, &b).is_err());
    }

    #[test]
    fn finds_least_shift() {
        let m = z(5);
        let mu = DistZm::<BigRational>::from_fractions(
            m,
            &[(1, 10), (2, 10), (3, 10), (1, 10), (3, 10)],
        )
        .unwrap();
        assert_eq!(shift_equivalent(&mu, &mu).unwrap(), Some(0));
        assert_eq!(shift_equivalent(&mu, &mu.shifted(2)).unwrap(), Some(2));
        // uniform is invariant under every shift; the least one is reported
        let u: DistZm<BigRational> = DistZm::uniform(m);
        assert_eq!(shift_equivalent(&u, &u.shifted(3)).unwrap(), Some(0));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let mu = DistZm::<BigRational>::from_fractions(z(3), &[(8, 15), (7, 30), (7, 30)]).unwrap();
        let text = serde_json::to_string(&mu).unwrap();
        assert_eq!(text, r#"{"m":3,"probs":["8/15","7/30","7/30"]}"#);
        let back: DistZm<BigRational> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, mu);

        let f: DistZm = serde_json::from_str(r#"{"m":2,"probs":["0.25","0.75"]}"#).unwrap();
        assert_eq!(f.probs(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<DistZm>(r#"{"m":2,"probs":["0.25","0.7"]}"#).is_err());
    }
}
