use super::EngineError;
use crate::cyclic::{char_fn, is_prime, CyclicModulus, DistZm};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn check_epsilon(eps: &BigRational, p: u64) -> Result<(), EngineError> {
    let upper = BigRational::new(BigInt::one(), BigInt::from(p - 1));
    if eps.is_zero() || eps < &BigRational::zero() || eps >= &upper {
        return Err(EngineError::EpsilonOutOfRange(eps.to_string()));
    }
    Ok(())
}

fn check_odd_prime(p: u64) -> Result<(), EngineError> {
    if p == 2 || !is_prime(p) {
        return Err(EngineError::NotOddPrime(p));
    }
    Ok(())
}

/// Masses `((1 + s(p−1))/p, (1 − s)/p, …)` on Z(p): the distribution whose
/// CF is `1` at `0` and `s` elsewhere.
fn plus_minus_masses(p: u64, s: &BigRational) -> Vec<BigRational> {
    let pr = BigRational::from_integer(BigInt::from(p));
    let one = BigRational::one();
    let at_zero = (&one + s * (&pr - &one)) / &pr;
    let elsewhere = (&one - s) / &pr;
    std::iter::once(at_zero)
        .chain(std::iter::repeat_n(elsewhere, p as usize - 1))
        .collect()
}

/// Two distributions on Z(p) with CFs `(1, ε, …, ε)` and `(1, −ε, …, −ε)`.
///
/// Their ratio is `1` at `0` and `−1` elsewhere, so `f(a2·y)·f(a3·y) = 1`
/// for all units `a2, a3`, yet neither is a shift of the other.
pub fn build_counterexample_pr2(
    p: u64,
    eps: &BigRational,
) -> Result<(DistZm<BigRational>, DistZm<BigRational>), EngineError> {
    check_odd_prime(p)?;
    check_epsilon(eps, p)?;
    let m = CyclicModulus::new(p)?;
    Ok((
        DistZm::new(m, plus_minus_masses(p, eps))?,
        DistZm::new(m, plus_minus_masses(p, &-eps.clone()))?,
    ))
}

/// The ± pair realized on Z(pⁿ), together with the ratio table `ν̂/μ̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pr1Level {
    pub mu: DistZm<BigRational>,
    pub nu: DistZm<BigRational>,
    /// `f(y) = 1` if `p | y` and `−1` otherwise.
    pub f: Vec<Complex64>,
}

/// The Z(p) pair placed on the subgroup `p^(n−1)·Z(pⁿ)`.
///
/// `μ̂(y) = 1` when `p | y` and `ε` otherwise; `ν̂` swaps `ε` for `−ε`.
pub fn build_counterexample_pr1_level(
    p: u64,
    n: u32,
    eps: &BigRational,
) -> Result<Pr1Level, EngineError> {
    if !is_prime(p) {
        return Err(EngineError::NotPrime(p));
    }
    if p == 2 {
        return Err(EngineError::NotOddPrime(p));
    }
    let order = p
        .checked_pow(n)
        .filter(|&o| n >= 1 && o <= 1 << 20)
        .ok_or(EngineError::InvalidLevel(n))?;
    check_epsilon(eps, p)?;
    let m = CyclicModulus::new(order)?;
    let stride = (order / p) as usize;
    let embed = |masses: Vec<BigRational>| {
        let mut probs = vec![BigRational::zero(); order as usize];
        for (j, w) in masses.into_iter().enumerate() {
            probs[j * stride] = w;
        }
        DistZm::new(m, probs)
    };
    let mu = embed(plus_minus_masses(p, eps))?;
    let nu = embed(plus_minus_masses(p, &-eps.clone()))?;
    let f = char_fn(&nu).ratio(&char_fn(&mu))?;
    Ok(Pr1Level { mu, nu, f })
}

/// First `y` with `|f(a2·y)·f(a3·y) − 1| > tol`, with the residual.
pub fn product_identity_violation(
    f: &[Complex64],
    a2: u64,
    a3: u64,
    tol: f64,
) -> Option<(usize, f64)> {
    let m = f.len() as u64;
    (0..m).find_map(|y| {
        let r = (f[(a2 * y % m) as usize] * f[(a3 * y % m) as usize] - 1.0).norm();
        (r > tol).then_some((y as usize, r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::shift_equivalent;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pr2_masses_for_p3() {
        let (mu, nu) = build_counterexample_pr2(3, &q(3, 10)).unwrap();
        assert_eq!(mu.probs(), &[q(8, 15), q(7, 30), q(7, 30)]);
        assert_eq!(nu.probs(), &[q(2, 15), q(13, 30), q(13, 30)]);
        assert!(shift_equivalent(&mu, &nu).unwrap().is_none());
    }

    #[test]
    fn pr2_epsilon_range() {
        assert!(matches!(
            build_counterexample_pr2(5, &q(1, 4)),
            Err(EngineError::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            build_counterexample_pr2(5, &q(0, 1)),
            Err(EngineError::EpsilonOutOfRange(_))
        ));
        assert!(build_counterexample_pr2(5, &q(9, 40)).is_ok());
        assert_eq!(
            build_counterexample_pr2(2, &q(1, 4)),
            Err(EngineError::NotOddPrime(2))
        );
        assert_eq!(
            build_counterexample_pr2(9, &q(1, 10)),
            Err(EngineError::NotOddPrime(9))
        );
    }

    #[test]
    fn pr1_level_ratio_table() {
        let c = build_counterexample_pr1_level(3, 3, &q(3, 100)).unwrap();
        for (y, z) in c.f.iter().enumerate() {
            let want = if y % 3 == 0 { 1.0 } else { -1.0 };
            assert!((z - want).norm() < 1e-12, "y = {y}: {z}");
        }
        assert_eq!(product_identity_violation(&c.f, 1, 2, 1e-10), None);
        assert_eq!(product_identity_violation(&c.f, 3, 6, 1e-10), None);
        assert_eq!(
            product_identity_violation(&c.f, 1, 3, 1e-10).map(|v| v.0),
            Some(1)
        );
        assert!(shift_equivalent(&c.mu, &c.nu).unwrap().is_none());
    }

    #[test]
    fn pr1_level_rejects_bad_parameters() {
        assert_eq!(
            build_counterexample_pr1_level(4, 2, &q(1, 10)),
            Err(EngineError::NotPrime(4))
        );
        assert!(matches!(
            build_counterexample_pr1_level(3, 2, &q(1, 2)),
            Err(EngineError::EpsilonOutOfRange(_))
        ));
        assert_eq!(
            build_counterexample_pr1_level(3, 0, &q(1, 10)),
            Err(EngineError::InvalidLevel(0))
        );
    }
}
