use lzlab_core::padic::{classify_qp_quad, PAdicQuadClass, PAdicScalar, DEFAULT_PRECISION};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

/// Random inexact scalar with valuation in `[-4, 4]`.
fn scalar(p: u64) -> impl Strategy<Value = PAdicScalar> {
    (-4i64..=4, any::<u64>()).prop_map(move |(v, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PAdicScalar::sample(p, v, DEFAULT_PRECISION, &mut rng).unwrap()
    })
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (-400i64..=400, 1i64..=400)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn exact(r: &BigRational, p: u64) -> PAdicScalar {
    PAdicScalar::from_rational(r, p, DEFAULT_PRECISION).unwrap()
}

/// Valuation of a nonzero rational by repeated division.
fn valuation_oracle(r: &BigRational, p: u64) -> i64 {
    let count = |mut n: BigInt| {
        let pb = BigInt::from(p);
        let mut k = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    count(r.numer().clone()) - count(r.denom().clone())
}

proptest! {
    #[test]
    fn norm_is_multiplicative((x, y) in prime().prop_flat_map(|p| (scalar(p), scalar(p)))) {
        prop_assert_eq!(x.mul(&y).unwrap().norm(), x.norm() * y.norm());
    }

    #[test]
    fn norm_is_ultrametric((x, y) in prime().prop_flat_map(|p| (scalar(p), scalar(p)))) {
        let sum = match x.add(&y) {
            Ok(s) => s,
            // total cancellation inside the tracked digits; nothing to compare
            Err(_) => return Ok(()),
        };
        let (nx, ny) = (x.norm(), y.norm());
        let max = if nx > ny { nx.clone() } else { ny.clone() };
        prop_assert!(sum.norm() <= max);
        if nx != ny {
            prop_assert_eq!(sum.norm(), max);
        }
    }

    #[test]
    fn inverse_cancels(x in prime().prop_flat_map(scalar)) {
        let one = x.mul(&x.inv().unwrap()).unwrap();
        prop_assert_eq!(one.valuation(), Some(0));
        prop_assert_eq!(one.digits()[0], 1);
        prop_assert!(one.digits()[1..].iter().all(|&d| d == 0));
    }

    #[test]
    fn exact_norm_matches_valuation_oracle(p in prime(), r in nonzero_rational()) {
        let x = exact(&r, p);
        prop_assert_eq!(x.valuation(), Some(valuation_oracle(&r, p)));
        prop_assert_eq!(x.exact_value(), Some(&r));
    }

    #[test]
    fn reduce_level_is_a_ring_homomorphism(
        p in prime(),
        a in 0i64..100_000,
        b in 0i64..100_000,
        n in 1u32..6,
    ) {
        let pn = p.pow(n);
        let (x, y) = (PAdicScalar::from_i64(a, p).unwrap(), PAdicScalar::from_i64(b, p).unwrap());
        let rx = x.reduce_level(n).unwrap();
        let ry = y.reduce_level(n).unwrap();
        prop_assert_eq!(rx, a as u64 % pn);
        prop_assert_eq!(x.add(&y).unwrap().reduce_level(n).unwrap(), (rx + ry) % pn);
        prop_assert_eq!(x.mul(&y).unwrap().reduce_level(n).unwrap(), (rx * ry) % pn);
    }

    #[test]
    fn quad_class_is_invariant_under_row_scaling(
        p in prime(),
        q in [nonzero_rational(), nonzero_rational(), nonzero_rational(), nonzero_rational()],
        c in nonzero_rational(),
        d in nonzero_rational(),
        equal_ratio in any::<bool>(),
    ) {
        let [a2, a3, b2, mut b3] = q;
        if equal_ratio {
            b3 = &a3 * &b2 / &a2;
        }
        let base = classify_qp_quad(&exact(&a2, p), &exact(&a3, p), &exact(&b2, p), &exact(&b3, p)).unwrap();
        let scaled = classify_qp_quad(
            &exact(&(&c * &a2), p),
            &exact(&(&c * &a3), p),
            &exact(&(&d * &b2), p),
            &exact(&(&d * &b3), p),
        ).unwrap();
        prop_assert_eq!(base, scaled);
        prop_assert_eq!(base == PAdicQuadClass::DetNonzero, !equal_ratio);
    }
}

#[test]
fn exact_cancellation_is_zero_not_exhausted() {
    let x = exact(&BigRational::new(5.into(), 7.into()), 3);
    assert!(x.add(&x.neg()).unwrap().is_zero());
    assert!(x.sub(&x).unwrap().is_zero());
    assert!(PAdicScalar::one(3)
        .unwrap()
        .add(&PAdicScalar::zero(3).unwrap())
        .unwrap()
        .norm()
        .is_one());
}
