use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::dd::DoubleDouble;
use crate::error::Error;
use crate::modular::{is_prime, mod_inverse};

type Q = Cyclotomic<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn zeta(m: u64, j: i64) -> Q {
    Q::root_power(m, j).unwrap()
}

/// Σ_x ζ_p^{a x + x̄} by summing root powers one at a time.
fn kl_oracle(a: i64, p: u64) -> Q {
    let mut acc = Q::zero(p).unwrap();
    for x in 1..p as i64 {
        let xi = mod_inverse(x, p).unwrap() as i64;
        acc = &acc + &zeta(p, a * x + xi);
    }
    acc
}

#[test]
fn root_power_examples() {
    assert_eq!(zeta(4, 2), Q::from_scalar(4, q(-1)).unwrap());
    assert_eq!(zeta(5, 7), zeta(5, 2));
    assert_eq!(zeta(3, 2).coeffs(), &[q(-1), q(-1)]);
}

#[test]
fn arithmetic_examples() {
    let s = &(&zeta(3, 1) + &zeta(3, 2)) + &Q::one(3).unwrap();
    assert!(s.is_zero());
    assert_eq!(&zeta(4, 1) * &zeta(4, 1), Q::from_scalar(1, q(-1)).unwrap());
    let a = &zeta(5, 1) + &zeta(5, 4);
    let b = &zeta(5, 2) + &zeta(5, 3);
    assert_eq!((&a * &b).as_scalar(), Some(q(-1)));
}

#[test]
fn embed_examples() {
    assert_eq!(zeta(3, 1).embed(6).unwrap().coeffs(), zeta(6, 2).coeffs());
    let five = Q::from_scalar(1, q(5)).unwrap();
    assert_eq!(five.embed(12).unwrap().as_scalar(), Some(q(5)));
    let a = &zeta(5, 1) + &zeta(5, 4);
    let e = a.embed(15).unwrap();
    assert_eq!(e.conductor(), 15);
    assert_eq!(e, a);
    assert_eq!(zeta(4, 1).embed(6), Err(Error::InvalidEmbedding { from: 4, to: 6 }));
}

#[test]
fn galois_examples() {
    assert_eq!(zeta(5, 1).galois(2).unwrap(), zeta(5, 2));
    let r = Q::from_scalar(7, BigRational::new(3.into(), 7.into())).unwrap();
    assert_eq!(r.galois(3).unwrap(), r);
    assert_eq!(kl_oracle(1, 5).galois(2).unwrap(), kl_oracle(4, 5));
    assert!(matches!(zeta(6, 1).galois(3), Err(Error::NotUnit { .. })));
}

#[test]
fn rationality_examples() {
    let s = &(&Q::one(3).unwrap() + &zeta(3, 1)) + &zeta(3, 2);
    assert_eq!(s.as_scalar(), Some(q(0)));
    assert_eq!(zeta(8, 1).as_scalar(), None);
    assert_eq!(kl_oracle(1, 5).as_scalar(), None);
}

#[test]
fn ratio_examples() {
    let b = &zeta(5, 1) + &zeta(5, 2);
    let a = b.scale(&q(2));
    assert_eq!(a.rational_ratio(&b).unwrap(), Some(q(2)));
    let k1 = kl_oracle(1, 7);
    assert_eq!(k1.rational_ratio(&k1).unwrap(), Some(q(1)));
    assert_eq!(k1.rational_ratio(&kl_oracle(4, 7)).unwrap(), None);
    assert_eq!(k1.rational_ratio(&Q::zero(7).unwrap()), Err(Error::DivisionByZero));
}

#[test]
fn valuation_examples() {
    let lambda = &zeta(7, 1) - &Q::one(7).unwrap();
    assert_eq!(lambda_valuation(&lambda, 7).unwrap().value(), Some(1));
    for p in [5u64, 7] {
        let pe = Q::from_scalar(p, q(p as i64)).unwrap();
        assert_eq!(lambda_valuation(&pe, p).unwrap().value(), Some(p as i64 - 1));
    }
    let s = &kl_oracle(1, 7) + &Q::one(7).unwrap();
    assert!(lambda_valuation(&s, 7).unwrap().value().unwrap() >= 1);
    assert_eq!(lambda_valuation(&Q::zero(7).unwrap(), 7).unwrap().numerator, Valuation::Infinite);
    assert!(matches!(lambda_valuation(&Q::one(6).unwrap(), 6), Err(Error::UnsupportedConductor(6))));
}

#[test]
fn valuation_reports_denominator() {
    let half = Q::from_scalar(5, BigRational::new(1.into(), 5.into())).unwrap();
    let v = lambda_valuation(&half, 5).unwrap();
    assert_eq!(v.numerator, Valuation::Finite(0));
    assert_eq!(v.denominator, 4);
    assert_eq!(v.value(), Some(-4));
}

/// Oracle route for division by λ: multiply by ∏_{j=2}^{p−1}(1 − ζ^j), then divide by ∓p.
fn valuation_by_cofactor(a: &Q, p: u64) -> u64 {
    let one = Q::one(p).unwrap();
    let mut mu = one.clone();
    for j in 2..p as i64 {
        mu = &mu * &(&one - &zeta(p, j));
    }
    let mut cur = a.clone();
    let mut v = 0;
    loop {
        let t = &cur * &mu;
        let next = t.map(|c| -c / q(p as i64));
        if !next.coeffs().iter().all(|c| c.is_integer()) {
            return v;
        }
        cur = next;
        v += 1;
    }
}

#[test]
fn valuation_matches_cofactor_route() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let lambda = &zeta(p, 1) - &Q::one(p).unwrap();
        // λ·(p/λ) = p, with p/λ = −∏_{j≥2}(1 − ζ^j)
        let one = Q::one(p).unwrap();
        let mut mu = one.clone();
        for j in 2..p as i64 {
            mu = &mu * &(&one - &zeta(p, j));
        }
        assert_eq!((&lambda * &mu).as_scalar(), Some(q(-(p as i64))));
        for a in [1i64, 2, 3] {
            for b in [1i64, 4] {
                let x = &(&zeta(p, a).scale(&q(b)) - &one) * &(&zeta(p, 2 * a) + &one.scale(&q(p as i64)));
                if x.is_zero() {
                    continue;
                }
                let direct = lambda_valuation(&x, p).unwrap().numerator.finite().unwrap();
                assert_eq!(direct, valuation_by_cofactor(&x, p), "p={p} a={a} b={b}");
            }
        }
    }
}

#[test]
fn complex_examples() {
    let (z, err) = zeta(4, 1).to_complex_bits(53).unwrap();
    assert!(err < 2f64.powi(-50));
    assert!((z.re.to_f64()).abs() < 2f64.powi(-50) && (z.im.to_f64() - 1.0).abs() < 2f64.powi(-50));
    let s = &(&Q::one(3).unwrap() + &zeta(3, 1)) + &zeta(3, 2);
    let z: Complex<DoubleDouble> = s.to_complex();
    assert!(z.re.abs().to_f64() < 2f64.powi(-50));
    let (k, _) = kl_oracle(1, 5).to_complex_bits(100).unwrap();
    let expect = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
    assert!((k.re.to_f64() - expect).abs() < 2f64.powi(-50));
    assert!(k.im.abs().to_f64() < 2f64.powi(-50));
    assert_eq!(zeta(4, 1).to_complex_bits(101), Err(Error::PrecisionUnsupported(101)));
}

#[test]
fn json_round_trip_is_bit_exact() {
    let a = &kl_oracle(3, 11).scale(&BigRational::new(BigInt::from(10).pow(40) + 7, 3.into())) + &zeta(11, 4);
    let s = serde_json::to_string(&a).unwrap();
    let b: Q = serde_json::from_str(&s).unwrap();
    assert_eq!(a.coeffs(), b.coeffs());
    assert_eq!(serde_json::to_string(&b).unwrap(), s);
    assert!(s.starts_with(r#"{"conductor":11,"coeffs":[["#));
    assert!(serde_json::from_str::<Q>(r#"{"conductor":5,"coeffs":[["1","1"]]}"#).is_err());
}

#[test]
fn fields_intersect_in_rationals() {
    // An element of both Q(ζ_5) and Q(ζ_7) embedded in Q(ζ_35) must be rational.
    let a = &zeta(5, 1) + &zeta(5, 4);
    let b = &zeta(7, 1) + &zeta(7, 6);
    assert_ne!(a, b);
    let r = &(&(&zeta(5, 1) + &zeta(5, 2)) + &zeta(5, 3)) + &zeta(5, 4);
    assert_eq!(r, Q::from_scalar(7, q(-1)).unwrap());
}

#[test]
fn integer_and_float_instantiations() {
    let a = Cyclotomic::<i64>::root_power(5, 3).unwrap();
    let b = Cyclotomic::<i64>::root_power(5, 4).unwrap();
    assert_eq!((&a * &b).coeffs(), Cyclotomic::<i64>::root_power(5, 2).unwrap().coeffs());
    let f = Cyclotomic::<f64>::root_power(8, 1).unwrap();
    let z: Complex<f64> = (&f * &f).to_complex();
    assert!((z.im - 1.0).abs() < 1e-12);
    let mut big = vec![0i64; 7];
    big[6] = i64::MAX;
    big[0] = -2;
    match Cyclotomic::<i64>::from_counts(7, big).unwrap() {
        Ok(_) => panic!("expected promotion"),
        Err(x) => assert_eq!(x.coeffs()[0], BigInt::from(-2) - BigInt::from(i64::MAX)),
    }
}

fn arb_elem(m: u64) -> impl Strategy<Value = Q> {
    let deg = cyclotomic_poly(m).unwrap().degree();
    prop::collection::vec((-9i64..10, 1i64..4), deg)
        .prop_map(move |v| Q::from_reduced(m, v.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect()).unwrap())
}

fn arb_triple() -> impl Strategy<Value = (Q, Q, Q)> {
    (1u64..=200).prop_flat_map(|m| (arb_elem(m), arb_elem(m), arb_elem(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms((a, b, c) in arb_triple()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn galois_is_a_ring_homomorphism(p in (2u64..=200).prop_filter("prime", |&p| is_prime(p)), u in 1i64..1000, seed in 0u64..1000) {
        prop_assume!(!(u as u64).is_multiple_of(p));
        let a = zeta(p, seed as i64).scale(&q(3)) + Q::one(p).unwrap();
        let b = zeta(p, (seed * 7 + 1) as i64) - zeta(p, 2);
        prop_assert_eq!((&a * &b).galois(u).unwrap(), &a.galois(u).unwrap() * &b.galois(u).unwrap());
        prop_assert_eq!((&a + &b).galois(u).unwrap(), &a.galois(u).unwrap() + &b.galois(u).unwrap());
        let s = zeta(p, 1).galois(u).unwrap();
        let mut pw = Q::one(p).unwrap();
        for _ in 0..p { pw = &pw * &s; }
        prop_assert_eq!(pw, Q::one(p).unwrap());
    }

    #[test]
    fn galois_composes(m in 3u64..60, u in 1i64..60, v in 1i64..60) {
        prop_assume!(crate::modular::gcd(u as u64, m) == 1 && crate::modular::gcd(v as u64, m) == 1);
        let a = &zeta(m, 1) + &zeta(m, 3).scale(&q(2));
        prop_assert_eq!(a.galois(u).unwrap().galois(v).unwrap(), a.galois(u * v).unwrap());
    }

    #[test]
    fn valuation_of_rational_integers(p in (2u64..=200).prop_filter("prime", |&p| is_prime(p)), unit in 1i64..50, e in 0u32..3) {
        prop_assume!(!(unit as u64).is_multiple_of(p));
        let n = BigInt::from(unit) * BigInt::from(p).pow(e);
        let x = Q::from_scalar(p, BigRational::from_integer(n)).unwrap();
        prop_assert_eq!(lambda_valuation(&x, p).unwrap().value(), Some(((p - 1) * e as u64) as i64));
    }

    #[test]
    fn rational_means_real(m in 1u64..80, r in -50i64..50, j in 0i64..80) {
        let w = &zeta(m, j) + &zeta(m, -j);
        let x = &(&w - &w) + &Q::from_scalar(m, q(r)).unwrap();
        prop_assert!(x.as_scalar().is_some());
        let (z, err) = x.to_complex_bits(100).unwrap();
        prop_assert!(z.im.abs().to_f64() <= err);
    }

    #[test]
    fn ratio_certifies_difference(a in arb_elem(12), r in -5i64..6) {
        prop_assume!(!a.is_zero());
        let b = a.scale(&q(r));
        if let Some(s) = b.rational_ratio(&a).unwrap() {
            prop_assert!((&b - &a.scale(&s)).is_zero());
        } else {
            prop_assert!(false, "scalar multiple not detected");
        }
    }

    #[test]
    fn embedding_commutes_with_arithmetic(m in 1u64..=40, k in 1u64..=3, a in 0i64..40, b in 0i64..40) {
        let m2 = m * k;
        prop_assume!(m2 <= 120);
        let x = &zeta(m, a) + &Q::one(m).unwrap();
        let y = &zeta(m, b) - &zeta(m, a + b);
        let lhs = &x.embed(m2).unwrap() * &y.embed(m2).unwrap();
        let rhs = (&x * &y).embed(m2).unwrap();
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }
}

#[test]
fn zero_is_detected_after_reduction() {
    let mut total = Q::zero(12).unwrap();
    for j in 0..12 {
        total = &total + &zeta(12, j);
    }
    assert!(total.is_zero());
    assert!(!BigRational::one().is_zero());
}
