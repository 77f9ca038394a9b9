use super::*;
use crate::expsums::kloosterman;
use crate::expsums::Backend;
use crate::modular::{factor, gcd, is_squarefree, mod_inverse};
use crate::sieve::primes_up_to;
use crate::value::Decision;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> Value {
    Value::rational(BigRational::new(n.into(), d.into()))
}

/// Counts at conductor `m` of an exact tensor whose scalar is an integer.
fn tensor_counts(t: &PureTensor, m: u64) -> Vec<i64> {
    assert!(t.scalar().is_integer());
    let mut acc = vec![0i64; m as usize];
    acc[0] = i64::try_from(t.scalar().numer()).unwrap();
    for b in t.blocks() {
        let c = b.conductor();
        assert_eq!(m % c, 0);
        let mut next = vec![0i64; m as usize];
        for (i, &x) in acc.iter().enumerate().filter(|(_, &x)| x != 0) {
            for (j, &y) in b.coeffs().iter().enumerate().filter(|(_, &y)| y != 0) {
                next[(i + j * (m / c) as usize) % m as usize] += x * y;
            }
        }
        acc = next;
    }
    acc
}

/// Whether Σ d_e ζ_m^e = 0 for square-free m: along each prime axis the
/// kernel of Z[Z/q] → Z[ζ_q] is spanned by the all-ones vector.
fn vanishes(m: u64, mut d: Vec<i64>) -> bool {
    assert!(is_squarefree(m));
    for (q, _) in factor(m) {
        let r = m / q;
        let q_inv = if r == 1 { 0 } else { mod_inverse(q as i64, r).unwrap() };
        let base = |e: u64| if r == 1 { 0 } else { q * ((e % r) * q_inv % r) };
        for e in 0..m {
            if e % q != 0 {
                d[e as usize] -= d[base(e) as usize];
            }
        }
        for e in (0..m).step_by(q as usize) {
            d[e as usize] = 0;
        }
    }
    d.iter().all(|&x| x == 0)
}

fn direct_counts(a: i64, b: i64, c: u64) -> Vec<i64> {
    sum_counts(&SumSpec::kloosterman(a, b, c)).unwrap().counts().to_vec()
}

fn diff(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

#[test]
fn vanishing_oracle_sanity() {
    // 1 + ζ_3 + ζ_3² = 0 seen at conductor 15, and ζ_15 ≠ 0.
    let mut d = vec![0i64; 15];
    for e in [0, 5, 10] {
        d[e] = 1;
    }
    assert!(vanishes(15, d.clone()));
    d[1] = 1;
    assert!(!vanishes(15, d));
    assert!(vanishes(1, vec![0]));
    assert!(!vanishes(1, vec![2]));
}

#[test]
fn product_rule_examples() {
    let f = MultFun::constant_one(Value::one()).unwrap();
    assert_eq!(f.eval(1).unwrap(), Value::one());
    assert_eq!(f.eval(30).unwrap().exact().unwrap().decide_eq(&PureTensor::one(), 10).unwrap(), Decision::Equal);
    let i = Value::from_cyc(&CycElem::root_power(4, 1).unwrap()).unwrap();
    let table = BTreeMap::from([(2, i.clone()), (3, Value::integer(2))]);
    let g = MultFun::table(1, 1, table, DefaultRule::One, EtaSeq::constant(Value::one()).unwrap()).unwrap();
    let two_i = i.mul(&Value::integer(2)).unwrap();
    assert_eq!(g.eval(6).unwrap().exact().unwrap().decide_eq(two_i.exact().unwrap(), 10).unwrap(), Decision::Equal);
    assert!(matches!(g.eval(12), Err(Error::NotSquarefree(12))));
    assert!(MultFun::table(1, 1, BTreeMap::from([(4, Value::one())]), DefaultRule::One, EtaSeq::constant(Value::one()).unwrap()).is_err());
}

#[test]
fn sharpness_k_small_values() {
    let f = MultFun::sharpness_k(1, 1, Value::one(), 2).unwrap();
    assert_eq!(f.prime_value(2).unwrap(), Value::one());
    let s6 = kloosterman(1, 1, 6, Backend::Exact).unwrap().exact().unwrap().clone();
    let f3 = f.prime_value(3).unwrap().exact().unwrap().to_cyc().unwrap();
    assert_eq!(f3, s6);
    let g = MultFun::sharpness_k(2, 3, Value::one(), 3).unwrap();
    assert_eq!(g.prime_value(2).unwrap(), Value::one());
    assert_eq!(g.prime_value(3).unwrap(), Value::one());
    assert!(MultFun::sharpness_k(1, 1, Value::zero(), 2).is_err());
    assert!(MultFun::sharpness_k(0, 1, Value::one(), 2).is_err());
    assert!(MultFun::sharpness_k(1, 1, Value::one(), 1).is_err());
}

#[test]
fn sharpness_k_guarantee() {
    for (a, b, eta, k) in [(1i64, 1i64, Value::one(), 2usize), (1, 1, Value::one(), 3), (2, 3, Value::one(), 2), (1, 2, rat(3, 2), 3)] {
        let f = MultFun::sharpness_k(a, b, eta.clone(), k).unwrap();
        let l = primorial(k).unwrap();
        for p in primes_up_to(1000).into_iter().filter(|&p| gcd(p, l) == 1) {
            let n = p * l;
            let rhs = eta.mul(&f.eval(n).unwrap()).unwrap();
            let got = tensor_counts(rhs.exact().unwrap(), n);
            let want = direct_counts(a, b, n);
            assert!(vanishes(n, diff(&want, &got)), "a={a} b={b} k={k} p={p}");
            let mut wrong = want.clone();
            wrong[1] += 1;
            assert!(!vanishes(n, diff(&wrong, &got)));
        }
    }
}

#[test]
fn sharpness_squarefree_guarantee() {
    for (a, b, eta) in [(1i64, 1i64, Value::one()), (2, 3, Value::one()), (1, 1, rat(3, 2)), (-1, 4, rat(-2, 1))] {
        let f = MultFun::sharpness_squarefree(a, b, eta.clone()).unwrap();
        for p in primes_up_to(1000) {
            let rhs = eta.mul(&f.eval(p).unwrap()).unwrap();
            assert!(vanishes(p, diff(&direct_counts(a, b, p), &tensor_counts(rhs.exact().unwrap(), p))), "p={p}");
        }
        let s2 = kloosterman(a, b, 2, Backend::Exact).unwrap().exact().unwrap().clone();
        let s3 = kloosterman(a, b, 3, Backend::Exact).unwrap().exact().unwrap().clone();
        let want = PureTensor::from_cyc(&(&s2 * &s3)).unwrap().mul(&PureTensor::from_cyc(&(eta.exact().unwrap().to_cyc().unwrap().inverse().unwrap())).unwrap().mul(&PureTensor::from_cyc(&eta.exact().unwrap().to_cyc().unwrap().inverse().unwrap()).unwrap()).unwrap()).unwrap();
        assert_eq!(f.eval(6).unwrap().exact().unwrap().decide_eq(&want, 100).unwrap(), Decision::Equal);
        assert_eq!(f.eval(1).unwrap(), Value::one());
    }
}

#[test]
fn kl_match_default_and_zero_values() {
    let table = BTreeMap::from([(5, Value::zero())]);
    let f = MultFun::table(2, 3, table, DefaultRule::KlMatch, EtaSeq::constant(Value::integer(2)).unwrap()).unwrap();
    assert_eq!(f.eval(15).unwrap().is_zero(), Some(true));
    let v = f.prime_value(7).unwrap();
    let want = kloosterman(2, 3, 7, Backend::Exact).unwrap().exact().unwrap().scale(&BigRational::new(1.into(), 2.into()));
    assert_eq!(v.exact().unwrap().to_cyc().unwrap(), want);
}

#[test]
fn expr_default_matches_family() {
    let f = MultFun::from_json(&json!({"default": "expr:salie,1,2,3/2"})).unwrap();
    let v = f.prime_value(11).unwrap().exact().unwrap().to_cyc().unwrap();
    let want = crate::expsums::salie(1, 2, 11, Backend::Exact).unwrap().exact().unwrap().scale(&BigRational::new(3.into(), 2.into()));
    assert_eq!(v, want);
    assert!(f.prime_value(2).is_err());
    let g = MultFun::from_json(&json!({"default": "expr:<birch-full,1,1,1>"})).unwrap();
    let w = g.prime_value(7).unwrap().exact().unwrap().to_cyc().unwrap();
    assert_eq!(w, crate::expsums::birch(1, 1, 7, Range::Full, Backend::Exact).unwrap().exact().unwrap().clone());
    assert!(MultFun::from_json(&json!({"default": "expr:gauss,1,1"})).is_err());
    assert!(MultFun::from_json(&json!({"default": "expr:kloosterman,1,1,0"})).is_err());
}

#[test]
fn schema_examples() {
    let f = MultFun::from_json(&json!({"2": "1", "default": "kl_ratio"})).unwrap();
    assert_eq!(f.prime_value(2).unwrap(), Value::one());
    assert!(matches!(f.rule(), PrimeRule::Table { default: DefaultRule::KlMatch, .. }));
    assert!(matches!(MultFun::from_json(&json!({"eta": "0"})), Err(Error::ZeroEta)));
    assert!(matches!(MultFun::from_json(&json!({"eta": ["1", "0"]})), Err(Error::ZeroEta)));
    assert!(matches!(MultFun::from_json(&json!({"eta": {"re": 0.0, "im": 0.0}})), Err(Error::ZeroEta)));
    assert!(MultFun::from_json(&json!({"construction": "sharpness-k", "k": 2, "eta": "0"})).is_err());
    assert!(MultFun::from_json(&json!({"9": "1"})).is_err());
    assert!(MultFun::from_json(&json!({"colour": "1"})).is_err());
    assert!(MultFun::from_json(&json!({"default": "sometimes"})).is_err());
    let g = MultFun::from_json(&json!({"primes": {"3": ["1", "2"], "5": {"re": 0.5, "im": 1}}, "eta": ["1", "2"]})).unwrap();
    assert_eq!(g.eta(1), &Value::one());
    assert_eq!(g.eta(5), &Value::integer(2));
    assert!(!g.prime_value(5).unwrap().is_exact());
}

fn sample_functions() -> Vec<MultFun> {
    let i = Value::from_cyc(&CycElem::root_power(4, 1).unwrap()).unwrap();
    let table = BTreeMap::from([(2, i), (3, rat(-5, 3)), (7, Value::zero()), (11, Value::numeric(0.25, -1.5))]);
    vec![
        MultFun::table(2, 3, table.clone(), DefaultRule::One, EtaSeq::new(vec![Value::one(), rat(1, 3)]).unwrap()).unwrap(),
        MultFun::table(1, 2, table, DefaultRule::KlMatch, EtaSeq::constant(rat(2, 1)).unwrap()).unwrap(),
        MultFun::sharpness_k(2, 3, Value::one(), 2).unwrap(),
        MultFun::sharpness_k(1, 1, rat(7, 2), 3).unwrap(),
        MultFun::sharpness_squarefree(1, 1, Value::one()).unwrap(),
        MultFun::random_table(42, Value::one()).unwrap(),
        MultFun::from_json(&json!({"default": "expr:birch,1,1,-1/2"})).unwrap(),
    ]
}

fn same_value(x: &Value, y: &Value) -> bool {
    match (x, y) {
        (Value::Exact(a), Value::Exact(b)) => a.decide_eq(b, 10_000).unwrap() == Decision::Equal,
        _ => {
            let ((z1, e1), (z2, e2)) = (x.to_complex(), y.to_complex());
            let d = crate::scalar::complex_abs(z1 - z2).to_f64();
            d <= e1 + e2 + 1e-12
        }
    }
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (i, f) in sample_functions().into_iter().enumerate() {
        let path = dir.path().join(format!("f{i}.json"));
        f.save(&path).unwrap();
        let g = load_multfun(&path).unwrap();
        assert_eq!(f, g);
        for n in (1..=1000u64).filter(|&n| is_squarefree(n)) {
            assert!(same_value(&f.eval(n).unwrap(), &g.eval(n).unwrap()), "function {i} at {n}");
        }
    }
}

#[test]
fn concurrent_fill_is_idempotent() {
    let f = MultFun::sharpness_k(1, 1, Value::one(), 3).unwrap();
    let primes = primes_up_to(400);
    std::thread::scope(|s| {
        for t in 0..4 {
            let (f, primes) = (&f, &primes);
            s.spawn(move || {
                for &p in primes.iter().rev().skip(t).chain(primes.iter()) {
                    f.prime_value(p).unwrap();
                }
            });
        }
    });
    let fresh = MultFun::sharpness_k(1, 1, Value::one(), 3).unwrap();
    for &p in &primes {
        assert_eq!(f.prime_value(p).unwrap(), fresh.compute_prime_value(p).unwrap());
    }
}

#[test]
fn random_table_is_seeded() {
    let f = MultFun::random_table(7, Value::one()).unwrap();
    let g = MultFun::random_table(7, Value::one()).unwrap();
    let h = MultFun::random_table(8, Value::one()).unwrap();
    let ps = primes_up_to(200);
    assert!(ps.iter().all(|&p| f.prime_value(p).unwrap() == g.prime_value(p).unwrap()));
    assert!(ps.iter().any(|&p| f.prime_value(p).unwrap() != h.prime_value(p).unwrap()));
    assert!(ps.iter().any(|&p| f.prime_value(p).unwrap().is_zero() == Some(true)));
}

fn squarefree_pair() -> impl Strategy<Value = (u64, u64)> {
    (1u64..1000, 1u64..1000).prop_filter("coprime square-free", |&(m, n)| is_squarefree(m) && is_squarefree(n) && gcd(m, n) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn multiplicativity((m, n) in squarefree_pair(), which in 0usize..7) {
        let f = &sample_functions()[which];
        let lhs = f.eval(m * n).unwrap();
        let rhs = f.eval(m).unwrap().mul(&f.eval(n).unwrap()).unwrap();
        prop_assert!(same_value(&lhs, &rhs));
    }
}
