//! Finite checks of the kloostermanian and almost-kloostermanian properties
//! for sum families, with the Birch and Salié classifications.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::cyclotomic::lambda_valuation;
use crate::error::{Error, Result};
use crate::expsums::{sum_counts, Family, IntPoly, Range, RootSum, SumSpec, Twist};
use crate::modular::{factor, gcd, is_perfect_square, is_prime, is_squarefree, jacobi, mod_inverse, mod_pos, pow_mod};
use crate::sieve::primes_up_to;
use crate::CycElem;

/// Witnesses kept per verdict.
const MAX_WITNESSES: usize = 16;

/// Twists used for the T-multiplicative check.
const TWIST_SAMPLE: [i64; 4] = [1, 2, -1, 3];

/// E(at, bt; n) for a fixed family and pair (a, b).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyHandle {
    pub spec: SumSpec,
    /// Negative control: x̄ is computed modulo n+1 instead of n.
    pub corrupted: bool,
}

impl FamilyHandle {
    pub fn new(spec: SumSpec) -> Self {
        Self { spec, corrupted: false }
    }

    pub fn kloosterman(a: i64, b: i64) -> Self {
        Self::new(SumSpec::kloosterman(a, b, 1))
    }

    pub fn birch(a: i64, b: i64, range: Range) -> Self {
        Self::new(SumSpec::birch(a, b, 1, range))
    }

    pub fn salie(a: i64, b: i64) -> Self {
        Self::new(SumSpec::salie(a, b, 1))
    }

    pub fn generic(a: i64, b: i64, g: IntPoly, h: IntPoly, range: Range, twist: Twist) -> Self {
        Self::new(SumSpec::generic(a, b, 1, g, h, range, twist))
    }

    pub fn corrupted_kloosterman(a: i64, b: i64) -> Self {
        Self { spec: SumSpec::kloosterman(a, b, 1), corrupted: true }
    }

    pub fn a(&self) -> i64 {
        self.spec.a
    }

    pub fn b(&self) -> i64 {
        self.spec.b
    }

    /// Jacobi-twisted families live on odd moduli only.
    pub fn odd_only(&self) -> bool {
        self.spec.family == Family::Salie || self.spec.twist == Twist::Jacobi
    }

    fn defined_at(&self, n: u64) -> bool {
        !(self.odd_only() && n.is_multiple_of(2))
    }

    /// Group-ring form of E(at, bt; n).
    pub fn counts(&self, t: i64, n: u64) -> Result<RootSum> {
        let u = (self.spec.a as i128 * t as i128).rem_euclid(n as i128) as i64;
        let v = (self.spec.b as i128 * t as i128).rem_euclid(n as i128) as i64;
        if self.corrupted {
            return corrupted_counts(u, v, n);
        }
        sum_counts(&self.spec.with(u, v, n))
    }

    pub fn eval(&self, t: i64, n: u64) -> Result<CycElem> {
        self.counts(t, n)?.to_exact()
    }
}

fn corrupted_counts(u: i64, v: i64, n: u64) -> Result<RootSum> {
    let mut rs = RootSum::new(n)?;
    for x in 0..n {
        if gcd(x, n) != 1 {
            continue;
        }
        let Ok(xi) = mod_inverse(x as i64, n + 1) else { continue };
        rs.add_root((mod_pos(u, n) * x % n + mod_pos(v, n) * (xi % n) % n) % n, 1);
    }
    Ok(rs)
}

/// Σ c_j ζ_p^j vanishes iff all c_j agree.
fn prime_counts_zero(rs: &RootSum) -> bool {
    rs.counts().windows(2).all(|w| w[0] == w[1])
}

/// x/y ∈ Q for x, y in Z[ζ_p] given by counts, `None` when y = 0.
fn prime_counts_ratio(x: &RootSum, y: &RootSum) -> Option<Option<(i64, i64)>> {
    let dx: Vec<i128> = x.counts().iter().map(|&c| (c - x.counts()[0]) as i128).collect();
    let dy: Vec<i128> = y.counts().iter().map(|&c| (c - y.counts()[0]) as i128).collect();
    let j = dy.iter().position(|&d| d != 0)?;
    let (num, den) = (dx[j], dy[j]);
    let ok = dx.iter().zip(&dy).all(|(&a, &b)| a * den == b * num);
    Some(ok.then_some((num as i64, den as i64)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub modulus: u64,
    pub m: Option<u64>,
    pub t: i64,
    pub detail: String,
}

/// Outcome of one property check over a finite range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub property: String,
    pub bound: u64,
    pub checked: u64,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    /// Failures of the converse direction, for the irrational property.
    pub converse_witnesses: Vec<Witness>,
    pub note: String,
}

impl PropertyVerdict {
    fn new(property: &str, bound: u64) -> Self {
        Self {
            property: property.into(),
            bound,
            checked: 0,
            passed: true,
            witnesses: Vec::new(),
            converse_witnesses: Vec::new(),
            note: "finite evidence".into(),
        }
    }

    fn fail(&mut self, w: Witness) {
        self.passed = false;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

fn squarefree_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_squarefree(n)).collect()
}

/// Periodicity in t, E(at,bt;n) ∈ Q(ζ_n), and E(at,bt;mn) = E(at n̄, bt n̄; m)·E(at m̄, bt m̄; n)
/// for square-free coprime 2 ≤ m < n with mn ≤ bound.
pub fn check_t_multiplicative(h: &FamilyHandle, bound: u64) -> Result<PropertyVerdict> {
    if bound < 2 {
        return Err(Error::InvalidInput("bound must be at least 2".into()));
    }
    let mut v = PropertyVerdict::new("t-multiplicative", bound);
    let moduli: Vec<u64> = squarefree_up_to(bound).into_iter().filter(|&n| h.defined_at(n)).collect();
    for &n in &moduli {
        for t in TWIST_SAMPLE {
            v.checked += 1;
            let e = h.eval(t, n)?;
            if e != h.eval(t + n as i64, n)? {
                v.fail(Witness { modulus: n, m: None, t, detail: "not periodic in t".into() });
            }
            if n % e.conductor() != 0 {
                v.fail(Witness { modulus: n, m: None, t, detail: format!("conductor {}", e.conductor()) });
            }
        }
    }
    for (i, &m) in moduli.iter().enumerate() {
        for &n in &moduli[i + 1..] {
            if m * n > bound {
                break;
            }
            if gcd(m, n) != 1 {
                continue;
            }
            let n_bar = mod_inverse(n as i64, m)? as i64;
            let m_bar = mod_inverse(m as i64, n)? as i64;
            for t in TWIST_SAMPLE {
                v.checked += 1;
                let whole = h.eval(t, m * n)?;
                let left = h.eval(t * n_bar, m)?;
                let right = h.eval(t * m_bar, n)?;
                if !whole.try_eq(&left.try_mul(&right)?)? {
                    v.fail(Witness { modulus: n, m: Some(m), t, detail: "twisted multiplicativity fails".into() });
                }
            }
        }
    }
    Ok(v)
}

/// The complement of an exceptional prime set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GoodPrimeSet {
    All,
    /// Primes outside {3 if 3 ∤ a+b; p | a, p ∤ b; p ≡ 2 mod 3, p | b, p ∤ a}.
    Birch { a: i64, b: i64 },
    /// Odd primes with (ab/p) ∈ {0, 1}.
    Salie { a: i64, b: i64 },
}

impl GoodPrimeSet {
    pub fn contains(&self, p: u64) -> bool {
        match *self {
            GoodPrimeSet::All => true,
            GoodPrimeSet::Birch { a, b } => {
                let div = |p: u64, x: i64| x.rem_euclid(p as i64) == 0;
                let excluded = (p == 3 && !div(3, a + b))
                    || (div(p, a) && !div(p, b))
                    || (p % 3 == 2 && div(p, b) && !div(p, a));
                !excluded
            }
            GoodPrimeSet::Salie { a, b } => {
                p % 2 == 1 && jacobi((a as i128 * b as i128).rem_euclid(p as i128) as i64, p).is_ok_and(|j| j >= 0)
            }
        }
    }

    pub fn members(&self, bound: u64) -> Vec<u64> {
        primes_up_to(bound).into_iter().filter(|&p| self.contains(p)).collect()
    }

    pub fn excluded(&self, bound: u64) -> Vec<u64> {
        primes_up_to(bound).into_iter().filter(|&p| !self.contains(p)).collect()
    }
}

fn tested_primes(h: &FamilyHandle, bound: u64, good: Option<&GoodPrimeSet>) -> Vec<u64> {
    primes_up_to(bound).into_iter().filter(|&p| h.defined_at(p) && good.is_none_or(|g| g.contains(p))).collect()
}

/// E(at, bt; p) ≠ 0 for every tested prime p and t ∈ (Z/p)^×.
pub fn check_nonvanishing(h: &FamilyHandle, bound: u64, good: Option<&GoodPrimeSet>) -> Result<PropertyVerdict> {
    let mut v = PropertyVerdict::new("non-vanishing", bound);
    for p in tested_primes(h, bound, good) {
        for t in 1..p as i64 {
            v.checked += 1;
            if prime_counts_zero(&h.counts(t, p)?) {
                v.fail(Witness { modulus: p, m: None, t, detail: "sum vanishes".into() });
            }
        }
    }
    Ok(v)
}

/// For tested p > |a|+|b| and t ∈ (Z/p)^×: E(a,b;p)/E(at,bt;p) ∈ Q exactly when t ≡ ±1.
/// The forward direction decides `passed`; converse failures are listed apart.
pub fn check_irrational(h: &FamilyHandle, bound: u64, good: Option<&GoodPrimeSet>) -> Result<PropertyVerdict> {
    let mut v = PropertyVerdict::new("irrational", bound);
    let floor = h.a().unsigned_abs() + h.b().unsigned_abs();
    for p in tested_primes(h, bound, good).into_iter().filter(|&p| p > floor) {
        let base = h.counts(1, p)?;
        for t in 1..p as i64 {
            let other = h.counts(t, p)?;
            let Some(ratio) = prime_counts_ratio(&base, &other) else {
                continue;
            };
            v.checked += 1;
            let pm1 = t == 1 || t == p as i64 - 1;
            match (ratio, pm1) {
                (Some((n, d)), false) => v.fail(Witness { modulus: p, m: None, t, detail: format!("rational ratio {n}/{d}") }),
                (None, true)
                    if v.converse_witnesses.len() < MAX_WITNESSES => {
                        v.converse_witnesses.push(Witness { modulus: p, m: None, t, detail: "irrational at t = ±1".into() });
                    }
                _ => {}
            }
        }
    }
    Ok(v)
}

/// All three property checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub spec: SumSpec,
    pub prime_bound: u64,
    pub t_multiplicative: PropertyVerdict,
    pub nonvanishing: PropertyVerdict,
    pub irrational: PropertyVerdict,
    pub good_set: Option<GoodPrimeSet>,
    pub passed: bool,
}

pub fn check_class(h: &FamilyHandle, prime_bound: u64, mult_bound: u64, good: Option<GoodPrimeSet>) -> Result<ClassReport> {
    let t_multiplicative = check_t_multiplicative(h, mult_bound)?;
    let nonvanishing = check_nonvanishing(h, prime_bound, good.as_ref())?;
    let irrational = check_irrational(h, prime_bound, good.as_ref())?;
    let passed = t_multiplicative.passed && nonvanishing.passed && irrational.passed;
    Ok(ClassReport { spec: h.spec.clone(), prime_bound, t_multiplicative, nonvanishing, irrational, good_set: good, passed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub clause: String,
    pub prime: Option<u64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionTrace {
    pub holds: bool,
    pub clauses: Vec<Clause>,
}

/// a ≠ 0, and for every prime p: p = 3 ⇒ p | a+b; p | a ⇒ p | b; p ≡ 2 mod 3 and p | b ⇒ p | a.
/// Only p = 3 and primes dividing a or b can violate the prime condition.
pub fn birch_condition(a: i64, b: i64) -> ConditionTrace {
    let mut clauses = vec![Clause { clause: "a != 0".into(), prime: None, holds: a != 0 }];
    clauses.push(Clause { clause: "p = 3 => 3 | a+b".into(), prime: Some(3), holds: (a + b) % 3 == 0 });
    if a != 0 {
        for (p, _) in factor(a.unsigned_abs()) {
            clauses.push(Clause { clause: "p | a => p | b".into(), prime: Some(p), holds: b % p as i64 == 0 });
        }
    }
    if b == 0 {
        // Every prime divides 0, and a has finitely many prime factors.
        clauses.push(Clause { clause: "p = 2 mod 3, p | b => p | a (b = 0)".into(), prime: None, holds: a == 0 });
    } else {
        for (p, _) in factor(b.unsigned_abs()).into_iter().filter(|(p, _)| p % 3 == 2) {
            clauses.push(Clause { clause: "p = 2 mod 3, p | b => p | a".into(), prime: Some(p), holds: a % p as i64 == 0 });
        }
    }
    ConditionTrace { holds: clauses.iter().all(|c| c.holds), clauses }
}

pub fn birch_good_primes(a: i64, b: i64) -> Result<GoodPrimeSet> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidInput("the Birch sum is not almost-kloostermanian when ab = 0".into()));
    }
    Ok(GoodPrimeSet::Birch { a, b })
}

/// ab is a nonzero perfect square.
pub fn salie_condition(a: i64, b: i64) -> bool {
    let ab = a as i128 * b as i128;
    ab > 0 && i64::try_from(ab).is_ok_and(is_perfect_square)
}

pub fn salie_good_primes(a: i64, b: i64) -> Result<GoodPrimeSet> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidInput("the Salié sum is not almost-kloostermanian when ab = 0".into()));
    }
    Ok(GoodPrimeSet::Salie { a, b })
}

/// Odd primes p ≤ bound with S̃(a, b; p) = 0.
pub fn salie_vanishing_primes(a: i64, b: i64, bound: u64) -> Result<Vec<u64>> {
    let h = FamilyHandle::salie(a, b);
    let mut out = Vec::new();
    for p in primes_up_to(bound).into_iter().filter(|p| p % 2 == 1) {
        if prime_counts_zero(&h.counts(1, p)?) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Vanishing primes with (ab/p) = −1, the scan behind the classification ab = m².
pub fn salie_bad_primes(a: i64, b: i64, bound: u64) -> Result<Vec<u64>> {
    let ab = a as i128 * b as i128;
    Ok(salie_vanishing_primes(a, b, bound)?
        .into_iter()
        .filter(|&p| jacobi(ab.rem_euclid(p as i128) as i64, p).is_ok_and(|j| j == -1))
        .collect())
}

/// Group-ring form of 2cos(4πx/p)·Σ_y e(ay²/p) with x² ≡ ab mod p.
pub fn salie_formula_counts(a: i64, b: i64, p: u64) -> Result<Option<RootSum>> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    let ab = (a as i128 * b as i128).rem_euclid(p as i128) as u64;
    let Some(x) = (1..p).find(|&x| x * x % p == ab).filter(|_| ab != 0) else {
        return Ok(None);
    };
    let mut cos = RootSum::new(p)?;
    cos.add_root(2 * x % p, 1);
    cos.add_root((p - 2 * x % p) % p, 1);
    let mut gauss = RootSum::new(p)?;
    for y in 0..p {
        gauss.add_root(mod_pos(a, p) * (y * y % p) % p, 1);
    }
    Ok(Some(cos.mul(&gauss)?))
}

/// S̃(a,b;p) equals the closed form, compared exactly in Z[ζ_p].
pub fn salie_formula_exact(a: i64, b: i64, p: u64) -> Result<Option<bool>> {
    let Some(formula) = salie_formula_counts(a, b, p)? else {
        return Ok(None);
    };
    let direct = FamilyHandle::salie(a, b).counts(1, p)?;
    let diff: Vec<i64> = direct.counts().iter().zip(formula.counts()).map(|(x, y)| x - y).collect();
    Ok(Some(diff.windows(2).all(|w| w[0] == w[1])))
}

/// |S̃(a,b;p) − closed form| at double-double precision.
pub fn salie_formula_gap(a: i64, b: i64, p: u64) -> Result<Option<f64>> {
    use crate::dd::DoubleDouble;
    use crate::scalar::complex_abs;
    let Some(formula) = salie_formula_counts(a, b, p)? else {
        return Ok(None);
    };
    let direct = FamilyHandle::salie(a, b).counts(1, p)?;
    let d = direct.to_complex::<DoubleDouble>() - formula.to_complex::<DoubleDouble>();
    Ok(Some(complex_abs(d).to_f64()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LivneStatus {
    Holds,
    Fails,
    Inapplicable,
}

/// One (a, b, t, p) congruence check on the full-range Birch sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LivneCheck {
    pub a: i64,
    pub b: i64,
    pub t: i64,
    pub p: u64,
    pub l: u64,
    pub variant: Range,
    /// v_λ(B(at, bt; p)), `None` for zero.
    pub valuation: Option<i64>,
    /// The literal congruence: B ≡ −λ^l (at)^l, or −l λ^l (at)^{l−1}.
    pub literal: LivneStatus,
    /// The leading coefficient from the binomial expansion of ζ^y = (1+λ)^y:
    /// (Σ_x f(x)^l)/l!, i.e. −(at)^l/l! or −l (at)^{l−1}(bt)/l!.
    pub normalized: LivneStatus,
    /// v_λ of the unit-range sum, which is 0 because it is ≡ −1 mod λ.
    pub unit_range_valuation: Option<i64>,
}

fn lambda_power(p: u64, l: u64) -> Result<CycElem> {
    let lam = CycElem::from_power_coeffs(p, {
        let mut v = vec![BigRational::from_integer(BigInt::from(0)); p as usize];
        v[0] = BigRational::from_integer((-1).into());
        v[1] = BigRational::from_integer(1.into());
        v
    })?;
    let mut acc = CycElem::one(p)?;
    for _ in 0..l {
        acc = acc.try_mul(&lam)?;
    }
    Ok(acc)
}

fn congruence_status(sum: &CycElem, coeff: u64, lam_l: &CycElem, p: u64, l: u64) -> Result<LivneStatus> {
    let lead = lam_l.scale(&BigRational::from_integer(BigInt::from(coeff)));
    let diff = sum.try_sub(&lead)?;
    let v = lambda_valuation(&diff, p)?.value();
    Ok(if v.is_none_or(|v| v > l as i64) { LivneStatus::Holds } else { LivneStatus::Fails })
}

pub fn livne_congruence_check(a: i64, b: i64, t: i64, p: u64) -> Result<LivneCheck> {
    let l = (p + 1) / 3;
    let md = |x: i128| x.rem_euclid(p as i128) as u64;
    let (ap, bp, tp) = (md(a as i128), md(b as i128), md(t as i128));
    let applicable = p >= 7
        && is_prime(p)
        && tp != 0
        && ((ap != 0 && bp != 0) || (p % 3 == 1 && bp == 0 && ap != 0));
    let inapplicable = LivneCheck {
        a,
        b,
        t,
        p,
        l,
        variant: Range::Full,
        valuation: None,
        literal: LivneStatus::Inapplicable,
        normalized: LivneStatus::Inapplicable,
        unit_range_valuation: None,
    };
    if !applicable {
        return Ok(inapplicable);
    }
    let h = FamilyHandle::birch(a, b, Range::Full);
    let sum = h.eval(t, p)?;
    let unit = FamilyHandle::birch(a, b, Range::Unit).eval(t, p)?;
    let at = ap * tp % p;
    let bt = bp * tp % p;
    let neg = |x: u64| (p - x % p) % p;
    let (literal, raw) = if p % 3 == 1 {
        let c = pow_mod(at, l, p);
        (neg(c), neg(c))
    } else {
        let c = pow_mod(at, l - 1, p);
        (neg(l % p * c % p), neg(l % p * c % p * bt % p))
    };
    let fact = (1..=l).fold(1u64, |acc, i| acc * i % p);
    let normalized = raw * mod_inverse(fact as i64, p)? % p;
    let lam_l = lambda_power(p, l)?;
    Ok(LivneCheck {
        valuation: lambda_valuation(&sum, p)?.value(),
        literal: congruence_status(&sum, literal, &lam_l, p, l)?,
        normalized: congruence_status(&sum, normalized, &lam_l, p, l)?,
        unit_range_valuation: lambda_valuation(&unit, p)?.value(),
        ..inapplicable
    })
}

/// Predicts whether the literal congruence can hold: its coefficient must
/// agree mod p with the normalized one.
pub fn livne_literal_expected(a: i64, b: i64, t: i64, p: u64) -> bool {
    let l = (p + 1) / 3;
    let at = (a as i128 * t as i128).rem_euclid(p as i128) as u64;
    let bt = (b as i128 * t as i128).rem_euclid(p as i128) as u64;
    let fact = (1..=l).fold(1u64, |acc, i| acc * i % p);
    if p % 3 == 1 {
        // −(at)^l ≡ −(at)^l / l!  ⇔  l! ≡ 1
        fact == 1
    } else {
        // −l(at)^{l−1} ≡ −l(at)^{l−1}(bt)/l!  ⇔  bt ≡ l!
        bt == fact && at != 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeCandidate {
    pub a: i64,
    pub b: i64,
    pub passed: bool,
    pub failed_properties: Vec<String>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub g: IntPoly,
    pub h: IntPoly,
    pub range: Range,
    pub twist: Twist,
    pub search_box: i64,
    pub prime_bound: u64,
    pub degree_warning: Option<String>,
    pub candidates: Vec<ProbeCandidate>,
    pub label: String,
}

/// Scans |a|, |b| ≤ `search_box`, ab ≠ 0, running the three checks on the generic sum.
pub fn conjecture_probe(g: &IntPoly, h: &IntPoly, range: Range, twist: Twist, search_box: i64, prime_bound: u64) -> Result<ProbeReport> {
    let (dg, dh) = (g.degree().unwrap_or(0), h.degree().unwrap_or(0));
    let degree_warning = match range {
        Range::Full if dg.min(dh) < 1 || dg.max(dh) < 3 => Some("full-range needs min degree >= 1 and max degree >= 3".to_string()),
        Range::Unit if dg.min(dh) < 1 => Some("unit-range needs min degree >= 1".to_string()),
        _ => None,
    };
    let mult_bound = prime_bound.min(60);
    let mut candidates = Vec::new();
    for a in -search_box..=search_box {
        for b in -search_box..=search_box {
            if a == 0 || b == 0 {
                continue;
            }
            let fam = FamilyHandle::generic(a, b, g.clone(), h.clone(), range, twist);
            let r = check_class(&fam, prime_bound, mult_bound, None)?;
            let mut failed = Vec::new();
            let mut witness = None;
            for v in [&r.t_multiplicative, &r.nonvanishing, &r.irrational] {
                if !v.passed {
                    failed.push(v.property.clone());
                    witness = witness.or_else(|| v.first_witness().cloned());
                }
            }
            candidates.push(ProbeCandidate { a, b, passed: failed.is_empty(), failed_properties: failed, witness });
        }
    }
    Ok(ProbeReport {
        g: g.clone(),
        h: h.clone(),
        range,
        twist,
        search_box,
        prime_bound,
        degree_warning,
        candidates,
        label: "finite evidence, not proof".into(),
    })
}

#[cfg(test)]
mod tests;
