//! The matched sets R_k(X) = {n ∈ Π_k(X) : S(a,b;n) = η_k f(n)}, their
//! partitions by largest prime factor, and the theorem bounds they obey.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsums::kloosterman_counts_with;
use crate::modular::{gcd, mod_inverse, mod_pos, prime_inverse_table};
use crate::multfun::MultFun;
use crate::scalar::complex_abs;
use crate::sieve::{prime_pi, primorial, squarefree_k_almost, squarefree_up_to, FactoredInteger, ZETA2};
use crate::value::{Decision, PureTensor, Value};
use crate::CycSmall;

/// Default cap on the conductor of a single comparison class.
pub const DEFAULT_CONDUCTOR_CAP: u64 = 10_000;

/// Relative gap below which a numeric comparison is escalated to exact arithmetic.
pub const ESCALATION_THRESHOLD: f64 = 1.0 / (1u64 << 60) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualityMode {
    Exact,
    /// Numeric comparison; near ties are re-decided exactly.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KRange {
    Fixed(usize),
    /// Every square-free n ≤ X, compared against η_{ω(n)} f(n).
    All,
}

#[derive(Clone, Debug)]
pub struct MatchQuery<'a> {
    pub a: i64,
    pub b: i64,
    pub f: &'a MultFun,
    pub x: u64,
    pub k: KRange,
    pub mode: EqualityMode,
    pub conductor_cap: u64,
    /// The absolute constant C in β = 14 + 2C.
    pub constant_c: f64,
    /// Scan the primes ≤ X for S(a,b;p) ≠ η₁f(p); always done when `k` is `All`.
    pub scan_exceptional: bool,
}

impl<'a> MatchQuery<'a> {
    pub fn new(a: i64, b: i64, f: &'a MultFun, x: u64, k: KRange) -> Self {
        Self {
            a,
            b,
            f,
            x,
            k,
            mode: EqualityMode::Exact,
            conductor_cap: DEFAULT_CONDUCTOR_CAP,
            constant_c: 1.0,
            scan_exceptional: false,
        }
    }

    pub fn mode(mut self, mode: EqualityMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn constant_c(mut self, c: f64) -> Self {
        self.constant_c = c;
        self
    }

    pub fn scan_exceptional(mut self, on: bool) -> Self {
        self.scan_exceptional = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 {
            return Err(Error::InvalidInput("a and b must be nonzero".into()));
        }
        if self.x == 0 {
            return Err(Error::InvalidInput("X must be positive".into()));
        }
        if let KRange::Fixed(0) = self.k {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        Ok(())
    }
}

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub formula: String,
    pub lhs: u64,
    pub rhs: f64,
    /// `lhs ≤ rhs` for upper bounds, `lhs ≥ rhs` for lower bounds.
    pub holds: bool,
    pub upper: bool,
    /// Whether the query meets the hypotheses of this inequality.
    pub applicable: bool,
    pub note: Option<String>,
}

/// Σ¹..Σ⁴: sums of |R_k^p(X)| over p in (1, X^{1/(k+1)}], (X^{1/(k+1)}, X^{1/k}],
/// (X^{1/k}, X^{2/3}] and (X^{2/3}, X/L_k].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaSplit(pub [u64; 4]);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub a: i64,
    pub b: i64,
    pub x: u64,
    pub k: KRange,
    pub mode: EqualityMode,
    pub matched: Vec<u64>,
    pub r_k: u64,
    /// Number of candidates examined (|Π_k(X)|, or the square-free n in [2, X]).
    pub candidates: u64,
    /// p ↦ R_k^p(X) = {n/p : n matched, P⁺(n) = p}; for `All`, the union over k ≥ 2.
    pub partition: BTreeMap<u64, Vec<u64>>,
    pub sigma: Option<SigmaSplit>,
    /// Matches with ω(n) = 1, reported apart from r(X) = Σ_{k≥2} r_k(X).
    pub r1: Option<u64>,
    /// Per-ω counts for the square-free scan.
    pub by_omega: BTreeMap<usize, u64>,
    /// n = 1 has ω = 0 and no η clause; this records whether S(a,b;1) = η₁f(1).
    pub one_matches_eta1: Option<bool>,
    pub bounds: Vec<BoundCheck>,
    pub undecided: Vec<u64>,
    pub escalations: u64,
    /// Primes p ≤ X with S(a,b;p) ≠ η₁f(p), when scanned.
    pub exceptional_primes: Option<Vec<u64>>,
    pub p_f: Option<u64>,
    pub squarefree_reference: Option<f64>,
}

impl CountReport {
    /// R₁ ∩ [2, X] when the exceptional scan was run.
    pub fn r1_primes(&self) -> Option<BTreeSet<u64>> {
        let exc: BTreeSet<u64> = self.exceptional_primes.as_ref()?.iter().copied().collect();
        Some(crate::sieve::primes_up_to(self.x).into_iter().filter(|p| !exc.contains(p)).collect())
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.bounds.iter().all(|b| b.holds || !b.applicable)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Match,
    NoMatch,
    Undecided,
}

/// Inverse tables for the primes that can occur below the largest prime factor.
struct SmallTables(HashMap<u64, Vec<u64>>);

impl SmallTables {
    fn new(x: u64) -> Self {
        let root = (x as f64).sqrt() as u64 + 1;
        Self(crate::sieve::primes_up_to(root).into_iter().map(|q| (q, prime_inverse_table(q))).collect())
    }
}

struct Evaluator<'q, 'a> {
    q: &'q MatchQuery<'a>,
    small: SmallTables,
}

struct GroupResult {
    p: u64,
    matched: Vec<u64>,
    undecided: Vec<u64>,
    escalations: u64,
}

impl Evaluator<'_, '_> {
    /// S(a,b;n) as a tensor of prime blocks: ∏_{q|n} S(a c_q, b c_q; q) with c_q = (n/q)⁻¹ mod q.
    ///
    /// With `target`, primes are visited in ascending order and `None` is returned as soon as
    /// a prime whose class is isolated on both sides has a block not proportional to the
    /// target's; such an n cannot match.
    fn lhs(&self, n: &FactoredInteger, p: u64, p_inv: &[u64], target: Option<&PureTensor>) -> Result<Option<PureTensor>> {
        let mut t = PureTensor::one();
        for q in n.primes() {
            let c = mod_inverse(((n.n() / q) % q) as i64, q)? as i64;
            let u = (mod_pos(self.q.a, q) as i128 * c as i128 % q as i128) as i64;
            let v = (mod_pos(self.q.b, q) as i128 * c as i128 % q as i128) as i64;
            let inv = if q == p {
                p_inv
            } else {
                self.small.0.get(&q).map(Vec::as_slice).ok_or_else(|| Error::InvalidInput(format!("no table for {q}")))?
            };
            let block = kloosterman_counts_with(u, v, q, inv)?.to_small()?.ok_or(Error::Overflow)?;
            if let Some(r) = target {
                if q > 2 && !isolated_block_matches(&block, q, r)? {
                    return Ok(None);
                }
            }
            t = t.mul(&PureTensor::from_block(block)?)?;
        }
        Ok(Some(t))
    }

    fn decide(&self, lhs: &PureTensor, rhs: &Value) -> Result<(Outcome, bool)> {
        if let (EqualityMode::Exact, Value::Exact(r)) = (self.q.mode, rhs) {
            return Ok((exact_outcome(lhs.decide_eq(r, self.q.conductor_cap)?), false));
        }
        let (zl, el) = lhs.to_complex();
        let (zr, er) = rhs.to_complex();
        let gap = complex_abs(zl - zr).to_f64();
        let scale = complex_abs(zr).to_f64().max(1.0);
        if gap > el + er + ESCALATION_THRESHOLD * scale {
            return Ok((Outcome::NoMatch, false));
        }
        match rhs {
            Value::Exact(r) => Ok((exact_outcome(lhs.decide_eq(r, self.q.conductor_cap)?), true)),
            Value::Numeric { .. } => Ok((Outcome::Undecided, false)),
        }
    }

    fn eta_for(&self, omega: usize) -> &Value {
        self.q.f.eta(omega)
    }

    fn group(&self, p: u64, members: &[&FactoredInteger]) -> Result<GroupResult> {
        let p_inv = prime_inverse_table(p);
        let fp = self.q.f.prime_value(p)?;
        let mut out = GroupResult { p, matched: Vec::new(), undecided: Vec::new(), escalations: 0 };
        for n in members {
            let m = FactoredInteger::from_primes(&n.primes().filter(|&q| q != p).collect::<Vec<_>>())?;
            let rhs = self.eta_for(n.omega()).mul(&self.q.f.eval_squarefree(&m)?)?.mul(&fp)?;
            if rhs.is_zero() == Some(true) {
                continue;
            }
            let target = match (self.q.mode, &rhs) {
                (EqualityMode::Exact, Value::Exact(r)) => Some(r),
                _ => None,
            };
            let Some(lhs) = self.lhs(n, p, &p_inv, target)? else { continue };
            let (outcome, escalated) = self.decide(&lhs, &rhs)?;
            out.escalations += escalated as u64;
            match outcome {
                Outcome::Match => out.matched.push(n.n()),
                Outcome::Undecided => out.undecided.push(n.n()),
                Outcome::NoMatch => {}
            }
        }
        Ok(out)
    }

    fn run(&self, candidates: &[FactoredInteger]) -> Result<Vec<GroupResult>> {
        let mut groups: BTreeMap<u64, Vec<&FactoredInteger>> = BTreeMap::new();
        for n in candidates {
            groups.entry(n.largest_prime_factor()).or_default().push(n);
        }
        let groups: Vec<(u64, Vec<&FactoredInteger>)> = groups.into_iter().collect();
        groups.par_iter().map(|(p, members)| self.group(*p, members)).collect()
    }
}

/// False only when `block` (conductor q) certainly differs from the q-class of `target`:
/// no other target block shares a factor with q, and the vectors are not proportional.
fn isolated_block_matches(block: &CycSmall, q: u64, target: &PureTensor) -> Result<bool> {
    let mut own = None;
    for b in target.blocks() {
        if b.conductor() == q {
            own = Some(b);
        } else if gcd(b.conductor(), q) != 1 {
            return Ok(true);
        }
    }
    let one;
    let y = match own {
        Some(b) => b,
        None => {
            one = CycSmall::one(q)?;
            &one
        }
    };
    Ok(proportional(block.coeffs(), y.coeffs()))
}

fn proportional(x: &[i64], y: &[i64]) -> bool {
    let Some(pivot) = y.iter().position(|&c| c != 0) else { return false };
    let (xp, yp) = (x[pivot] as i128, y[pivot] as i128);
    x.iter().zip(y).all(|(&a, &b)| a as i128 * yp == b as i128 * xp)
}

fn exact_outcome(d: Decision) -> Outcome {
    match d {
        Decision::Equal => Outcome::Match,
        Decision::Unequal => Outcome::NoMatch,
        Decision::Undecided => Outcome::Undecided,
    }
}

/// Integer k-th root: the largest r with r^k ≤ x.
pub fn iroot(x: u64, k: u32) -> u64 {
    if k == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64) as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > x) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= x) {
        r += 1;
    }
    r
}

/// Which Σ part a prime belongs to, with exact integer boundaries.
fn sigma_part(p: u64, x: u64, k: usize) -> usize {
    if pow_le(p, k as u32 + 1, x) {
        0
    } else if pow_le(p, k as u32, x) {
        1
    } else if (p as u128).pow(3) <= (x as u128).pow(2) {
        2
    } else {
        3
    }
}

fn pow_le(p: u64, e: u32, x: u64) -> bool {
    (p as u128).checked_pow(e).is_some_and(|v| v <= x as u128)
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Upper bound for k-almost-prime matches, with the sharper intermediate constant.
pub fn thm1_bound(a: i64, b: i64, k: usize, x: u64) -> Result<(f64, f64)> {
    let l = primorial(k)?;
    let pi = prime_pi(x / l) as f64;
    let xf = x as f64;
    let power = xf.powf(1.0 - 1.0 / (2.0 * k as f64));
    let sk = (k as f64).sqrt();
    let stated = pi + 7.0 * ((a.unsigned_abs() + b.unsigned_abs()) as f64 + sk) * power;
    let intermediate = pi + (5.0 + (2f64.sqrt() + 5.0) * sk) * power;
    Ok((stated, intermediate))
}

/// Upper bound over all square-free n with β = 14 + 2C.
pub fn thm2_bound(a: i64, b: i64, x: f64, constant_c: f64) -> f64 {
    let beta = 14.0 + 2.0 * constant_c;
    let pi = prime_pi(x.floor() as u64) as f64;
    pi + (10.0 * a.unsigned_abs() as f64 + 10.0 * b.unsigned_abs() as f64 + beta) * x * (-x.ln().sqrt()).exp()
}

/// Upper bound when f agrees with S(a,b;p) off finitely many primes; `p_f = None` means no exceptional prime.
pub fn thm3_bound(a: i64, b: i64, k: usize, x: u64, p_f: Option<u64>) -> f64 {
    let xf = x as f64;
    let main = (a.unsigned_abs() as f64 + b.unsigned_abs() as f64 + 2.0 * k as f64) * xf.powf(k as f64 / (k as f64 + 1.0));
    main + p_f.map_or(0.0, |p| binomial_f64(p, k as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Thm1,
    Thm2,
    Thm3,
}

/// Evaluated right-hand sides for one bound, keyed by form name.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremBounds {
    pub theorem: Theorem,
    pub values: BTreeMap<String, f64>,
    pub conditional_on_c: bool,
}

/// Right-hand sides for `which` at the query's a, b, X, k; `p_f` feeds `thm3_bound`.
pub fn theorem_bounds(q: &MatchQuery, which: Theorem, p_f: Option<u64>) -> Result<TheoremBounds> {
    q.validate()?;
    let k = match q.k {
        KRange::Fixed(k) => k,
        KRange::All => 2,
    };
    let mut values = BTreeMap::new();
    match which {
        Theorem::Thm1 => {
            let (stated, intermediate) = thm1_bound(q.a, q.b, k, q.x)?;
            values.insert("stated".into(), stated);
            values.insert("intermediate".into(), intermediate);
        }
        Theorem::Thm2 => {
            values.insert("stated".into(), thm2_bound(q.a, q.b, q.x as f64, q.constant_c));
            values.insert("beta".into(), 14.0 + 2.0 * q.constant_c);
        }
        Theorem::Thm3 => {
            values.insert("stated".into(), thm3_bound(q.a, q.b, k, q.x, p_f));
            values.insert("binomial".into(), p_f.map_or(0.0, |p| binomial_f64(p, k as u64)));
        }
    }
    Ok(TheoremBounds { theorem: which, values, conditional_on_c: which == Theorem::Thm2 })
}

fn ab_size(a: i64, b: i64) -> f64 {
    (a.unsigned_abs() + b.unsigned_abs()) as f64
}

/// Primes p ≤ X with S(a,b;p) ≠ η₁f(p), plus numeric-mode bookkeeping.
fn exceptional_scan(ev: &Evaluator) -> Result<(Vec<u64>, Vec<u64>, u64)> {
    let primes: Vec<FactoredInteger> =
        crate::sieve::primes_up_to(ev.q.x).into_iter().map(|p| FactoredInteger::from_primes(&[p])).collect::<Result<_>>()?;
    let groups = ev.run(&primes)?;
    let mut matched = BTreeSet::new();
    let mut undecided = Vec::new();
    let mut esc = 0;
    for g in groups {
        matched.extend(g.matched);
        undecided.extend(g.undecided);
        esc += g.escalations;
    }
    let exceptional = primes.iter().map(|p| p.n()).filter(|p| !matched.contains(p)).collect();
    Ok((exceptional, undecided, esc))
}

/// R_k(X) and its report for a fixed k, or the square-free analogue for `KRange::All`.
pub fn compute_matches(q: &MatchQuery) -> Result<CountReport> {
    q.validate()?;
    let ev = Evaluator { q, small: SmallTables::new(q.x) };
    match q.k {
        KRange::Fixed(k) => fixed_k(&ev, k),
        KRange::All => all_squarefree(&ev),
    }
}

/// [`compute_matches`] with `k` forced to `All`.
pub fn compute_matches_squarefree(q: &MatchQuery) -> Result<CountReport> {
    let mut q = q.clone();
    q.k = KRange::All;
    compute_matches(&q)
}

fn fixed_k(ev: &Evaluator, k: usize) -> Result<CountReport> {
    let q = ev.q;
    let candidates = if k == 1 {
        crate::sieve::primes_up_to(q.x).into_iter().map(|p| FactoredInteger::from_primes(&[p])).collect::<Result<Vec<_>>>()?
    } else {
        squarefree_k_almost(q.x, k)
    };
    let groups = ev.run(&candidates)?;
    let mut matched = Vec::new();
    let mut undecided = Vec::new();
    let mut escalations = 0;
    let mut partition = BTreeMap::new();
    let mut sigma = [0u64; 4];
    for g in groups {
        if !g.matched.is_empty() {
            let cell: Vec<u64> = g.matched.iter().map(|n| n / g.p).collect();
            if k >= 2 {
                sigma[sigma_part(g.p, q.x, k)] += cell.len() as u64;
            }
            partition.insert(g.p, cell);
        }
        matched.extend(g.matched);
        undecided.extend(g.undecided);
        escalations += g.escalations;
    }
    matched.sort_unstable();
    undecided.sort_unstable();
    let r_k = matched.len() as u64;

    let (exceptional, p_f) = if q.scan_exceptional {
        let (exc, und, esc) = exceptional_scan(ev)?;
        undecided.extend(und);
        escalations += esc;
        let p_f = exc.last().copied();
        (Some(exc), p_f)
    } else {
        (None, None)
    };

    let mut bounds = Vec::new();
    if k >= 2 {
        let l = primorial(k)?;
        let (stated, intermediate) = thm1_bound(q.a, q.b, k, q.x)?;
        let big_x = (q.x as f64) > ab_size(q.a, q.b).powi(k as i32 + 1);
        bounds.push(BoundCheck {
            name: "thm1".into(),
            formula: "pi(X/L_k) + 7(|a|+|b|+sqrt(k)) X^(1-1/(2k))".into(),
            lhs: r_k,
            rhs: stated,
            holds: r_k as f64 <= stated,
            upper: true,
            applicable: true,
            note: None,
        });
        bounds.push(BoundCheck {
            name: "thm1-intermediate".into(),
            formula: "pi(X/L_k) + (5+(sqrt(2)+5)sqrt(k)) X^(1-1/(2k))".into(),
            lhs: r_k,
            rhs: intermediate,
            holds: r_k as f64 <= intermediate,
            upper: true,
            applicable: big_x,
            note: (!big_x).then(|| "requires X > (|a|+|b|)^(k+1)".into()),
        });
        let lower = prime_pi(q.x / l) as f64 - k as f64 + 1.0;
        bounds.push(BoundCheck {
            name: "sharpness-lower".into(),
            formula: "pi(X/L_k) - k + 1".into(),
            lhs: r_k,
            rhs: lower,
            holds: r_k as f64 >= lower,
            upper: false,
            applicable: matches!(q.f.rule(), crate::multfun::PrimeRule::SharpnessK { k: fk } if *fk == k) && q.f.a() == q.a && q.f.b() == q.b,
            note: Some("attained by the sharpness-k construction".into()),
        });
        bounds.extend(sigma_bounds(q.a, q.b, k, q.x, &sigma)?);
        if let Some(exc) = &exceptional {
            let upper_half = exc.iter().any(|&p| 2 * p > q.x);
            bounds.push(BoundCheck {
                name: "thm3".into(),
                formula: "(|a|+|b|+2k) X^(k/(k+1)) + binom(p_f, k)".into(),
                lhs: r_k,
                rhs: thm3_bound(q.a, q.b, k, q.x, p_f),
                holds: r_k as f64 <= thm3_bound(q.a, q.b, k, q.x, p_f),
                upper: true,
                applicable: !upper_half,
                note: Some(if exc.is_empty() {
                    "no exceptional prime up to X".to_string()
                } else if upper_half {
                    "warning: exceptional primes reach (X/2, X]; the all-but-finitely-many hypothesis is not supported by the scan".to_string()
                } else {
                    format!("{} exceptional primes up to X, largest {}", exc.len(), p_f.unwrap_or(0))
                }),
            });
        }
    }

    Ok(CountReport {
        a: q.a,
        b: q.b,
        x: q.x,
        k: q.k,
        mode: q.mode,
        matched,
        r_k,
        candidates: candidates.len() as u64,
        partition,
        sigma: (k >= 2).then_some(SigmaSplit(sigma)),
        r1: None,
        by_omega: BTreeMap::from([(k, r_k)]),
        one_matches_eta1: None,
        bounds,
        undecided,
        escalations,
        exceptional_primes: exceptional,
        p_f,
        squarefree_reference: None,
    })
}

fn sigma_bounds(a: i64, b: i64, k: usize, x: u64, sigma: &[u64; 4]) -> Result<Vec<BoundCheck>> {
    let xf = x as f64;
    let kf = k as f64;
    let s = ab_size(a, b);
    let pi_k1 = prime_pi(iroot(x, k as u32 + 1)) as f64;
    let pi_1k = prime_pi(iroot(x, k as u32)) as f64;
    let pi_23 = prime_pi(iroot(x * x, 3)) as f64;
    let pi_l = prime_pi(x / primorial(k)?) as f64;
    let pik1_13 = if k >= 2 { crate::sieve::pi_k(iroot(x, 3), k - 1) as f64 } else { 0.0 };
    let rows = [
        ("sigma1", "pi(X^(1/(k+1)))^k", pi_k1.powi(k as i32), true),
        ("sigma2", "pi(X^(1/k)) + sqrt(2k) pi(X^(1/k))^(k-1/2)", pi_1k + (2.0 * kf).sqrt() * pi_1k.powf(kf - 0.5), xf > s.powi(k as i32 + 1)),
        ("sigma3", "pi(X^(2/3)) + 5 sqrt(k) X^(1-1/(2k))", pi_23 + 5.0 * kf.sqrt() * xf.powf(1.0 - 1.0 / (2.0 * kf)), xf > s.powi(k as i32)),
        ("sigma4", "pi(X/L_k) + 2 pi_(k-1)(X^(1/3))^2", pi_l + 2.0 * pik1_13 * pik1_13, xf > s * s),
    ];
    Ok(rows
        .iter()
        .zip(sigma)
        .map(|(&(name, formula, rhs, applicable), &lhs)| BoundCheck {
            name: name.into(),
            formula: formula.into(),
            lhs,
            rhs,
            holds: lhs as f64 <= rhs,
            upper: true,
            applicable,
            note: None,
        })
        .collect())
}

fn all_squarefree(ev: &Evaluator) -> Result<CountReport> {
    let q = ev.q;
    let candidates = squarefree_up_to(q.x);
    let groups = ev.run(&candidates)?;
    let mut matched = Vec::new();
    let mut undecided = Vec::new();
    let mut escalations = 0;
    let mut partition: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for g in groups {
        let cell: Vec<u64> = g.matched.iter().filter(|&&n| n != g.p).map(|n| n / g.p).collect();
        if !cell.is_empty() {
            partition.insert(g.p, cell);
        }
        matched.extend(g.matched);
        undecided.extend(g.undecided);
        escalations += g.escalations;
    }
    matched.sort_unstable();
    undecided.sort_unstable();
    for cell in partition.values_mut() {
        cell.sort_unstable();
    }
    let mut by_omega = BTreeMap::new();
    for &n in &matched {
        *by_omega.entry(crate::modular::factor(n).len()).or_insert(0u64) += 1;
    }
    let r1 = by_omega.get(&1).copied().unwrap_or(0);
    let primes = crate::sieve::primes_up_to(q.x);
    let matched_set: BTreeSet<u64> = matched.iter().copied().collect();
    let undecided_set: BTreeSet<u64> = undecided.iter().copied().collect();
    let exceptional: Vec<u64> = primes.iter().copied().filter(|p| !matched_set.contains(p) && !undecided_set.contains(p)).collect();
    let p_f = exceptional.last().copied();
    let one = Value::one();
    let eta1 = q.f.eta(1);
    let one_matches = match eta1 {
        Value::Exact(t) => Some(t.decide_eq(one.exact().expect("exact"), q.conductor_cap)? == Decision::Equal),
        Value::Numeric { .. } => None,
    };
    let total = matched.len() as u64;
    let rhs = thm2_bound(q.a, q.b, q.x as f64, q.constant_c);
    let bounds = vec![
        BoundCheck {
            name: "thm2".into(),
            formula: "pi(X) + (10|a|+10|b|+beta) X exp(-sqrt(log X)), beta = 14 + 2C".into(),
            lhs: total,
            rhs,
            holds: total as f64 <= rhs,
            upper: true,
            applicable: true,
            note: Some(format!("conditional on C = {}", q.constant_c)),
        },
        BoundCheck {
            name: "sharpness-lower".into(),
            formula: "pi(X)".into(),
            lhs: total,
            rhs: primes.len() as f64,
            holds: total >= primes.len() as u64,
            upper: false,
            applicable: matches!(q.f.rule(), crate::multfun::PrimeRule::SharpnessSquarefree) && q.f.a() == q.a && q.f.b() == q.b,
            note: Some("attained by the sharpness-squarefree construction".into()),
        },
    ];
    Ok(CountReport {
        a: q.a,
        b: q.b,
        x: q.x,
        k: KRange::All,
        mode: q.mode,
        r_k: total - r1,
        matched,
        candidates: candidates.len() as u64,
        partition,
        sigma: None,
        r1: Some(r1),
        by_omega,
        one_matches_eta1: one_matches,
        bounds,
        undecided,
        escalations,
        exceptional_primes: Some(exceptional),
        p_f,
        squarefree_reference: Some(q.x as f64 / ZETA2),
    })
}

/// Result of a lemma check on concrete data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "detail")]
pub enum LemmaVerdict {
    Holds,
    Fails(String),
    HypothesisFailed(String),
}

impl LemmaVerdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, LemmaVerdict::Fails(_))
    }
}

/// ∏ primes | u² − v².
pub fn divisor_condition(u: u64, v: u64, primes: &[u64]) -> bool {
    let d = (u as i128 * u as i128 - v as i128 * v as i128).unsigned_abs();
    primes.iter().all(|&p| d.is_multiple_of(p as u128))
}

/// The divisor lemma for data in `report`: if u ≠ v lie in every R^{p_i}
/// and (∏p_i, ab) = 1 then ∏p_i | u² − v². With `v = None` the R₁ variant is
/// checked: every p_i ∈ R₁ and u ∈ ⋂R^{p_i} give ∏p_i | u² − 1.
pub fn verify_divisor_lemma(report: &CountReport, u: u64, v: Option<u64>, primes: &[u64]) -> LemmaVerdict {
    if primes.len() < 2 || primes.iter().collect::<BTreeSet<_>>().len() != primes.len() {
        return LemmaVerdict::HypothesisFailed("need at least two distinct primes".into());
    }
    if v == Some(u) {
        return LemmaVerdict::HypothesisFailed("u = v".into());
    }
    let ab = (report.a as i128 * report.b as i128).unsigned_abs();
    if primes.iter().any(|&p| ab.is_multiple_of(p as u128)) {
        return LemmaVerdict::HypothesisFailed("a prime divides ab".into());
    }
    let member = |p: u64, w: u64| report.partition.get(&p).is_some_and(|c| c.binary_search(&w).is_ok());
    for &p in primes {
        if !member(p, u) || v.is_some_and(|v| !member(p, v)) {
            return LemmaVerdict::HypothesisFailed(format!("not in R^{p}"));
        }
    }
    if v.is_none() {
        let Some(r1) = report.r1_primes() else {
            return LemmaVerdict::HypothesisFailed("R_1 unknown; run the exceptional scan".into());
        };
        if let Some(p) = primes.iter().find(|p| !r1.contains(p)) {
            return LemmaVerdict::HypothesisFailed(format!("{p} is not in R_1"));
        }
    }
    if divisor_condition(u, v.unwrap_or(1), primes) {
        LemmaVerdict::Holds
    } else {
        LemmaVerdict::Fails(format!("u={u} v={} primes={primes:?}", v.unwrap_or(1)))
    }
}

/// Counts of all divisor-lemma instances with two primes in a report.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DivisorScan {
    pub pairs_checked: u64,
    pub pair_violations: Vec<(u64, u64, u64, u64)>,
    pub r1_checked: u64,
    pub r1_violations: Vec<(u64, u64, u64)>,
}

/// Runs [`verify_divisor_lemma`] over every pair of cells and every pair of
/// their common elements (and, with R₁ data, every common element).
pub fn divisor_lemma_scan(report: &CountReport) -> DivisorScan {
    let mut out = DivisorScan::default();
    let r1 = report.r1_primes();
    let ab = (report.a as i128 * report.b as i128).unsigned_abs();
    let cells: Vec<(&u64, &Vec<u64>)> = report.partition.iter().filter(|(p, _)| !ab.is_multiple_of(**p as u128)).collect();
    for (i, (&p, cp)) in cells.iter().enumerate() {
        for (&q, cq) in &cells[i + 1..] {
            let common: Vec<u64> = cp.iter().copied().filter(|w| cq.binary_search(w).is_ok()).collect();
            for (j, &u) in common.iter().enumerate() {
                for &v in &common[j + 1..] {
                    out.pairs_checked += 1;
                    if verify_divisor_lemma(report, u, Some(v), &[p, q]).is_failure() {
                        out.pair_violations.push((p, q, u, v));
                    }
                }
                if r1.as_ref().is_some_and(|r| r.contains(&p) && r.contains(&q)) {
                    out.r1_checked += 1;
                    if verify_divisor_lemma(report, u, None, &[p, q]).is_failure() {
                        out.r1_violations.push((p, q, u));
                    }
                }
            }
        }
    }
    out
}

/// One intersection property checked over a prime range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionVerdict {
    pub name: String,
    /// Primes in (lo, hi] with their cells.
    pub lo: f64,
    pub hi: f64,
    /// Number of cells intersected.
    pub arity: usize,
    /// Largest allowed intersection size (1, or 0 for the R₁ versions).
    pub allowed: usize,
    pub cells: usize,
    pub hypothesis: bool,
    pub holds: bool,
    pub witness: Option<Vec<u64>>,
}

/// Checks |⋂ of any `arity` cells| ≤ `allowed` through element and pair degrees:
/// with allowed = 1 no pair of elements may lie in `arity` cells; with allowed = 0
/// no single element may.
fn intersection_property(cells: &[(&u64, &Vec<u64>)], arity: usize, allowed: usize) -> (bool, Option<Vec<u64>>) {
    if allowed == 0 {
        let mut deg: HashMap<u64, usize> = HashMap::new();
        for (_, c) in cells {
            for &u in c.iter() {
                let d = deg.entry(u).or_insert(0);
                *d += 1;
                if *d >= arity {
                    return (false, Some(vec![u]));
                }
            }
        }
        return (true, None);
    }
    let mut deg: HashMap<(u64, u64), usize> = HashMap::new();
    for (_, c) in cells {
        for (i, &u) in c.iter().enumerate() {
            for &v in &c[i + 1..] {
                let d = deg.entry((u, v)).or_insert(0);
                *d += 1;
                if *d >= arity {
                    return (false, Some(vec![u, v]));
                }
            }
        }
    }
    (true, None)
}

/// The three bullet intersection properties over the ranges (X^{2/3}, X/L_k],
/// (X^{1/k}, X^{2/3}] and (X^{1/(k+1)}, X^{1/k}], together with their R₁
/// versions when the report carries an exceptional-prime scan.
pub fn verify_intersection_bounds(report: &CountReport, k: usize) -> Result<Vec<IntersectionVerdict>> {
    verify_intersection_on(&report.partition, report.x, k, report.a, report.b, report.r1_primes().as_ref())
}

/// [`verify_intersection_bounds`] on an explicit partition.
pub fn verify_intersection_on(
    partition: &BTreeMap<u64, Vec<u64>>,
    x: u64,
    k: usize,
    a: i64,
    b: i64,
    r1: Option<&BTreeSet<u64>>,
) -> Result<Vec<IntersectionVerdict>> {
    if k < 2 {
        return Err(Error::InvalidInput("intersection bounds need k ≥ 2".into()));
    }
    let l = primorial(k)?;
    let xf = x as f64;
    let s = ab_size(a, b);
    // (name, arity, t, Σ part, lo, hi)
    let ranges = [
        ("top", 2, 2, 3, xf.powf(2.0 / 3.0), xf / l as f64),
        ("middle", 2 * k - 2, k, 2, xf.powf(1.0 / k as f64), xf.powf(2.0 / 3.0)),
        ("low", 2 * k, k + 1, 1, xf.powf(1.0 / (k as f64 + 1.0)), xf.powf(1.0 / k as f64)),
    ];
    let mut out = Vec::new();
    for (name, arity, t, part, lo, hi) in ranges {
        let in_range = |p: u64| sigma_part(p, x, k) == part && (part != 3 || p * l <= x);
        let cells: Vec<(&u64, &Vec<u64>)> = partition.iter().filter(|(p, _)| in_range(**p)).collect();
        let hypothesis = xf > s.powi(t as i32);
        let (holds, witness) = intersection_property(&cells, arity, 1);
        out.push(IntersectionVerdict { name: name.into(), lo, hi, arity, allowed: 1, cells: cells.len(), hypothesis, holds, witness });
        if let Some(r1) = r1 {
            let cells: Vec<(&u64, &Vec<u64>)> = cells.into_iter().filter(|(p, _)| r1.contains(p)).collect();
            let (holds, witness) = intersection_property(&cells, arity, 0);
            out.push(IntersectionVerdict {
                name: format!("{name}-r1"),
                lo,
                hi,
                arity,
                allowed: 0,
                cells: cells.len(),
                hypothesis,
                holds,
                witness,
            });
        }
    }
    Ok(out)
}
