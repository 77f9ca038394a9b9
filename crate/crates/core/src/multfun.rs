//! Multiplicative functions given by their values at primes, evaluated on
//! square-free integers.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value as J};

use crate::error::{Error, Result};
use crate::expsums::{kloosterman_counts_with, sum_counts, Family, Range, SumSpec};
use crate::modular::{is_prime, mod_inverse, mod_pos, prime_inverse_table};
use crate::sieve::{primorial, FactoredInteger};
use crate::value::{parse_rational, PureTensor, Value};
use crate::CycElem;

/// Primes up to this bound have their values memoized.
pub const CACHE_PRIME_BOUND: u64 = 2048;

/// Largest primorial accepted by [`MultFun::sharpness_k`].
pub const MAX_PRIMORIAL: u64 = 1 << 20;

/// Value at primes missing from an explicit table.
#[derive(Clone, Debug, PartialEq)]
pub enum DefaultRule {
    One,
    /// f(p) = η₁⁻¹·S(a,b;p).
    KlMatch,
    /// f(p) = scale·E(a,b;p) for a named family.
    Expr { family: Family, range: Range, a: i64, b: i64, scale: Value },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrimeRule {
    Table { values: BTreeMap<u64, Value>, default: DefaultRule },
    /// f(p) = 1 for p | L_k, otherwise η_k⁻¹·S(a,b;pL_k).
    SharpnessK { k: usize },
    /// f(p) = η₁⁻¹·S(a,b;p).
    SharpnessSquarefree,
    /// Pseudo-random small values, zero included, fixed by the seed.
    Random { seed: u64 },
}

/// The sequence η₁, η₂, …; indices past the end repeat the last entry.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaSeq(Vec<Value>);

impl EtaSeq {
    pub fn new(values: Vec<Value>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty η sequence".into()));
        }
        for v in &values {
            if v.is_zero() != Some(false) {
                return Err(Error::ZeroEta);
            }
        }
        Ok(Self(values))
    }

    pub fn constant(eta: Value) -> Result<Self> {
        Self::new(vec![eta])
    }

    /// η_k for k ≥ 1 (k = 0 is treated as 1).
    pub fn get(&self, k: usize) -> &Value {
        &self.0[k.clamp(1, self.0.len()) - 1]
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    fn to_json(&self) -> Result<J> {
        if self.0.len() == 1 {
            self.0[0].to_json()
        } else {
            Ok(J::Array(self.0.iter().map(Value::to_json).collect::<Result<_>>()?))
        }
    }

    /// An array is always a sequence; a lone rational η is written `"n/d"`.
    fn from_json(v: &J) -> Result<Self> {
        match v.as_array() {
            Some(items) => Self::new(items.iter().map(Value::from_json).collect::<Result<_>>()?),
            None => Self::constant(Value::from_json(v)?),
        }
    }
}

/// A multiplicative function f with f(1) = 1 together with its η sequence.
///
/// Prime values are computed on demand. Values at primes up to
/// [`CACHE_PRIME_BOUND`] are memoized behind a lock; every value is a
/// deterministic function of the specification, so concurrent fills race
/// benignly and whichever write lands is identical to the others.
#[derive(Debug)]
pub struct MultFun {
    a: i64,
    b: i64,
    rule: PrimeRule,
    eta: EtaSeq,
    cache: RwLock<HashMap<u64, Value>>,
}

impl Clone for MultFun {
    fn clone(&self) -> Self {
        Self::build(self.a, self.b, self.rule.clone(), self.eta.clone())
    }
}

impl PartialEq for MultFun {
    fn eq(&self, other: &Self) -> bool {
        (self.a, self.b, &self.rule, &self.eta) == (other.a, other.b, &other.rule, &other.eta)
    }
}

impl MultFun {
    fn build(a: i64, b: i64, rule: PrimeRule, eta: EtaSeq) -> Self {
        Self { a, b, rule, eta, cache: RwLock::new(HashMap::new()) }
    }

    /// Explicit prime table with a fallback rule. Keys must be primes.
    pub fn table(a: i64, b: i64, values: BTreeMap<u64, Value>, default: DefaultRule, eta: EtaSeq) -> Result<Self> {
        if let Some(&p) = values.keys().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self::build(a, b, PrimeRule::Table { values, default }, eta))
    }

    /// f ≡ 1 with constant η.
    pub fn constant_one(eta: Value) -> Result<Self> {
        Self::table(1, 1, BTreeMap::new(), DefaultRule::One, EtaSeq::constant(eta)?)
    }

    pub fn sharpness_k(a: i64, b: i64, eta: Value, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::OutOfRange(format!("sharpness construction needs k ≥ 2, got {k}")));
        }
        if a == 0 || b == 0 {
            return Err(Error::InvalidInput("ab = 0".into()));
        }
        let l = primorial(k)?;
        if l > MAX_PRIMORIAL {
            return Err(Error::UnsupportedConductor(l));
        }
        Ok(Self::build(a, b, PrimeRule::SharpnessK { k }, EtaSeq::constant(eta)?))
    }

    pub fn sharpness_squarefree(a: i64, b: i64, eta: Value) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidInput("ab = 0".into()));
        }
        Ok(Self::build(a, b, PrimeRule::SharpnessSquarefree, EtaSeq::constant(eta)?))
    }

    pub fn random_table(seed: u64, eta: Value) -> Result<Self> {
        Ok(Self::build(1, 1, PrimeRule::Random { seed }, EtaSeq::constant(eta)?))
    }

    /// Replaces the η sequence.
    pub fn with_eta(self, eta: EtaSeq) -> Self {
        Self::build(self.a, self.b, self.rule, eta)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn rule(&self) -> &PrimeRule {
        &self.rule
    }

    pub fn eta(&self, k: usize) -> &Value {
        self.eta.get(k)
    }

    pub fn eta_seq(&self) -> &EtaSeq {
        &self.eta
    }

    /// f(p) for a prime p.
    pub fn prime_value(&self, p: u64) -> Result<Value> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > CACHE_PRIME_BOUND {
            return self.compute_prime_value(p);
        }
        if let Some(v) = self.cache.read().expect("cache lock").get(&p) {
            return Ok(v.clone());
        }
        let v = self.compute_prime_value(p)?;
        self.cache.write().expect("cache lock").insert(p, v.clone());
        Ok(v)
    }

    fn compute_prime_value(&self, p: u64) -> Result<Value> {
        match &self.rule {
            PrimeRule::Table { values, default } => match values.get(&p) {
                Some(v) => Ok(v.clone()),
                None => match default {
                    DefaultRule::One => Ok(Value::one()),
                    DefaultRule::KlMatch => kl_value(self.a, self.b, p)?.mul(&self.eta.get(1).inverse()?),
                    DefaultRule::Expr { family, range, a, b, scale } => {
                        let spec = family_spec(*family, *range, *a, *b, p);
                        Value::Exact(exact_sum(&spec)?).mul(scale)
                    }
                },
            },
            PrimeRule::SharpnessK { k } => {
                let l = primorial(*k)?;
                if l % p == 0 {
                    return Ok(Value::one());
                }
                let (a, b) = (self.a, self.b);
                let l_bar = mod_inverse(l as i64, p)? as i64;
                let p_bar = mod_inverse(p as i64, l)? as i64;
                let left = exact_sum(&SumSpec::kloosterman(mul_i64(a, l_bar, p), mul_i64(b, l_bar, p), p))?;
                let right = exact_sum(&SumSpec::kloosterman(mul_i64(a, p_bar, l), mul_i64(b, p_bar, l), l))?;
                Value::Exact(left.mul(&right)?).mul(&self.eta.get(*k).inverse()?)
            }
            PrimeRule::SharpnessSquarefree => kl_value(self.a, self.b, p)?.mul(&self.eta.get(1).inverse()?),
            PrimeRule::Random { seed } => Ok(random_value(*seed, p)),
        }
    }

    /// f(n) = ∏_{p | n} f(p) for square-free n.
    pub fn eval_squarefree(&self, n: &FactoredInteger) -> Result<Value> {
        if !n.is_squarefree() {
            return Err(Error::NotSquarefree(n.n()));
        }
        let mut acc = Value::one();
        for p in n.primes() {
            acc = acc.mul(&self.prime_value(p)?)?;
        }
        Ok(acc)
    }

    pub fn eval(&self, n: u64) -> Result<Value> {
        self.eval_squarefree(&FactoredInteger::new(n)?)
    }

    pub fn to_json(&self) -> Result<J> {
        let mut o = Map::new();
        o.insert("a".into(), json!(self.a));
        o.insert("b".into(), json!(self.b));
        o.insert("eta".into(), self.eta.to_json()?);
        match &self.rule {
            PrimeRule::Table { values, default } => {
                let mut primes = Map::new();
                for (p, v) in values {
                    primes.insert(p.to_string(), v.to_json()?);
                }
                o.insert("primes".into(), J::Object(primes));
                o.insert("default".into(), J::String(default_to_string(default)?));
            }
            PrimeRule::SharpnessK { k } => {
                o.insert("construction".into(), json!("sharpness-k"));
                o.insert("k".into(), json!(k));
            }
            PrimeRule::SharpnessSquarefree => {
                o.insert("construction".into(), json!("sharpness-squarefree"));
            }
            PrimeRule::Random { seed } => {
                o.insert("construction".into(), json!("random"));
                o.insert("seed".into(), json!(seed));
            }
        }
        Ok(J::Object(o))
    }

    /// Parses the JSON schema
    /// `{"eta": v | [v…], "primes": {"p": v}, "default": "one" | "kl_match" | "expr:family,a,b,scale"}`
    /// or `{"construction": "sharpness-k" | "sharpness-squarefree" | "random", …}`.
    /// Prime keys may also sit at the top level, and `kl_ratio` is accepted for `kl_match`.
    pub fn from_json(v: &J) -> Result<Self> {
        let o = v.as_object().ok_or_else(|| Error::Schema("expected an object".into()))?;
        let int = |key: &str, dflt: i64| -> Result<i64> {
            match o.get(key) {
                None => Ok(dflt),
                Some(x) => x.as_i64().or_else(|| x.as_str().and_then(|s| s.trim().parse().ok())).ok_or_else(|| Error::Schema(format!("bad {key}"))),
            }
        };
        let (a, b) = (int("a", 1)?, int("b", 1)?);
        let eta = match o.get("eta") {
            None => EtaSeq::constant(Value::one())?,
            Some(e) => EtaSeq::from_json(e)?,
        };
        if let Some(c) = o.get("construction") {
            let allowed = ["construction", "a", "b", "eta", "k", "seed"];
            if let Some(k) = o.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(Error::Schema(format!("unexpected key {k}")));
            }
            let f = match c.as_str() {
                Some("sharpness-k") => {
                    let k = int("k", 2)?;
                    Self::sharpness_k(a, b, eta.get(k as usize).clone(), usize::try_from(k).map_err(|_| Error::Schema("bad k".into()))?)?
                }
                Some("sharpness-squarefree") => Self::sharpness_squarefree(a, b, eta.get(1).clone())?,
                Some("random") => Self::random_table(int("seed", 0)? as u64, Value::one())?,
                _ => return Err(Error::Schema(format!("unknown construction {c}"))),
            };
            return Ok(f.with_eta(eta));
        }
        let mut values = BTreeMap::new();
        let mut put = |key: &str, val: &J| -> Result<()> {
            let p: u64 = key.trim().parse().map_err(|_| Error::Schema(format!("bad prime key {key}")))?;
            if !is_prime(p) {
                return Err(Error::Schema(format!("key {p} is not prime")));
            }
            values.insert(p, Value::from_json(val)?);
            Ok(())
        };
        for (key, val) in o {
            match key.as_str() {
                "a" | "b" | "eta" | "default" => {}
                "primes" => {
                    let table = val.as_object().ok_or_else(|| Error::Schema("primes must be an object".into()))?;
                    for (p, x) in table {
                        put(p, x)?;
                    }
                }
                k if k.chars().all(|c| c.is_ascii_digit()) => put(k, val)?,
                k => return Err(Error::Schema(format!("unexpected key {k}"))),
            }
        }
        let default = match o.get("default") {
            None => DefaultRule::One,
            Some(J::String(s)) => parse_default(s)?,
            Some(x) => return Err(Error::Schema(format!("bad default {x}"))),
        };
        Self::table(a, b, values, default, eta)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json()?)?)?;
        Ok(())
    }
}

/// Reads a function from a JSON file.
pub fn load_multfun(path: &Path) -> Result<MultFun> {
    let text = std::fs::read_to_string(path)?;
    MultFun::from_json(&serde_json::from_str(&text)?)
}

fn mul_i64(a: i64, b: i64, m: u64) -> i64 {
    (a as i128 * b as i128).rem_euclid(m as i128) as i64
}

fn family_spec(family: Family, range: Range, a: i64, b: i64, p: u64) -> SumSpec {
    match family {
        Family::Birch => SumSpec::birch(a, b, p, range),
        Family::Salie => SumSpec::salie(a, b, p),
        _ => SumSpec::kloosterman(a, b, p),
    }
}

/// Exact value of a sum as a single-block tensor.
pub fn exact_sum(spec: &SumSpec) -> Result<PureTensor> {
    let block = sum_counts(spec)?.to_small()?.ok_or(Error::Overflow)?;
    PureTensor::from_block(block)
}

fn kl_value(a: i64, b: i64, p: u64) -> Result<Value> {
    let rs = kloosterman_counts_with(mod_pos(a, p) as i64, mod_pos(b, p) as i64, p, &prime_inverse_table(p))?;
    Ok(Value::Exact(PureTensor::from_block(rs.to_small()?.ok_or(Error::Overflow)?)?))
}

fn random_value(seed: u64, p: u64) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let rat = |n: i64, d: i64| Value::rational(BigRational::new(BigInt::from(n), BigInt::from(d)));
    let root = |m: u64, j: i64| Value::from_cyc(&CycElem::root_power(m, j).expect("small conductor")).expect("root of unity");
    match rng.gen_range(0..8) {
        0 => Value::zero(),
        1 => Value::one(),
        2 => rat(-1, 1),
        3 => rat(2, 1),
        4 => rat(1, 2),
        5 => root(4, 1),
        6 => root(3, 1),
        _ => rat(-3, 5).mul(&root(5, 2)).expect("exact product"),
    }
}

fn default_to_string(d: &DefaultRule) -> Result<String> {
    Ok(match d {
        DefaultRule::One => "one".into(),
        DefaultRule::KlMatch => "kl_match".into(),
        DefaultRule::Expr { family, range, a, b, scale } => {
            let scale = match scale.to_json()? {
                J::String(s) => s,
                _ => return Err(Error::Schema("expr scale must be rational".into())),
            };
            let name = match (family, range) {
                (Family::Birch, Range::Full) => "birch-full",
                (Family::Birch, Range::Unit) => "birch",
                (Family::Salie, _) => "salie",
                _ => "kloosterman",
            };
            format!("expr:{name},{a},{b},{scale}")
        }
    })
}

fn parse_default(s: &str) -> Result<DefaultRule> {
    match s.trim() {
        "one" => Ok(DefaultRule::One),
        "kl_match" | "kl_ratio" => Ok(DefaultRule::KlMatch),
        other => {
            let body = other.strip_prefix("expr:").ok_or_else(|| Error::Schema(format!("unknown default {other}")))?;
            let body = body.trim_start_matches('<').trim_end_matches('>');
            let parts: Vec<&str> = body.split(',').map(str::trim).collect();
            let [name, a, b, rest @ ..] = parts.as_slice() else {
                return Err(Error::Schema(format!("bad expr {other}")));
            };
            let (family, range) = match *name {
                "kloosterman" => (Family::Kloosterman, Range::Unit),
                "birch" => (Family::Birch, Range::Unit),
                "birch-full" => (Family::Birch, Range::Full),
                "salie" => (Family::Salie, Range::Unit),
                _ => return Err(Error::Schema(format!("unknown family {name}"))),
            };
            let num = |x: &str| x.parse::<i64>().map_err(|_| Error::Schema(format!("bad expr {other}")));
            let scale = match rest {
                [] => Value::one(),
                [s] => Value::rational(parse_rational(s)?),
                _ => return Err(Error::Schema(format!("bad expr {other}"))),
            };
            if scale.is_zero() == Some(true) {
                return Err(Error::Schema("expr scale is zero".into()));
            }
            Ok(DefaultRule::Expr { family, range, a: num(a)?, b: num(b)?, scale })
        }
    }
}

#[cfg(test)]
mod tests;
