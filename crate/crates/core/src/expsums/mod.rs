//! Kloosterman, Birch, Salié and generic polynomial exponential sums.

mod rootsum;

use serde::{Deserialize, Serialize};

pub use crate::modular::{jacobi as jacobi_symbol, mod_inverse};
pub use rootsum::RootSum;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::modular::{gcd, inverse_table, units_mask, is_prime, jacobi, mod_pos, mul_mod};
use crate::CycElem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Kloosterman,
    Birch,
    Salie,
    Generic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Range {
    #[default]
    #[serde(rename = "unit-range")]
    Unit,
    #[serde(rename = "full-range")]
    Full,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    #[default]
    None,
    Jacobi,
}

/// Integer polynomial with ascending coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly(pub Vec<i64>);

impl IntPoly {
    pub fn monomial(deg: usize) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = 1;
        Self(v)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }

    /// `self(x) mod n`.
    pub fn eval_mod(&self, x: u64, n: u64) -> u64 {
        self.0.iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, x, n) + mod_pos(c, n)) % n)
    }

    /// Parses `"x^3"`, `"2x^2-x+1"`, `"0"`, or a comma list of ascending coefficients.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::InvalidInput("empty polynomial".into()));
        }
        if s.contains(',') || !s.contains('x') {
            let v = s
                .split(',')
                .map(|t| t.parse::<i64>().map_err(|e| Error::InvalidInput(format!("{t}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self(v));
        }
        let mut coeffs: Vec<i64> = Vec::new();
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for t in terms {
            let (coef, deg) = match t.find('x') {
                None => (t.as_str(), 0usize),
                Some(i) => {
                    let deg = match &t[i + 1..] {
                        "" => 1,
                        rest => rest
                            .strip_prefix('^')
                            .and_then(|d| d.parse().ok())
                            .ok_or_else(|| Error::InvalidInput(format!("bad term {t}")))?,
                    };
                    (&t[..i], deg)
                }
            };
            let c: i64 = match coef.trim_end_matches('*') {
                "" | "+" => 1,
                "-" => -1,
                c => c.parse().map_err(|_| Error::InvalidInput(format!("bad coefficient in {t}")))?,
            };
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, 0);
            }
            coeffs[deg] += c;
        }
        Ok(Self(coeffs))
    }
}

/// Which sum to evaluate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SumSpec {
    pub family: Family,
    pub a: i64,
    pub b: i64,
    pub c: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<IntPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<IntPoly>,
    /// Range for the generic and Birch families.
    #[serde(default)]
    pub range: Range,
    #[serde(default)]
    pub twist: Twist,
}

impl SumSpec {
    pub fn kloosterman(a: i64, b: i64, c: u64) -> Self {
        Self { family: Family::Kloosterman, a, b, c, g: None, h: None, range: Range::Unit, twist: Twist::None }
    }

    pub fn birch(a: i64, b: i64, c: u64, range: Range) -> Self {
        Self { family: Family::Birch, range, ..Self::kloosterman(a, b, c) }
    }

    pub fn salie(a: i64, b: i64, c: u64) -> Self {
        Self { family: Family::Salie, twist: Twist::Jacobi, ..Self::kloosterman(a, b, c) }
    }

    pub fn generic(u: i64, v: i64, c: u64, g: IntPoly, h: IntPoly, range: Range, twist: Twist) -> Self {
        Self { family: Family::Generic, a: u, b: v, c, g: Some(g), h: Some(h), range, twist }
    }

    /// The same family at new parameters.
    pub fn with(&self, a: i64, b: i64, c: u64) -> Self {
        Self { a, b, c, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 {
            return Err(Error::ZeroModulus);
        }
        let twisted = self.family == Family::Salie || self.twist == Twist::Jacobi;
        if twisted && self.c.is_multiple_of(2) {
            return Err(Error::EvenModulus(self.c));
        }
        if self.family == Family::Generic {
            match (&self.g, &self.h) {
                (Some(g), Some(h)) if !g.0.is_empty() && !h.0.is_empty() => {}
                _ => return Err(Error::InvalidInput("generic sums need nonempty g and h".into())),
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric { precision_bits: u32 },
}

impl Backend {
    pub const DEFAULT_PRECISION_BITS: u32 = 100;

    pub fn numeric() -> Self {
        Backend::Numeric { precision_bits: Self::DEFAULT_PRECISION_BITS }
    }
}

/// A numeric value with its working precision and an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericValue {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
    pub precision_bits: u32,
    pub error_bound: f64,
}

impl NumericValue {
    pub fn abs(&self) -> DoubleDouble {
        (self.re * self.re + self.im * self.im).sqrt()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "re": self.re.to_decimal_string(32),
            "im": self.im.to_decimal_string(32),
            "precision_bits": self.precision_bits,
            "error_bound": self.error_bound,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SumResult {
    Exact(CycElem),
    Numeric(NumericValue),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumValue {
    pub spec: SumSpec,
    pub result: SumResult,
}

fn check_precision(bits: u32) -> Result<()> {
    if bits > 100 || bits == 0 {
        Err(Error::PrecisionUnsupported(bits))
    } else {
        Ok(())
    }
}

pub(crate) fn numeric_from_counts(rs: &RootSum, precision_bits: u32) -> Result<NumericValue> {
    check_precision(precision_bits)?;
    let z = rs.to_complex::<DoubleDouble>();
    Ok(NumericValue { re: z.re, im: z.im, precision_bits, error_bound: rs.error_bound_dd() })
}

impl SumValue {
    pub fn exact(&self) -> Option<&CycElem> {
        match &self.result {
            SumResult::Exact(e) => Some(e),
            SumResult::Numeric(_) => None,
        }
    }

    /// Numeric view; exact values are evaluated at `precision_bits`.
    pub fn numeric(&self, precision_bits: u32) -> Result<NumericValue> {
        match &self.result {
            SumResult::Numeric(n) => Ok(*n),
            SumResult::Exact(e) => {
                let (z, err) = e.to_complex_bits(precision_bits)?;
                Ok(NumericValue { re: z.re, im: z.im, precision_bits, error_bound: err })
            }
        }
    }

    pub fn to_json(&self, precision_bits: u32) -> Result<serde_json::Value> {
        Ok(serde_json::json!({
            "spec": self.spec,
            "exact": self.exact(),
            "numeric": self.numeric(precision_bits)?.to_json(),
        }))
    }
}

/// Group-ring form of the sum described by `spec`.
pub fn sum_counts(spec: &SumSpec) -> Result<RootSum> {
    spec.validate()?;
    let c = spec.c;
    let (u, v) = (mod_pos(spec.a, c), mod_pos(spec.b, c));
    let mut rs = RootSum::new(c)?;
    let unit = units_mask(c);
    match spec.family {
        Family::Kloosterman | Family::Salie => {
            let inv = inverse_table(c);
            let twisted = spec.family == Family::Salie;
            for x in 0..c {
                if !unit[x as usize] {
                    continue;
                }
                let w = if twisted { jacobi(x as i64, c)? as i64 } else { 1 };
                let e = (mul_mod(u, x, c) + mul_mod(v, inv[x as usize], c)) % c;
                rs.add_root(e, w);
            }
        }
        Family::Birch => {
            for x in 0..c {
                if spec.range == Range::Unit && !unit[x as usize] {
                    continue;
                }
                let x3 = mul_mod(mul_mod(x, x, c), x, c);
                rs.add_root((mul_mod(u, x3, c) + mul_mod(v, x, c)) % c, 1);
            }
        }
        Family::Generic => {
            let (g, h) = (spec.g.as_ref().expect("validated"), spec.h.as_ref().expect("validated"));
            let inv = (spec.range == Range::Unit).then(|| inverse_table(c));
            for x in 0..c {
                let hx = match &inv {
                    Some(t) => {
                        if !unit[x as usize] {
                            continue;
                        }
                        t[x as usize]
                    }
                    None => x,
                };
                let w = match spec.twist {
                    Twist::Jacobi => jacobi(x as i64, c)? as i64,
                    Twist::None => 1,
                };
                if w == 0 {
                    continue;
                }
                let e = (mul_mod(u, g.eval_mod(x, c), c) + mul_mod(v, h.eval_mod(hx, c), c)) % c;
                rs.add_root(e, w);
            }
        }
    }
    Ok(rs)
}

/// Group-ring form of S(a,b;c) from a precomputed [`inverse_table`] of `c`.
///
/// Useful when many sums share a modulus.
pub fn kloosterman_counts_with(a: i64, b: i64, c: u64, inv: &[u64]) -> Result<RootSum> {
    if inv.len() as u64 != c {
        return Err(Error::InvalidInput("inverse table does not match the modulus".into()));
    }
    let (u, v) = (mod_pos(a, c), mod_pos(b, c));
    let mut counts = vec![0i64; c as usize];
    if c == 1 {
        counts[0] = 1;
    } else if c < 1 << 31 {
        for (x, &xi) in inv.iter().enumerate() {
            if xi != 0 {
                counts[((u * x as u64 + v * xi) % c) as usize] += 1;
            }
        }
    } else {
        for (x, &xi) in inv.iter().enumerate() {
            if xi != 0 {
                counts[((mul_mod(u, x as u64, c) + mul_mod(v, xi, c)) % c) as usize] += 1;
            }
        }
    }
    RootSum::from_counts(c, counts)
}

/// Evaluates `spec` with the requested backend.
pub fn evaluate(spec: &SumSpec, backend: Backend) -> Result<SumValue> {
    let rs = sum_counts(spec)?;
    let result = match backend {
        Backend::Exact => SumResult::Exact(rs.to_exact()?),
        Backend::Numeric { precision_bits } => SumResult::Numeric(numeric_from_counts(&rs, precision_bits)?),
    };
    Ok(SumValue { spec: spec.clone(), result })
}

/// S(a,b;c) = Σ_{x ∈ (Z/c)^×} e((ax + b x̄)/c).
pub fn kloosterman(a: i64, b: i64, c: u64, backend: Backend) -> Result<SumValue> {
    evaluate(&SumSpec::kloosterman(a, b, c), backend)
}

/// Kl(a,p) = S(a,1;p).
pub fn kl(a: i64, p: u64, backend: Backend) -> Result<SumValue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    kloosterman(a, 1, p, backend)
}

/// B(a,b;c) = Σ e((a x³ + b x)/c) over units (`Range::Unit`) or all residues.
pub fn birch(a: i64, b: i64, c: u64, range: Range, backend: Backend) -> Result<SumValue> {
    evaluate(&SumSpec::birch(a, b, c, range), backend)
}

/// S̃(a,b;c) = Σ_{x ∈ (Z/c)^×} (x/c)·e((ax + b x̄)/c), odd `c` only.
pub fn salie(a: i64, b: i64, c: u64, backend: Backend) -> Result<SumValue> {
    evaluate(&SumSpec::salie(a, b, c), backend)
}

pub fn generic_sum(spec: &SumSpec, backend: Backend) -> Result<SumValue> {
    if spec.family != Family::Generic {
        return Err(Error::InvalidInput("generic_sum expects a generic spec".into()));
    }
    evaluate(spec, backend)
}

/// Group-ring form of S(a,b;∏ factors) through twisted multiplicativity
/// S(a,b;mn) = S(a n̄, b n̄; m)·S(a m̄, b m̄; n).
pub fn kloosterman_crt_counts(a: i64, b: i64, factors: &[u64]) -> Result<RootSum> {
    for (i, &m) in factors.iter().enumerate() {
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        if factors[i + 1..].iter().any(|&n| gcd(m, n) != 1) {
            return Err(Error::NonCoprimeFactors);
        }
    }
    match factors {
        [] => sum_counts(&SumSpec::kloosterman(a, b, 1)),
        [c] => sum_counts(&SumSpec::kloosterman(a, b, *c)),
        [m, rest @ ..] => {
            let m = *m;
            let n = rest.iter().try_fold(1u64, |acc, &f| acc.checked_mul(f)).ok_or(Error::Overflow)?;
            let n_bar = mod_inverse(n as i64, m)? as i64;
            let m_bar = mod_inverse(m as i64, n)? as i64;
            let left = sum_counts(&SumSpec::kloosterman(
                (a as i128 * n_bar as i128).rem_euclid(m as i128) as i64,
                (b as i128 * n_bar as i128).rem_euclid(m as i128) as i64,
                m,
            ))?;
            let right = kloosterman_crt_counts(
                (a as i128 * m_bar as i128).rem_euclid(n as i128) as i64,
                (b as i128 * m_bar as i128).rem_euclid(n as i128) as i64,
                rest,
            )?;
            left.tensor(&right)
        }
    }
}

/// Exact S(a,b;∏ factors) assembled from its coprime factors.
pub fn kloosterman_crt(a: i64, b: i64, factors: &[u64]) -> Result<SumValue> {
    let rs = kloosterman_crt_counts(a, b, factors)?;
    let c = rs.conductor();
    Ok(SumValue { spec: SumSpec::kloosterman(a, b, c), result: SumResult::Exact(rs.to_exact()?) })
}
