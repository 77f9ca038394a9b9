//! Values of multiplicative functions and sums: exact pure tensors over
//! coprime cyclotomic blocks, or numeric complex numbers with error bounds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::modular::{gcd, lcm};
use crate::{CycElem, CycSmall};

/// Exact element `scalar · ⊗ blocks` of Q(ζ_M) with M the product of the
/// pairwise coprime block conductors.
///
/// Blocks have conductor ≥ 3 and primitive integer coefficients; rational
/// factors live in `scalar`. Zero is `scalar = 0` with no blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct PureTensor {
    scalar: BigRational,
    blocks: BTreeMap<u64, CycSmall>,
}

/// Outcome of an equality test that may give up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Equal,
    Unequal,
    Undecided,
}

fn content(v: &[i64]) -> i64 {
    let mut g = 0i64;
    for c in v {
        g = g.gcd(c);
        if g == 1 {
            break;
        }
    }
    g
}

impl PureTensor {
    pub fn zero() -> Self {
        Self { scalar: BigRational::zero(), blocks: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self { scalar: r, blocks: BTreeMap::new() }
    }

    pub fn from_block(block: CycSmall) -> Result<Self> {
        let mut t = Self::one();
        t.insert_block(block)?;
        Ok(t)
    }

    /// Exact value of a rational-coefficient element.
    pub fn from_cyc(e: &CycElem) -> Result<Self> {
        let (num, den) = e.clear_denominators();
        let coeffs = num
            .coeffs()
            .iter()
            .map(|c| c.to_i64().ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        let block = CycSmall::from_reduced(e.conductor(), coeffs)?;
        let mut t = Self::from_block(block)?;
        t.scalar /= BigRational::from_integer(den);
        Ok(t)
    }

    pub fn scalar(&self) -> &BigRational {
        &self.scalar
    }

    pub fn blocks(&self) -> impl Iterator<Item = &CycSmall> {
        self.blocks.values()
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    /// Product of the block conductors.
    pub fn conductor(&self) -> u64 {
        self.blocks.keys().product()
    }

    fn make_zero(&mut self) {
        self.scalar = BigRational::zero();
        self.blocks.clear();
    }

    fn insert_block(&mut self, block: CycSmall) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        let mut block = block;
        loop {
            let g = content(block.coeffs());
            if g == 0 {
                self.make_zero();
                return Ok(());
            }
            let g = if block.coeffs().iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) { -g } else { g };
            if g != 1 {
                self.scalar *= BigRational::from_integer(BigInt::from(g));
                block = block.map(|&c| c / g);
            }
            if block.conductor() <= 2 {
                self.scalar *= BigRational::from_integer(BigInt::from(block.coeffs()[0]));
                if self.scalar.is_zero() {
                    self.make_zero();
                }
                return Ok(());
            }
            let clash = self.blocks.keys().copied().find(|&m| gcd(m, block.conductor()) != 1);
            match clash {
                None => {
                    self.blocks.insert(block.conductor(), block);
                    return Ok(());
                }
                Some(m) => {
                    let other = self.blocks.remove(&m).expect("present");
                    block = block.checked_mul(&other)?.ok_or(Error::Overflow)?;
                }
            }
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut t = self.clone();
        t.scalar *= r;
        if t.scalar.is_zero() {
            t.make_zero();
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut t = self.clone();
        t.scalar *= &other.scalar;
        if t.scalar.is_zero() {
            t.make_zero();
            return Ok(t);
        }
        for b in other.blocks.values() {
            t.insert_block(b.clone())?;
        }
        Ok(t)
    }

    /// The value as a single element of Q(ζ_M).
    pub fn to_cyc(&self) -> Result<CycElem> {
        let mut acc = CycElem::from_scalar(1, self.scalar.clone())?;
        for b in self.blocks.values() {
            acc = acc.try_mul(&b.to_rational())?;
        }
        Ok(acc)
    }

    /// Numeric value with an absolute error bound.
    pub fn to_complex(&self) -> (Complex<DoubleDouble>, f64) {
        let s = crate::cyclotomic::ToReal::to_real::<DoubleDouble>(&self.scalar);
        let mut acc = (Complex::new(s, DoubleDouble::ZERO), s.abs().to_f64() * DoubleDouble::EPSILON * 4.0);
        for b in self.blocks.values() {
            let (z, e) = b.to_complex_bits(100).expect("100 bits is supported");
            acc = mul_with_error(acc, (z, e));
        }
        acc
    }

    /// Exact equality through the tensor criterion.
    ///
    /// Blocks of both sides are grouped into classes of conductors sharing
    /// a prime; within a class both sides are embedded at the class lcm and
    /// must be rationally proportional, and the scalars times the class
    /// ratios must agree. A class lcm above `conductor_cap` gives `Undecided`.
    pub fn decide_eq(&self, other: &Self, conductor_cap: u64) -> Result<Decision> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ok(Decision::Equal),
            (true, false) | (false, true) => return Ok(Decision::Unequal),
            _ => {}
        }
        let mut classes: Vec<(u64, Vec<&CycSmall>, Vec<&CycSmall>)> = Vec::new();
        let tagged = self.blocks.values().map(|b| (b, true)).chain(other.blocks.values().map(|b| (b, false)));
        for (b, left) in tagged {
            let mut merged = (b.conductor(), Vec::new(), Vec::new());
            if left {
                merged.1.push(b);
            } else {
                merged.2.push(b);
            }
            let mut i = 0;
            while i < classes.len() {
                if gcd(classes[i].0, merged.0) != 1 {
                    let c = classes.swap_remove(i);
                    merged.0 = lcm(merged.0, c.0);
                    merged.1.extend(c.1);
                    merged.2.extend(c.2);
                    i = 0;
                } else {
                    i += 1;
                }
            }
            classes.push(merged);
        }
        let mut ratio = self.scalar.clone() / &other.scalar;
        for (l, xs, ys) in classes {
            // a lone block on each side at the same conductor needs no embedding
            let lone = xs.len() == 1 && ys.len() == 1 && xs[0].conductor() == ys[0].conductor();
            if l > conductor_cap && !lone {
                return Ok(Decision::Undecided);
            }
            let (x, y) = if lone {
                (xs[0].clone(), ys[0].clone())
            } else {
                let (Some(x), Some(y)) = (class_product(l, &xs)?, class_product(l, &ys)?) else {
                    return Ok(Decision::Undecided);
                };
                (x, y)
            };
            match proportion(x.coeffs(), y.coeffs()) {
                None => return Ok(Decision::Unequal),
                Some(r) => ratio *= r,
            }
        }
        Ok(if ratio.is_one() { Decision::Equal } else { Decision::Unequal })
    }
}

/// Product of pairwise coprime blocks, embedded at conductor `l`; `None` on overflow.
fn class_product(l: u64, blocks: &[&CycSmall]) -> Result<Option<CycSmall>> {
    let mut acc = CycSmall::one(l)?;
    for b in blocks {
        let Some(e) = b.checked_embed(l)? else { return Ok(None) };
        match acc.checked_mul(&e)? {
            Some(p) => acc = p,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// `r` with `x = r·y` when `y ≠ 0` and the vectors are proportional.
fn proportion(x: &[i64], y: &[i64]) -> Option<BigRational> {
    let pivot = y.iter().position(|&c| c != 0)?;
    let (xp, yp) = (x[pivot] as i128, y[pivot] as i128);
    let ok = x.iter().zip(y).all(|(&a, &b)| a as i128 * yp == b as i128 * xp);
    ok.then(|| BigRational::new(BigInt::from(xp), BigInt::from(yp)))
}

/// Product of two approximate values with propagated absolute error.
pub fn mul_with_error(
    (z1, e1): (Complex<DoubleDouble>, f64),
    (z2, e2): (Complex<DoubleDouble>, f64),
) -> (Complex<DoubleDouble>, f64) {
    let z = z1 * z2;
    let a1 = crate::scalar::complex_abs(z1).to_f64();
    let a2 = crate::scalar::complex_abs(z2).to_f64();
    let err = a1 * e2 + a2 * e1 + e1 * e2 + (a1 * a2) * DoubleDouble::EPSILON * 8.0;
    (z, err * (1.0 + 1e-12))
}

/// A function or sum value: exact, or numeric with an error bound.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(PureTensor),
    Numeric { z: Complex<DoubleDouble>, error: f64 },
}

impl Value {
    pub fn one() -> Self {
        Value::Exact(PureTensor::one())
    }

    pub fn zero() -> Self {
        Value::Exact(PureTensor::zero())
    }

    pub fn rational(r: BigRational) -> Self {
        Value::Exact(PureTensor::from_rational(r))
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_cyc(e: &CycElem) -> Result<Self> {
        Ok(Value::Exact(PureTensor::from_cyc(e)?))
    }

    pub fn numeric(re: f64, im: f64) -> Self {
        let z = Complex::new(DoubleDouble::from_f64(re), DoubleDouble::from_f64(im));
        let error = (re.abs() + im.abs()) * f64::EPSILON;
        Value::Numeric { z, error }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn exact(&self) -> Option<&PureTensor> {
        match self {
            Value::Exact(t) => Some(t),
            Value::Numeric { .. } => None,
        }
    }

    /// `Some(true)` if certainly zero, `Some(false)` if certainly not, `None` if unclear.
    pub fn is_zero(&self) -> Option<bool> {
        match self {
            Value::Exact(t) => Some(t.is_zero()),
            Value::Numeric { z, error } => {
                let a = crate::scalar::complex_abs(*z).to_f64();
                if a > *error {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    pub fn to_complex(&self) -> (Complex<DoubleDouble>, f64) {
        match self {
            Value::Exact(t) => t.to_complex(),
            Value::Numeric { z, error } => (*z, *error),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Ok(Value::Exact(a.mul(b)?)),
            _ => {
                let (z, error) = mul_with_error(self.to_complex(), other.to_complex());
                Ok(Value::Numeric { z, error })
            }
        }
    }

    /// Multiplicative inverse; exact values are inverted in their field.
    pub fn inverse(&self) -> Result<Self> {
        match self {
            Value::Exact(t) => {
                if t.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let c = t.to_cyc()?;
                Value::from_cyc(&c.inverse()?)
            }
            Value::Numeric { z, error } => {
                let a = crate::scalar::complex_abs(*z).to_f64();
                if a <= *error {
                    return Err(Error::DivisionByZero);
                }
                let n = z.re * z.re + z.im * z.im;
                let inv = Complex::new(z.re / n, -z.im / n);
                // |1/ẑ − 1/z| ≤ e / (|ẑ|(|ẑ| − e))
                let err = error / (a * (a - error)) + DoubleDouble::EPSILON * 8.0 / a;
                Ok(Value::Numeric { z: inv, error: err })
            }
        }
    }

    /// JSON form: `"n/d"` for rationals, a CycElem object for other exact
    /// values, `{"re":…,"im":…,"error":…}` for numeric ones.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(match self {
            Value::Exact(t) => {
                if t.blocks.is_empty() {
                    let r = &t.scalar;
                    serde_json::Value::String(if r.is_integer() { r.numer().to_string() } else { format!("{}/{}", r.numer(), r.denom()) })
                } else {
                    serde_json::to_value(t.to_cyc()?)?
                }
            }
            Value::Numeric { z, error } => serde_json::json!({
                "re": z.re.to_f64(),
                "im": z.im.to_f64(),
                "error": error,
            }),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        use serde_json::Value as J;
        match v {
            J::String(s) => parse_rational(s).map(Value::rational),
            J::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Value::integer(i))
                } else {
                    Ok(Value::numeric(n.as_f64().unwrap_or(f64::NAN), 0.0))
                }
            }
            J::Array(a) if a.len() == 2 => {
                let n = json_int(&a[0])?;
                let d = json_int(&a[1])?;
                if d.is_zero() {
                    return Err(Error::Schema("zero denominator".into()));
                }
                Ok(Value::rational(BigRational::new(n, d)))
            }
            J::Object(o) if o.contains_key("conductor") => {
                let e: CycElem = serde_json::from_value(v.clone())?;
                Value::from_cyc(&e)
            }
            J::Object(o) if o.contains_key("re") || o.contains_key("im") => {
                let f = |k: &str| -> Result<f64> {
                    match o.get(k) {
                        None => Ok(0.0),
                        Some(J::Number(n)) => n.as_f64().ok_or_else(|| Error::Schema(format!("bad {k}"))),
                        Some(J::String(s)) => s.parse().map_err(|_| Error::Schema(format!("bad {k}"))),
                        Some(_) => Err(Error::Schema(format!("bad {k}"))),
                    }
                };
                let (re, im) = (f("re")?, f("im")?);
                let mut val = Value::numeric(re, im);
                if let (Some(J::Number(e)), Value::Numeric { error, .. }) = (o.get("error"), &mut val) {
                    *error = error.max(e.as_f64().unwrap_or(0.0));
                }
                Ok(val)
            }
            _ => Err(Error::Schema(format!("unrecognized value {v}"))),
        }
    }
}

fn json_int(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::String(s) => s.trim().parse().map_err(|_| Error::Schema(format!("bad integer {s}"))),
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| Error::Schema(format!("bad integer {n}"))),
        _ => Err(Error::Schema(format!("bad integer {v}"))),
    }
}

/// Parses `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Schema(format!("bad rational {s}"));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

impl From<CycSmall> for Value {
    fn from(b: CycSmall) -> Self {
        Value::Exact(PureTensor::from_block(b).expect("a single block cannot overflow"))
    }
}
