use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::elem::Cyclotomic;
use crate::error::{Error, Result};
use crate::modular::is_prime;

/// A λ-adic valuation; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// Valuation of `A/d` where `A` has integer coefficients and `d > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaValuation {
    pub prime: u64,
    pub numerator: Valuation,
    /// λ-valuation of the cleared denominator, `(p−1)·v_p(d)`.
    pub denominator: u64,
}

impl LambdaValuation {
    /// Total valuation, `None` for zero.
    pub fn value(&self) -> Option<i64> {
        self.numerator.finite().map(|n| n as i64 - self.denominator as i64)
    }
}

/// Divides the reduced integer vector `a` (length p−1) by λ = ζ_p − 1 if possible.
///
/// Uses `a = (x−1)q + a(1)` and `p = −λ·h` with `h = Σ (p−1−j) x^j`.
fn divide_by_lambda(a: &[BigInt], p: u64) -> Option<Vec<BigInt>> {
    let n = a.len();
    let pb = BigInt::from(p);
    let sum: BigInt = a.iter().sum();
    if !sum.is_multiple_of(&pb) {
        return None;
    }
    let k = sum / &pb;
    let mut out = vec![BigInt::zero(); n];
    // synthetic division by (x − 1): q_{j-1} = a_j + q_j
    let mut carry = BigInt::zero();
    for j in (1..n).rev() {
        carry += &a[j];
        out[j - 1] = carry.clone();
    }
    if !k.is_zero() {
        for (j, o) in out.iter_mut().enumerate() {
            *o -= &k * BigInt::from(p - 1 - j as u64);
        }
    }
    Some(out)
}

/// λ-valuation of an integer element of Z[ζ_p] in the reduced basis,
/// stopping once `cap` is reached.
pub fn lambda_valuation_int_capped(coeffs: &[BigInt], p: u64, cap: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::UnsupportedConductor(p));
    }
    if coeffs.len() != (p - 1) as usize {
        return Err(Error::InvalidInput(format!("expected {} coefficients", p - 1)));
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        return Ok(Valuation::Infinite);
    }
    // Strip the rational p-power first: p = unit · λ^(p−1).
    let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let pb = BigInt::from(p);
    let mut v = 0u64;
    let mut content_p = 0u64;
    let mut rest = content.abs();
    while rest.is_multiple_of(&pb) {
        rest /= &pb;
        content_p += 1;
    }
    let scale = pb.pow(content_p as u32);
    let mut cur: Vec<BigInt> = coeffs.iter().map(|c| c / &scale).collect();
    v += content_p * (p - 1);
    while v < cap {
        match divide_by_lambda(&cur, p) {
            Some(next) => {
                cur = next;
                v += 1;
            }
            None => break,
        }
    }
    Ok(Valuation::Finite(v))
}

pub fn lambda_valuation_int(coeffs: &[BigInt], p: u64) -> Result<Valuation> {
    lambda_valuation_int_capped(coeffs, p, u64::MAX)
}

/// `true` if λ = ζ_p − 1 divides the reduced integer vector.
pub fn lambda_divides(coeffs: &[i64], p: u64) -> bool {
    let s = coeffs.iter().fold(0i128, |acc, &c| (acc + c as i128).rem_euclid(p as i128));
    s == 0
}

/// λ-adic valuation at λ = ζ_p − 1 of an element of conductor 1 or `p`.
pub fn lambda_valuation(a: &Cyclotomic<BigRational>, p: u64) -> Result<LambdaValuation> {
    if !is_prime(p) {
        return Err(Error::UnsupportedConductor(p));
    }
    if !p.is_multiple_of(a.conductor()) || (a.conductor() != 1 && a.conductor() != p) {
        return Err(Error::UnsupportedConductor(a.conductor()));
    }
    let a = a.embed(p)?;
    let (num, d) = a.clear_denominators();
    let numerator = lambda_valuation_int(num.coeffs(), p)?;
    let pb = BigInt::from(p);
    let mut dv = 0u64;
    let mut rest = d;
    while rest.is_multiple_of(&pb) {
        rest /= &pb;
        dv += 1;
    }
    Ok(LambdaValuation { prime: p, numerator, denominator: dv * (p - 1) })
}
