use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

use super::poly::{cyclotomic_poly, MAX_CONDUCTOR};
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::modular::{gcd, lcm, mod_pos};
use crate::scalar::{root_table, Coeff, ExactField, Real};

/// Element of Q(ζ_m) (or Z(ζ_m), R-coefficient variants) stored in the
/// reduced power basis `1, ζ_m, …, ζ_m^{φ(m)-1}`.
#[derive(Clone, Debug)]
pub struct Cyclotomic<T> {
    conductor: u64,
    coeffs: Vec<T>,
}

fn check_conductor(m: u64) -> Result<()> {
    if m == 0 || m > MAX_CONDUCTOR {
        Err(Error::UnsupportedConductor(m))
    } else {
        Ok(())
    }
}

/// Folds exponents modulo `m` and reduces modulo Φ_m, in place.
pub(crate) fn reduce_in_place<T: Coeff>(m: u64, v: &mut Vec<T>) -> Result<()> {
    let poly = cyclotomic_poly(m)?;
    let m = m as usize;
    if v.len() > m {
        let extra = v.split_off(m);
        for (i, c) in extra.into_iter().enumerate() {
            let j = i % m;
            v[j] = v[j].clone() + c;
        }
    }
    let deg = poly.degree();
    let tail: Vec<(usize, T)> = poly
        .tail()
        .iter()
        .map(|&(k, c)| (k, T::from_i64(c).expect("coefficient fits")))
        .collect();
    for i in (deg..v.len()).rev() {
        let c = std::mem::replace(&mut v[i], T::zero());
        if c.is_zero() {
            continue;
        }
        let base = i - deg;
        for (k, pk) in &tail {
            v[base + k] = v[base + k].clone() - c.clone() * pk.clone();
        }
    }
    v.resize(deg, T::zero());
    Ok(())
}

/// Same as [`reduce_in_place`] on `i64` coefficients, failing on overflow.
pub(crate) fn reduce_i64_checked(m: u64, mut v: Vec<i64>) -> Result<Option<Vec<i64>>> {
    let prime = m > 1 && m <= MAX_CONDUCTOR && crate::modular::is_prime(m);
    let poly = if prime { None } else { Some(cyclotomic_poly(m)?) };
    let mu = m as usize;
    if v.len() > mu {
        let extra = v.split_off(mu);
        for (i, c) in extra.into_iter().enumerate() {
            match v[i % mu].checked_add(c) {
                Some(s) => v[i % mu] = s,
                None => return Ok(None),
            }
        }
    }
    let Some(poly) = poly else {
        // Φ_p = 1 + x + … + x^(p−1)
        if v.len() == mu {
            let c = v.pop().expect("nonempty");
            for x in v.iter_mut() {
                match x.checked_sub(c) {
                    Some(s) => *x = s,
                    None => return Ok(None),
                }
            }
        }
        v.resize(mu - 1, 0);
        return Ok(Some(v));
    };
    let deg = poly.degree();
    for i in (deg..v.len()).rev() {
        let c = std::mem::replace(&mut v[i], 0);
        if c == 0 {
            continue;
        }
        let base = i - deg;
        for &(k, pk) in poly.tail() {
            let Some(t) = c.checked_mul(pk).and_then(|t| v[base + k].checked_sub(t)) else {
                return Ok(None);
            };
            v[base + k] = t;
        }
    }
    v.resize(deg, 0);
    Ok(Some(v))
}

impl<T: Coeff> Cyclotomic<T> {
    /// Wraps coefficients already reduced modulo Φ_m.
    pub(crate) fn from_raw(m: u64, coeffs: Vec<T>) -> Self {
        Self { conductor: m, coeffs }
    }

    pub fn zero(m: u64) -> Result<Self> {
        check_conductor(m)?;
        let deg = cyclotomic_poly(m)?.degree();
        Ok(Self { conductor: m, coeffs: vec![T::zero(); deg] })
    }

    pub fn from_scalar(m: u64, c: T) -> Result<Self> {
        let mut z = Self::zero(m)?;
        z.coeffs[0] = c;
        Ok(z)
    }

    pub fn one(m: u64) -> Result<Self> {
        Self::from_scalar(m, T::one())
    }

    /// ζ_m^j.
    pub fn root_power(m: u64, j: i64) -> Result<Self> {
        check_conductor(m)?;
        let e = mod_pos(j, m) as usize;
        let mut v = vec![T::zero(); e + 1];
        v[e] = T::one();
        Self::from_power_coeffs(m, v)
    }

    /// Element `Σ v[i]·ζ_m^i` for a coefficient vector of any length.
    pub fn from_power_coeffs(m: u64, mut v: Vec<T>) -> Result<Self> {
        check_conductor(m)?;
        reduce_in_place(m, &mut v)?;
        Ok(Self { conductor: m, coeffs: v })
    }

    /// Wraps an already reduced coefficient vector of length φ(m).
    pub fn from_reduced(m: u64, coeffs: Vec<T>) -> Result<Self> {
        check_conductor(m)?;
        let deg = cyclotomic_poly(m)?.degree();
        if coeffs.len() != deg {
            return Err(Error::InvalidInput(format!(
                "expected {deg} coefficients for conductor {m}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { conductor: m, coeffs })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value if every basis coefficient of index ≥ 1 vanishes.
    pub fn as_scalar(&self) -> Option<T> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Cyclotomic<U> {
        Cyclotomic { conductor: self.conductor, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    /// The same field element at a conductor divisible by the current one.
    pub fn embed(&self, m2: u64) -> Result<Self> {
        if m2 == 0 || !m2.is_multiple_of(self.conductor) {
            return Err(Error::InvalidEmbedding { from: self.conductor, to: m2 });
        }
        if m2 == self.conductor {
            return Ok(self.clone());
        }
        check_conductor(m2)?;
        let s = (m2 / self.conductor) as usize;
        let mut v = vec![T::zero(); (self.coeffs.len().saturating_sub(1)) * s + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * s] = c.clone();
        }
        Self::from_power_coeffs(m2, v)
    }

    /// σ_u: ζ_m ↦ ζ_m^u.
    pub fn galois(&self, u: i64) -> Result<Self> {
        let m = self.conductor;
        let ur = mod_pos(u, m);
        if gcd(ur, m) != 1 {
            return Err(Error::NotUnit { u, m });
        }
        let mut v = vec![T::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = ((i as u128 * ur as u128) % m as u128) as usize;
            v[j] = v[j].clone() + c.clone();
        }
        Self::from_power_coeffs(m, v)
    }

    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is always a unit")
    }

    /// Both operands at their least common conductor.
    pub fn unify(&self, other: &Self) -> Result<(Self, Self)> {
        let m = lcm(self.conductor, other.conductor);
        Ok((self.embed(m)?, other.embed(m)?))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let coeffs = a.coeffs.into_iter().zip(b.coeffs).map(|(x, y)| x + y).collect();
        Ok(Self { conductor: a.conductor, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let coeffs = a.coeffs.into_iter().zip(b.coeffs).map(|(x, y)| x - y).collect();
        Ok(Self { conductor: a.conductor, coeffs })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.unify(other)?;
        let n = a.coeffs.len();
        let mut v = vec![T::zero(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] = v[i + j].clone() + x.clone() * y.clone();
                }
            }
        }
        Self::from_power_coeffs(a.conductor, v)
    }

    /// Exact equality after embedding both sides at the least common conductor.
    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        if self.conductor == other.conductor {
            return Ok(self.coeffs == other.coeffs);
        }
        let (a, b) = self.unify(other)?;
        Ok(a.coeffs == b.coeffs)
    }
}

impl<T: ExactField> Cyclotomic<T> {
    /// `r` with `self = r·other`, if such a rational exists.
    pub fn rational_ratio(&self, other: &Self) -> Result<Option<T>> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (a, b) = self.unify(other)?;
        let pivot = b.coeffs.iter().position(|c| !c.is_zero()).expect("nonzero");
        let r = a.coeffs[pivot].clone() / b.coeffs[pivot].clone();
        let proportional =
            a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| *x == r.clone() * y.clone());
        Ok(proportional.then_some(r))
    }

    /// Multiplicative inverse as `∏_{u≠1} σ_u(x) / N(x)`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.conductor;
        let mut conj = Self::one(m)?;
        for u in 2..m.max(2) {
            if gcd(u, m) == 1 {
                conj = conj.try_mul(&self.galois(u as i64)?)?;
            }
        }
        let norm = self.try_mul(&conj)?.as_scalar().expect("the norm is rational");
        conj.inverse_scalar(&norm)
    }

    pub fn inverse_scalar(&self, c: &T) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.map(|x| x.clone() / c.clone()))
    }
}

impl Cyclotomic<i64> {
    pub fn checked_mul(&self, other: &Self) -> Result<Option<Self>> {
        let m = lcm(self.conductor, other.conductor);
        let (Some(mut a), Some(mut b)) = (self.checked_embed(m)?, other.checked_embed(m)?) else {
            return Ok(None);
        };
        let nnz = |c: &Self| c.coeffs.iter().filter(|&&x| x != 0).count();
        if nnz(&b) < nnz(&a) {
            std::mem::swap(&mut a, &mut b);
        }
        let n = a.coeffs.len();
        let mut v = vec![0i64; 2 * n - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                let Some(s) = x.checked_mul(y).and_then(|t| v[i + j].checked_add(t)) else {
                    return Ok(None);
                };
                v[i + j] = s;
            }
        }
        Ok(reduce_i64_checked(a.conductor, v)?.map(|coeffs| Self { conductor: a.conductor, coeffs }))
    }

    /// [`Cyclotomic::embed`] with overflow detection.
    pub fn checked_embed(&self, m2: u64) -> Result<Option<Self>> {
        if m2 == 0 || !m2.is_multiple_of(self.conductor) {
            return Err(Error::InvalidEmbedding { from: self.conductor, to: m2 });
        }
        check_conductor(m2)?;
        let s = (m2 / self.conductor) as usize;
        let mut v = vec![0i64; (self.coeffs.len().saturating_sub(1)) * s + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * s] = c;
        }
        Ok(reduce_i64_checked(m2, v)?.map(|coeffs| Self { conductor: m2, coeffs }))
    }

    /// Reduction of an exponent-indexed `i64` vector, promoting to `BigInt` on overflow.
    pub fn from_counts(m: u64, counts: Vec<i64>) -> Result<std::result::Result<Self, Cyclotomic<BigInt>>> {
        check_conductor(m)?;
        match reduce_i64_checked(m, counts.clone())? {
            Some(coeffs) => Ok(Ok(Self { conductor: m, coeffs })),
            None => {
                let big: Vec<BigInt> = counts.into_iter().map(BigInt::from).collect();
                Ok(Err(Cyclotomic::from_power_coeffs(m, big)?))
            }
        }
    }

    pub fn to_rational(&self) -> Cyclotomic<BigRational> {
        self.map(|&c| BigRational::from_integer(BigInt::from(c)))
    }
}

impl Cyclotomic<BigInt> {
    pub fn to_rational(&self) -> Cyclotomic<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
}

impl Cyclotomic<BigRational> {
    /// Common denominator `d > 0` and integer numerator `A` with `self = A/d`.
    pub fn clear_denominators(&self) -> (Cyclotomic<BigInt>, BigInt) {
        let d = self
            .coeffs
            .iter()
            .fold(BigInt::from(1), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let num = self.map(|c| (c.numer() * &d) / c.denom());
        (num, d)
    }

    pub fn from_i64_coeffs(m: u64, coeffs: &[i64]) -> Result<Self> {
        Self::from_power_coeffs(m, coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }
}

/// Conversion of exact coefficients into a floating type.
pub trait ToReal {
    fn to_real<R: Real>(&self) -> R;
    /// Upper bound on `|self|` as an `f64`.
    fn magnitude(&self) -> f64;
}

impl ToReal for i64 {
    fn to_real<R: Real>(&self) -> R {
        R::from_i64(*self)
    }
    fn magnitude(&self) -> f64 {
        self.unsigned_abs() as f64
    }
}

impl ToReal for f64 {
    fn to_real<R: Real>(&self) -> R {
        R::from_f64(*self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

fn bigint_to_dd(n: &BigInt) -> DoubleDouble {
    let hi = n.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return DoubleDouble::from_f64(hi);
    }
    let rest = n - BigInt::from_f64(hi).expect("finite");
    DoubleDouble::from_parts(hi, rest.to_f64().unwrap_or(0.0))
}

fn dd_to_real<R: Real>(x: DoubleDouble) -> R {
    R::from_f64(x.hi()) + R::from_f64(x.lo())
}

impl ToReal for BigInt {
    fn to_real<R: Real>(&self) -> R {
        dd_to_real(bigint_to_dd(self))
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
}

impl ToReal for BigRational {
    fn to_real<R: Real>(&self) -> R {
        dd_to_real(bigint_to_dd(self.numer()) / bigint_to_dd(self.denom()))
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
}

impl<T: Coeff + ToReal> Cyclotomic<T> {
    /// Value at ζ_m = exp(2πi/m) in the floating type `R`.
    pub fn to_complex<R: Real>(&self) -> Complex<R> {
        let roots = root_table::<R>(self.conductor);
        let mut acc = Complex::new(R::zero(), R::zero());
        for (c, z) in self.coeffs.iter().zip(&roots) {
            if !c.is_zero() {
                let r: R = c.to_real();
                acc = acc + Complex::new(z.re * r, z.im * r);
            }
        }
        acc
    }

    /// Value at `precision_bits` (53..=100) together with an absolute error bound.
    ///
    /// The bound is `Σ|c_j| · (8 + φ(m)) · u` with `u` the double-double unit
    /// roundoff, covering root-table and accumulation error.
    pub fn to_complex_bits(&self, precision_bits: u32) -> Result<(Complex<DoubleDouble>, f64)> {
        if !(1..=100).contains(&precision_bits) {
            return Err(Error::PrecisionUnsupported(precision_bits));
        }
        let z = self.to_complex::<DoubleDouble>();
        let mass: f64 = self.coeffs.iter().map(|c| c.magnitude()).sum();
        let bound = mass * (8.0 + self.coeffs.len() as f64) * DoubleDouble::EPSILON * 4.0;
        Ok((z, bound.max(f64::MIN_POSITIVE)))
    }
}

impl<T: Coeff> PartialEq for Cyclotomic<T> {
    fn eq(&self, other: &Self) -> bool {
        self.try_eq(other).expect("common conductor out of range")
    }
}

impl<T: Coeff> Add for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn add(self, o: Self) -> Cyclotomic<T> {
        self.try_add(o).expect("common conductor out of range")
    }
}

impl<T: Coeff> Sub for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn sub(self, o: Self) -> Cyclotomic<T> {
        self.try_sub(o).expect("common conductor out of range")
    }
}

impl<T: Coeff> Mul for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn mul(self, o: Self) -> Cyclotomic<T> {
        self.try_mul(o).expect("common conductor out of range")
    }
}

impl<T: Coeff> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Coeff> Add for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn add(self, o: Self) -> Cyclotomic<T> {
        &self + &o
    }
}

impl<T: Coeff> Sub for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn sub(self, o: Self) -> Cyclotomic<T> {
        &self - &o
    }
}

impl<T: Coeff> Mul for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn mul(self, o: Self) -> Cyclotomic<T> {
        &self * &o
    }
}

impl<T: Coeff> Neg for Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        -&self
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·ζ{}", self.conductor)?,
                _ => write!(f, "({c})·ζ{}^{i}", self.conductor)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
