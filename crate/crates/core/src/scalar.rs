//! Scalar abstractions shared by the exact and numeric code paths.
//!
//! [`Coeff`] covers the coefficient rings used by cyclotomic elements
//! (`i64`, `BigInt`, `BigRational`, `f64`, ...). [`Real`] covers the
//! floating types used for numeric evaluation (`f32`, `f64`, [`DoubleDouble`]).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num};

use crate::dd::DoubleDouble;

pub trait Coeff: Num + Clone + Debug + Neg<Output = Self> + FromPrimitive + Send + Sync {}

impl<T> Coeff for T where T: Num + Clone + Debug + Neg<Output = Self> + FromPrimitive + Send + Sync {}

/// Exact fields: coefficient types for which rational ratio tests are exact.
pub trait ExactField: Coeff {}

impl ExactField for BigRational {}
impl ExactField for Ratio<i64> {}
impl ExactField for Ratio<i128> {}

/// Exact integer rings that admit λ-adic valuation.
pub trait ExactInt: Coeff + num_integer::Integer + num_traits::Signed + Into<BigInt> {}

impl ExactInt for i64 {}
impl ExactInt for BigInt {}

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const SIGNIFICAND_BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;

    /// Unit roundoff `2^-SIGNIFICAND_BITS`.
    fn unit_roundoff() -> f64 {
        (-(Self::SIGNIFICAND_BITS as f64)).exp2()
    }

    /// `(cos, sin)` of `2π·num/den` for `0 <= num/den <= 1/8`.
    fn cos_sin_reduced(num: u64, den: u64) -> (Self, Self);

    /// `(cos, sin)` of `2π·num/den` for any integer `num`.
    fn cos_sin_turns(num: i64, den: u64) -> (Self, Self) {
        assert!(den > 0);
        let d = den as i128;
        let j = (num as i128).rem_euclid(d);
        let quadrant = (4 * j) / d;
        let rem = 4 * j - quadrant * d;
        let den4 = 4 * den;
        let (c, s) = if 2 * rem <= d {
            Self::cos_sin_reduced(rem as u64, den4)
        } else {
            let (c, s) = Self::cos_sin_reduced((d - rem) as u64, den4);
            (s, c)
        };
        match quadrant {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        }
    }
}

macro_rules! impl_real_float {
    ($t:ty, $bits:expr) => {
        impl Real for $t {
            const SIGNIFICAND_BITS: u32 = $bits;

            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn from_i64(n: i64) -> Self {
                n as $t
            }
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            fn cos_sin_reduced(num: u64, den: u64) -> (Self, Self) {
                let x = std::f64::consts::TAU * (num as f64) / (den as f64);
                let (s, c) = x.sin_cos();
                (c as $t, s as $t)
            }
        }
    };
}

impl_real_float!(f32, 24);
impl_real_float!(f64, 53);

impl Real for DoubleDouble {
    const SIGNIFICAND_BITS: u32 = 104;

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    fn from_i64(n: i64) -> Self {
        DoubleDouble::from_i64(n)
    }
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    fn cos_sin_reduced(num: u64, den: u64) -> (Self, Self) {
        let x = (DoubleDouble::TWO_PI * DoubleDouble::from_u64(num)) / DoubleDouble::from_u64(den);
        DoubleDouble::cos_sin_series(x)
    }
}

/// Magnitude of a complex number.
pub fn complex_abs<R: Real>(z: Complex<R>) -> R {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Table of `ζ_m^j = e(j/m)` for `0 <= j < m`.
///
/// Only about `2√m` values are computed by series; the rest are products of
/// a coarse and a fine table, so each entry carries a few units of roundoff.
pub fn root_table<R: Real>(m: u64) -> Vec<Complex<R>> {
    assert!(m > 0);
    let step = ((m as f64).sqrt().ceil() as u64).max(1);
    let fine: Vec<Complex<R>> = (0..step.min(m))
        .map(|j| {
            let (c, s) = R::cos_sin_turns(j as i64, m);
            Complex::new(c, s)
        })
        .collect();
    let coarse: Vec<Complex<R>> = (0..m.div_ceil(step))
        .map(|i| {
            let (c, s) = R::cos_sin_turns((i * step) as i64, m);
            Complex::new(c, s)
        })
        .collect();
    (0..m)
        .map(|j| {
            let (i, r) = ((j / step) as usize, (j % step) as usize);
            if r == 0 {
                coarse[i]
            } else {
                coarse[i] * fine[r]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrant_reduction_matches_f64() {
        for den in [1u64, 2, 3, 5, 7, 8, 12, 97, 1000] {
            for num in -(den as i64)..(2 * den as i64) {
                let (c, s) = <f64 as Real>::cos_sin_turns(num, den);
                let x = std::f64::consts::TAU * num as f64 / den as f64;
                assert!((c - x.cos()).abs() < 1e-12, "{num}/{den}");
                assert!((s - x.sin()).abs() < 1e-12, "{num}/{den}");
            }
        }
    }

    #[test]
    fn dd_roots_are_unit_modulus() {
        let t = root_table::<DoubleDouble>(997);
        for z in t {
            let n = z.re * z.re + z.im * z.im - DoubleDouble::ONE;
            assert!(n.abs().to_f64() < 1e-29);
        }
    }

    #[test]
    fn dd_root_powers_agree_with_direct() {
        let m = 1009u64;
        let t = root_table::<DoubleDouble>(m);
        for j in [1u64, 31, 32, 500, 1008] {
            let (c, s) = DoubleDouble::cos_sin_turns(j as i64, m);
            assert!((t[j as usize].re - c).abs().to_f64() < 1e-30);
            assert!((t[j as usize].im - s).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn exact_quarter_turns() {
        let (c, s) = DoubleDouble::cos_sin_turns(1, 4);
        assert_eq!(c, DoubleDouble::ZERO);
        assert_eq!(s, DoubleDouble::ONE);
        let (c, s) = DoubleDouble::cos_sin_turns(2, 4);
        assert_eq!((c, s), (-DoubleDouble::ONE, DoubleDouble::ZERO));
    }
}
