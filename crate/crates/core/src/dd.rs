//! Double-double floating point: an unevaluated sum `hi + lo` of two `f64`
//! values with `|lo| <= ulp(hi)/2`, carrying about 106 bits of significand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };
    pub const TWO_PI: Self = Self { hi: std::f64::consts::TAU, lo: 2.449_293_598_294_706_4e-16 };
    /// 2^-104, the relative spacing of the representation.
    pub const EPSILON: f64 = 4.930_380_657_631_324e-32;

    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        let rest = n as i128 - hi as i128;
        Self::from_parts(hi, rest as f64)
    }

    pub fn from_u64(n: u64) -> Self {
        let hi = n as f64;
        let rest = n as i128 - hi as i128;
        Self::from_parts(hi, rest as f64)
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    pub fn abs(self) -> Self {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Self { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Self::from_f64(b).mul_f64(q1);
        let q2 = r.hi / b;
        let r = r - Self::from_f64(b).mul_f64(q2);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::from_f64(f64::NAN) };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Self::from_f64(ax);
        let diff = self - ax_dd * ax_dd;
        ax_dd + Self::from_f64(diff.hi * (x * 0.5))
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            Self::from_parts(hi, self.lo.floor())
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    pub fn trunc(self) -> Self {
        if self.is_sign_negative() {
            -((-self).floor())
        } else {
            self.floor()
        }
    }

    pub fn powi(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `(cos x, sin x)` by Taylor series; intended for `0 <= x <= pi/4`.
    pub fn cos_sin_series(x: Self) -> (Self, Self) {
        let x2 = x * x;
        let mut sin = x;
        let mut term = x;
        let mut k = 1u32;
        loop {
            term = -(term * x2).div_f64(((2 * k) * (2 * k + 1)) as f64);
            sin += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
            k += 1;
        }
        let mut cos = Self::ONE;
        let mut term = Self::ONE;
        let mut k = 1u32;
        loop {
            term = -(term * x2).div_f64(((2 * k - 1) * (2 * k)) as f64);
            cos += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
            k += 1;
        }
        (cos, sin)
    }

    /// Decimal rendering with `digits` significant digits in scientific form.
    pub fn to_decimal_string(self, digits: usize) -> String {
        if self.hi.is_nan() {
            return "NaN".into();
        }
        if self.hi == 0.0 {
            return "0".into();
        }
        let digits = digits.max(1);
        let neg = self.is_sign_negative();
        let x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        let ten = Self::from_f64(10.0);
        let scale = |e: i32| if e >= 0 { ten.powi(e as u32) } else { Self::ONE / ten.powi((-e) as u32) };
        let mut y = x / scale(e);
        if y.hi >= 10.0 {
            y = y.div_f64(10.0);
            e += 1;
        } else if y.hi < 1.0 {
            y = y.mul_f64(10.0);
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = y.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            y = (y - Self::from_f64(d)).mul_f64(10.0);
        }
        let round_up = ds.pop().unwrap_or(0) >= 5;
        if round_up {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push_str(&format!("e{e}"));
        s
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(32);
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p1, p2 + (self.hi * b.lo + self.lo * b.hi));
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - b * (self / b).trunc()
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    /// Parses through `f64`, so only about 53 bits of the input survive.
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Self::from_f64)
    }
}
