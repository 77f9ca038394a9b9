use num_complex::Complex;
use num_rational::BigRational;

use crate::cyclotomic::{Cyclotomic, MAX_CONDUCTOR};
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::modular::{gcd, lcm};
use crate::scalar::{root_table, Real};
use crate::{CycElem, CycSmall};

/// Group-ring element `Σ_j counts[j]·ζ_c^j` before reduction modulo Φ_c.
///
/// Every sum in this crate is an integer combination of `c`-th roots of
/// unity, so this is the common intermediate form of both backends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSum {
    conductor: u64,
    counts: Vec<i64>,
}

impl RootSum {
    pub fn new(c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroModulus);
        }
        if c > MAX_CONDUCTOR {
            return Err(Error::UnsupportedConductor(c));
        }
        Ok(Self { conductor: c, counts: vec![0; c as usize] })
    }

    pub fn from_counts(c: u64, counts: Vec<i64>) -> Result<Self> {
        let mut s = Self::new(c)?;
        for (j, w) in counts.into_iter().enumerate() {
            s.counts[j % c as usize] += w;
        }
        Ok(s)
    }

    #[inline]
    pub fn add_root(&mut self, j: u64, weight: i64) {
        self.counts[j as usize] += weight;
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// Sum of absolute weights, an upper bound on the modulus of the value.
    pub fn mass(&self) -> u64 {
        self.counts.iter().map(|c| c.unsigned_abs()).sum()
    }

    /// Product in the group ring, at conductor `lcm` of the two conductors.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let l = lcm(self.conductor, other.conductor);
        let (s, t) = (l / self.conductor, l / other.conductor);
        let mut out = Self::new(l)?;
        let rhs: Vec<(u64, i64)> = other
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0)
            .map(|(j, &w)| (j as u64 * t, w))
            .collect();
        for (i, &w) in self.counts.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let base = i as u64 * s;
            for &(j, v) in &rhs {
                let e = (base + j) % l;
                out.counts[e as usize] = out.counts[e as usize].checked_add(w.checked_mul(v).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
            }
        }
        Ok(out)
    }

    /// Product of factors with pairwise coprime conductors.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if gcd(self.conductor, other.conductor) != 1 {
            return Err(Error::NonCoprimeFactors);
        }
        self.mul(other)
    }

    /// Reduced exact value with small coefficients, or `None` on `i64` overflow.
    pub fn to_small(&self) -> Result<Option<CycSmall>> {
        Ok(crate::cyclotomic::reduce_i64_checked(self.conductor, self.counts.clone())?.map(|c| Cyclotomic::from_raw(self.conductor, c)))
    }

    pub fn to_exact(&self) -> Result<CycElem> {
        Ok(match Cyclotomic::<i64>::from_counts(self.conductor, self.counts.clone())? {
            Ok(small) => small.to_rational(),
            Err(big) => big.map(|c| BigRational::from_integer(c.clone())),
        })
    }

    pub fn to_complex<R: Real>(&self) -> Complex<R> {
        let roots = root_table::<R>(self.conductor);
        self.to_complex_with(&roots)
    }

    /// Evaluation against a precomputed table of `ζ_c^j`.
    pub fn to_complex_with<R: Real>(&self, roots: &[Complex<R>]) -> Complex<R> {
        let mut re = R::zero();
        let mut im = R::zero();
        for (w, z) in self.counts.iter().zip(roots) {
            if *w != 0 {
                let r = R::from_i64(*w);
                re = re + z.re * r;
                im = im + z.im * r;
            }
        }
        Complex::new(re, im)
    }

    /// Absolute error bound for [`Self::to_complex`] at double-double precision.
    pub fn error_bound_dd(&self) -> f64 {
        let n = self.counts.len() as f64;
        (self.mass() as f64) * (16.0 + n) * DoubleDouble::EPSILON * 4.0
    }
}
