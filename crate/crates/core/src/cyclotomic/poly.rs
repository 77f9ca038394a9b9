use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::modular::{divisors, is_prime};

/// Largest conductor accepted anywhere in the crate.
pub const MAX_CONDUCTOR: u64 = 1 << 24;

/// The m-th cyclotomic polynomial Φ_m with ascending integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycPoly {
    m: u64,
    coeffs: Vec<i64>,
    tail: Vec<(usize, i64)>,
}

impl CycPoly {
    fn new(m: u64, coeffs: Vec<i64>) -> Self {
        let deg = coeffs.len() - 1;
        let tail = coeffs[..deg]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        Self { m, coeffs, tail }
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients `c_0, …, c_deg` (ascending, `c_deg = 1`).
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Nonzero `(index, coefficient)` pairs below the leading term.
    pub fn tail(&self) -> &[(usize, i64)] {
        &self.tail
    }
}

fn cache() -> &'static RwLock<HashMap<u64, Arc<CycPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Exact quotient of `num` by the monic polynomial `den`.
fn exact_div_monic(num: &[i128], den: &[i64]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![0i128; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        if c != 0 {
            for (k, &d) in den.iter().enumerate() {
                rem[i + k] -= c * d as i128;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// Φ_m, by dividing `x^m − 1` by Φ_d for every proper divisor `d` of `m`.
///
/// Composite conductors are cached behind a read-mostly lock; prime
/// conductors are rebuilt on demand since they are trivial.
pub fn cyclotomic_poly(m: u64) -> Result<Arc<CycPoly>> {
    if m == 0 || m > MAX_CONDUCTOR {
        return Err(Error::UnsupportedConductor(m));
    }
    if m == 1 {
        return Ok(Arc::new(CycPoly::new(1, vec![-1, 1])));
    }
    if is_prime(m) {
        return Ok(Arc::new(CycPoly::new(m, vec![1; m as usize])));
    }
    if let Some(p) = cache().read().expect("poly cache poisoned").get(&m) {
        return Ok(p.clone());
    }
    let mut num = vec![0i128; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m) {
        if d < m {
            let phi_d = cyclotomic_poly(d)?;
            num = exact_div_monic(&num, phi_d.coeffs());
        }
    }
    let coeffs = num
        .into_iter()
        .map(|c| i64::try_from(c).map_err(|_| Error::Overflow))
        .collect::<Result<Vec<_>>>()?;
    let poly = Arc::new(CycPoly::new(m, coeffs));
    let mut w = cache().write().expect("poly cache poisoned");
    Ok(w.entry(m).or_insert(poly).clone())
}
