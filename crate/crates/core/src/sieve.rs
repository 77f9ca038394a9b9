//! Primes, square-free almost primes and the related counting functions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::factor;

/// π²/6.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("zero has no factorization".into()));
        }
        Ok(Self { n, factors: factor(n) })
    }

    /// Square-free integer from ascending distinct primes.
    pub fn from_primes(primes: &[u64]) -> Result<Self> {
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("primes must be strictly ascending".into()));
        }
        let n = primes.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p)).ok_or(Error::Overflow)?;
        Ok(Self { n, factors: primes.iter().map(|&p| (p, 1)).collect() })
    }

    pub fn one() -> Self {
        Self { n: 1, factors: Vec::new() }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn mu(&self) -> i8 {
        if !self.is_squarefree() {
            0
        } else if self.omega().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// P⁺(n), with P⁺(1) = 1.
    pub fn largest_prime_factor(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }
}

/// All primes `<= x`.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut out = vec![2u64];
    let mut i = 3usize;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// π(x).
pub fn prime_pi(x: u64) -> u64 {
    primes_up_to(x).len() as u64
}

/// L_k, the product of the first k − 1 primes.
pub fn primorial(k: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidInput("primorial needs k >= 2".into()));
    }
    let mut acc = 1u64;
    let mut found = 0;
    let mut p = 2u64;
    while found < k - 1 {
        if crate::modular::is_prime(p) {
            acc = acc.checked_mul(p).ok_or(Error::Overflow)?;
            found += 1;
        }
        p += 1;
    }
    Ok(acc)
}

fn enumerate(
    primes: &[u64],
    x: u64,
    k: usize,
    start: usize,
    prod: u64,
    stack: &mut Vec<u64>,
    out: &mut Vec<FactoredInteger>,
) {
    if stack.len() == k {
        out.push(FactoredInteger { n: prod, factors: stack.iter().map(|&p| (p, 1)).collect() });
        return;
    }
    let remaining = (k - stack.len()) as u32;
    for (i, &p) in primes.iter().enumerate().skip(start) {
        match p.checked_pow(remaining).and_then(|pp| pp.checked_mul(prod)) {
            Some(v) if v <= x => {}
            _ => break,
        }
        stack.push(p);
        enumerate(primes, x, k, i + 1, prod * p, stack, out);
        stack.pop();
    }
}

/// Π_k(X,y): square-free `n <= X` with exactly `k` prime factors, all `<= y`, sorted.
pub fn squarefree_k_almost_smooth(x: u64, k: usize, y: u64) -> Vec<FactoredInteger> {
    if k == 0 {
        return if x >= 1 { vec![FactoredInteger::one()] } else { Vec::new() };
    }
    let bound = if k == 1 { x } else { x / primorial(k).unwrap_or(u64::MAX).max(1) };
    let primes = primes_up_to(bound.min(y));
    let mut out = Vec::new();
    enumerate(&primes, x, k, 0, 1, &mut Vec::with_capacity(k), &mut out);
    out.sort_unstable_by_key(|f| f.n);
    out
}

/// Π_k(X): square-free `n <= X` with exactly `k` prime factors, sorted.
pub fn squarefree_k_almost(x: u64, k: usize) -> Vec<FactoredInteger> {
    squarefree_k_almost_smooth(x, k, x)
}

/// π_k(X) = |Π_k(X)|.
pub fn pi_k(x: u64, k: usize) -> u64 {
    squarefree_k_almost(x, k).len() as u64
}

/// Every square-free `n` with `2 <= n <= X`, sorted.
pub fn squarefree_up_to(x: u64) -> Vec<FactoredInteger> {
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        match primorial(k + 1) {
            Ok(l) if l <= x => {}
            _ => break,
        }
        out.extend(squarefree_k_almost(x, k));
        k += 1;
    }
    out.sort_unstable_by_key(|f| f.n);
    out
}

/// P⁺(n), with P⁺(1) = 1.
pub fn largest_prime_factor(n: u64) -> u64 {
    factor(n).last().map_or(1, |&(p, _)| p)
}

/// Number of square-free integers `<= x`, via Σ_d μ(d)⌊x/d²⌋.
pub fn squarefree_count(x: u64) -> u64 {
    let mut total: i64 = 0;
    let mut d = 1u64;
    while d * d <= x {
        total += crate::modular::mobius(d) as i64 * (x / (d * d)) as i64;
        d += 1;
    }
    total as u64
}

/// The interval `[X/ζ(2) − 3√X, X/ζ(2) + 3√X]`.
pub fn squarefree_interval(x: u64) -> (f64, f64) {
    let mid = x as f64 / ZETA2;
    let w = 3.0 * (x as f64).sqrt();
    (mid - w, mid + w)
}

/// `C1·X·(log log X + C2)^{k−1} / ((k−1)!·log X)`.
pub fn hardy_ramanujan_bound(x: f64, k: u32, c1: f64, c2: f64) -> f64 {
    let l = x.ln();
    let fact: f64 = (1..k).map(f64::from).product();
    c1 * x * (l.ln() + c2).powi(k as i32 - 1) / (fact * l)
}

/// `C·(X/log X)·e^{−√log X}`.
pub fn pi_k_tail_bound(x: f64, c: f64) -> f64 {
    let l = x.ln();
    c * x / l * (-l.sqrt()).exp()
}

/// CSV dump with columns `n,P+(n),omega(n)`.
pub fn to_csv(items: &[FactoredInteger]) -> String {
    let mut s = String::from("n,P+(n),omega(n)\n");
    for f in items {
        s.push_str(&format!("{},{},{}\n", f.n, f.largest_prime_factor(), f.omega()));
    }
    s
}
