//! Modular arithmetic on machine integers.

use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Least non-negative residue of `a` modulo `n`.
pub fn mod_pos(a: i64, n: u64) -> u64 {
    (a as i128).rem_euclid(n as i128) as u64
}

pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut e: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `n`, in `[0, n)`.
pub fn mod_inverse(a: i64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if n == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (n as i128, mod_pos(a, n) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NotUnit { u: a, m: n });
    }
    Ok(s0.rem_euclid(n as i128) as u64)
}

/// Inverses of many residues modulo `n` with a single extended gcd.
///
/// Every value must be a unit; the first non-unit is reported.
pub fn batch_inverse(values: &[u64], n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 1 % n;
    for &v in values {
        prefix.push(acc);
        acc = mul_mod(acc, v % n, n);
    }
    let mut inv = match mod_inverse(acc as i64, n) {
        Ok(x) => x,
        Err(_) => {
            let bad = values.iter().find(|&&v| gcd(v % n, n) != 1).copied().unwrap_or(0);
            return Err(Error::NotUnit { u: bad as i64, m: n });
        }
    };
    let mut out = vec![0u64; values.len()];
    for i in (0..values.len()).rev() {
        out[i] = mul_mod(inv, prefix[i], n);
        inv = mul_mod(inv, values[i] % n, n);
    }
    Ok(out)
}

/// `unit[x]` iff gcd(x, c) = 1.
pub fn units_mask(c: u64) -> Vec<bool> {
    let mut unit = vec![true; c as usize];
    if c <= 1 {
        return unit;
    }
    for (p, _) in factor(c) {
        for x in (0..c).step_by(p as usize) {
            unit[x as usize] = false;
        }
    }
    unit
}

/// Table `t` with `t[x] = x̄` for units `x` modulo `n` and `t[x] = 0` otherwise.
pub fn inverse_table(n: u64) -> Vec<u64> {
    let mask = units_mask(n);
    let units: Vec<u64> = (0..n).filter(|&x| mask[x as usize]).collect();
    let inv = batch_inverse(&units, n).expect("units are invertible");
    let mut t = vec![0u64; n as usize];
    for (x, xi) in units.into_iter().zip(inv) {
        t[x as usize] = xi;
    }
    t
}

/// Inverses modulo a prime `p` by the recurrence inv(i) = −⌊p/i⌋·inv(p mod i).
pub fn prime_inverse_table(p: u64) -> Vec<u64> {
    let mut t = vec![0u64; p as usize];
    if p > 1 {
        t[1] = 1;
    }
    for i in 2..p as usize {
        let q = p / i as u64;
        t[i] = (p - q % p) * t[p as usize % i] % p;
    }
    t
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    let mut a = mod_pos(a, n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Prime factorization by trial division, ascending primes with exponents.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factor(n).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn mobius(n: u64) -> i8 {
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let len = ds.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// `true` if `n` is a perfect square (negative numbers never are).
pub fn is_perfect_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i64;
    (r.saturating_sub(1)..=r + 1).any(|s| s >= 0 && s.checked_mul(s) == Some(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn legendre_euler(a: i64, p: u64) -> i8 {
        let r = pow_mod(mod_pos(a, p), (p - 1) / 2, p);
        if r == 0 {
            0
        } else if r == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn jacobi_matches_euler_criterion_on_primes() {
        for p in (3..200u64).filter(|&p| is_prime(p)) {
            for a in -50..50 {
                assert_eq!(jacobi(a, p).unwrap(), legendre_euler(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn jacobi_is_multiplicative_in_modulus() {
        for n in (3..150u64).step_by(2) {
            for a in -20..20i64 {
                let prod: i8 = factor(n)
                    .iter()
                    .map(|&(p, e)| legendre_euler(a, p).pow(e))
                    .product();
                assert_eq!(jacobi(a, n).unwrap(), prod);
            }
        }
    }

    #[test]
    fn jacobi_rejects_even_modulus() {
        assert_eq!(jacobi(3, 10), Err(Error::EvenModulus(10)));
    }

    #[test]
    fn prime_inverse_table_matches() {
        for p in [2u64, 3, 5, 7, 97, 1009] {
            assert_eq!(prime_inverse_table(p), inverse_table(p));
        }
    }

    #[test]
    fn inverse_table_is_correct() {
        for n in 1..300u64 {
            let t = inverse_table(n);
            for x in 0..n {
                if gcd(x, n) == 1 {
                    assert_eq!(mul_mod(x, t[x as usize], n), 1 % n);
                }
            }
        }
    }

    #[test]
    fn batch_inverse_reports_non_unit() {
        assert_eq!(batch_inverse(&[1, 5, 4], 10), Err(Error::NotUnit { u: 5, m: 10 }));
    }

    #[test]
    fn divisors_and_phi() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        for n in 1..200u64 {
            let sum: u64 = divisors(n).iter().map(|&d| euler_phi(d)).sum();
            assert_eq!(sum, n);
        }
    }

    proptest! {
        #[test]
        fn mod_inverse_round_trips(a in -10_000i64..10_000, n in 1u64..5_000) {
            match mod_inverse(a, n) {
                Ok(x) => prop_assert_eq!(mul_mod(mod_pos(a, n), x, n), 1 % n),
                Err(_) => prop_assert!(gcd(mod_pos(a, n), n) != 1),
            }
        }

        #[test]
        fn perfect_square_detection(r in 0i64..3_000_000, d in 1i64..5) {
            prop_assert!(is_perfect_square(r * r));
            let gap = if r == 0 { 2 } else { d.min(2 * r) };
            prop_assert!(!is_perfect_square(r * r + gap));
        }
    }
}
