//! Small prime utilities.

use alloc::vec;
use alloc::vec::Vec;

/// All primes `p <= bound`, ascending (sieve of Eratosthenes over odd numbers).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    // index i represents 2i + 1
    let half = (n - 1) / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(estimate_count(bound));
    out.push(2);
    out.extend((1..half).filter(|&i| !composite[i]).map(|i| (2 * i + 1) as u64));
    out
}

fn estimate_count(bound: u64) -> usize {
    let x = bound as f64;
    if x < 10.0 {
        4
    } else {
        (1.26 * x / libm::log(x)) as usize
    }
}

/// Deterministic primality test for `n < 2^64` (Miller–Rabin with a fixed witness set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Prime factorization by trial division, `(p, exponent)` ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
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

/// `true` when `n` has no repeated prime factor. `squarefree(1)` is `true`.
pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Integer square root (floor).
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_primality_test() {
        let ps = primes_up_to(10_000);
        assert_eq!(ps.len(), 1229);
        let brute: Vec<u64> = (0..=10_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, brute);
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(2), [2]);
    }

    #[test]
    fn miller_rabin_large() {
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(4_294_967_297)); // 641 * 6700417
        assert!(is_prime(1_000_000_007));
    }

    #[test]
    fn factorization_and_squarefree() {
        assert_eq!(factorize(360), [(2, 3), (3, 2), (5, 1)]);
        assert!(is_squarefree(30));
        assert!(!is_squarefree(12));
        assert_eq!(isqrt(1 << 100), 1 << 50);
        assert_eq!(isqrt(99), 9);
    }
}
