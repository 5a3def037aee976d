//! Polynomials over `Z` and `Q`: discriminant, real-root count, an
//! irreducibility certificate and Dedekind's maximality criterion.
//!
//! All polynomials here are lowest degree first.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::fp::{self, Fp};
use crate::primes::primes_up_to;
use crate::{Error, Result};

fn big(ints: &[i64]) -> Vec<BigInt> {
    ints.iter().map(|&c| BigInt::from(c)).collect()
}

fn trim_big<T: Zero>(f: &mut Vec<T>) {
    while f.last().map_or(false, |c| c.is_zero()) {
        f.pop();
    }
}

/// Determinant by Bareiss fraction-free elimination.
fn determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Resultant of two nonzero polynomials via the Sylvester matrix.
pub(crate) fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in f.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (j, c) in g.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    determinant(rows)
}

fn derivative_big(f: &[BigInt]) -> Vec<BigInt> {
    f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

/// Discriminant of a monic polynomial: `(-1)^{n(n-1)/2} Res(f, f')`.
pub(crate) fn discriminant(f: &[i64]) -> BigInt {
    let fb = big(f);
    let n = fb.len() - 1;
    if n == 1 {
        return BigInt::one();
    }
    let r = resultant(&fb, &derivative_big(&fb));
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

type QPoly = Vec<BigRational>;

fn rem_q(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut r: QPoly = a.to_vec();
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() {
        let c = r.last().unwrap() / &lead;
        let shift = r.len() - b.len();
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &c * bj;
        }
        r.pop();
        trim_big(&mut r);
    }
    r
}

fn gcd_q(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        let r = rem_q(&x, &y);
        x = y;
        y = r;
    }
    x
}

fn to_q(f: &[i64]) -> QPoly {
    f.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()
}

/// Number of distinct real roots of a squarefree polynomial (Sturm's theorem).
pub(crate) fn count_real_roots(f: &[i64]) -> usize {
    let p0 = to_q(f);
    let mut p1: QPoly = p0
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim_big(&mut p1);
    let mut seq = vec![p0];
    if !p1.is_empty() {
        seq.push(p1);
    }
    loop {
        let n = seq.len();
        let r = rem_q(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let changes = |signs: &mut dyn Iterator<Item = i8>| {
        let mut count = 0;
        let mut last = 0i8;
        for s in signs {
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    };
    let sign_of = |c: &BigRational| if c.is_positive() { 1i8 } else { -1 };
    let at_pos = changes(&mut seq.iter().map(|p| sign_of(p.last().unwrap())));
    let at_neg = changes(&mut seq.iter().map(|p| {
        let s = sign_of(p.last().unwrap());
        if (p.len() - 1) % 2 == 1 {
            -s
        } else {
            s
        }
    }));
    at_neg - at_pos
}

/// Degree of `gcd(f, f')` over `Q`; nonzero exactly when `f` has a repeated root.
pub(crate) fn repeated_part_degree(f: &[i64]) -> usize {
    let q = to_q(f);
    let mut d: QPoly = q
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim_big(&mut d);
    if d.is_empty() {
        return 0;
    }
    gcd_q(&q, &d).len() - 1
}

/// Subset sums of a multiset of factor degrees, as a bitmask over `0..=m`.
fn subset_sums(degrees: &[usize], m: usize) -> Vec<bool> {
    let mut reach = vec![false; m + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=m).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

/// Certifies that a monic squarefree `f` (nonzero discriminant) is irreducible
/// over `Q`, or returns the degree of a rational factor.
///
/// Factor-degree patterns modulo unramified primes are intersected first; if
/// they leave a proper degree possible, the factorization modulo the best
/// prime is Hensel-lifted and recombined (Zassenhaus).
pub(crate) fn certify_irreducible(f: &[i64], disc: &BigInt) -> Result<()> {
    let m = f.len() - 1;
    if m == 1 {
        return Ok(());
    }
    let mut possible = vec![true; m + 1];
    let mut best: Option<(u64, usize)> = None;
    let mut good = 0;
    for p in primes_up_to(2000) {
        if (disc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = Fp::new(p);
        let degrees: Vec<usize> = fp.factor_degrees(&fp.from_ints(f)).into_iter().map(|(d, _)| d).collect();
        if degrees.len() == 1 {
            return Ok(());
        }
        let reach = subset_sums(&degrees, m);
        for (s, r) in possible.iter_mut().zip(reach) {
            *s &= r;
        }
        if (1..m).all(|s| !possible[s]) {
            return Ok(());
        }
        if best.map_or(true, |(_, n)| degrees.len() < n) {
            best = Some((p, degrees.len()));
        }
        good += 1;
        if good >= 40 {
            break;
        }
    }
    let (p, _) = best.ok_or_else(|| Error::InvalidPolynomial("no unramified prime below 2000".into()))?;
    match zassenhaus_factor(f, p) {
        Some(degree) => Err(Error::ReduciblePolynomial { degree }),
        None => Ok(()),
    }
}

/// Symmetric residue of `c` modulo `modulus`.
fn symmetric(c: &BigInt, modulus: &BigInt) -> BigInt {
    let r = c.mod_floor(modulus);
    if &r + &r > *modulus {
        r - modulus
    } else {
        r
    }
}

fn reduce_all(f: &mut Vec<BigInt>, modulus: &BigInt) {
    for c in f.iter_mut() {
        *c = c.mod_floor(modulus);
    }
    trim_big(f);
}

fn add_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let mut out: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect();
    trim_big(&mut out);
    out
}

fn sub_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let mut out: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect();
    trim_big(&mut out);
    out
}

fn mul_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_big(&mut out);
    out
}

/// Division by a monic `b` over `Z` (optionally reducing modulo `modulus`).
fn divrem_monic(a: &[BigInt], b: &[BigInt], modulus: Option<&BigInt>) -> (Vec<BigInt>, Vec<BigInt>) {
    debug_assert!(b.last().map_or(false, |c| c.is_one()));
    if a.len() < b.len() {
        return (Vec::new(), a.to_vec());
    }
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - b.len() + 1];
    for shift in (0..quot.len()).rev() {
        let mut c = rem[shift + b.len() - 1].clone();
        if let Some(m) = modulus {
            c = c.mod_floor(m);
        }
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[shift + j] -= &c * bj;
            }
        }
        quot[shift] = c;
    }
    rem.truncate(b.len() - 1);
    if let Some(m) = modulus {
        reduce_all(&mut rem, m);
        reduce_all(&mut quot, m);
    } else {
        trim_big(&mut rem);
        trim_big(&mut quot);
    }
    (quot, rem)
}

fn lift_fp(f: &[u64]) -> Vec<BigInt> {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

/// One quadratic Hensel step: `f ≡ g h`, `s g + t h ≡ 1` modulo `m` become
/// the same relations modulo `m^2`.
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let m2 = m * m;
    let mut e = sub_z(f, &mul_z(g, h));
    reduce_all(&mut e, &m2);
    let (q, r) = divrem_monic(&mul_z(s, &e), h, Some(&m2));
    let mut g_new = add_z(&add_z(g, &mul_z(t, &e)), &mul_z(&q, g));
    reduce_all(&mut g_new, &m2);
    let mut h_new = add_z(h, &r);
    reduce_all(&mut h_new, &m2);
    let mut b = sub_z(&add_z(&mul_z(s, &g_new), &mul_z(t, &h_new)), &[BigInt::one()]);
    reduce_all(&mut b, &m2);
    let (c, d) = divrem_monic(&mul_z(s, &b), &h_new, Some(&m2));
    let mut s_new = sub_z(s, &d);
    reduce_all(&mut s_new, &m2);
    let mut t_new = sub_z(&sub_z(t, &mul_z(t, &b)), &mul_z(&c, &g_new));
    reduce_all(&mut t_new, &m2);
    (g_new, h_new, s_new, t_new)
}

/// Lifts `f ≡ ∏ factors (mod p)` to monic factors modulo `p^(2^steps)`.
fn multifactor_lift(f: &[BigInt], factors: &[fp::Poly], fp: &Fp, steps: u32) -> Vec<Vec<BigInt>> {
    let p = BigInt::from(fp.modulus());
    let target = num_traits::pow(p.clone(), 1usize << steps);
    if factors.len() == 1 {
        let mut only = f.to_vec();
        reduce_all(&mut only, &target);
        return vec![only];
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let prod = |fs: &[fp::Poly]| fs.iter().fold(vec![1u64], |acc, g| fp.poly_mul(&acc, g));
    let g0 = prod(left);
    let h0 = prod(right);
    let (one, s0, t0) = fp.xgcd(&g0, &h0);
    debug_assert_eq!(one, [1]);
    let (mut g, mut h, mut s, mut t) = (lift_fp(&g0), lift_fp(&h0), lift_fp(&s0), lift_fp(&t0));
    let mut modulus = p;
    for _ in 0..steps {
        let next = hensel_step(f, &g, &h, &s, &t, &modulus);
        g = next.0;
        h = next.1;
        s = next.2;
        t = next.3;
        modulus = &modulus * &modulus;
    }
    let mut out = multifactor_lift(&g, left, fp, steps);
    out.extend(multifactor_lift(&h, right, fp, steps));
    out
}

/// Returns the degree of a proper monic factor of `f` over `Z`, if any.
fn zassenhaus_factor(f: &[i64], p: u64) -> Option<usize> {
    let fb = big(f);
    let m = f.len() - 1;
    let fp = Fp::new(p);
    let factors: Vec<fp::Poly> = fp.factor(&fp.from_ints(f)).into_iter().map(|(g, _)| g).collect();
    let r = factors.len();
    if r == 1 {
        return None;
    }
    // Mignotte: every coefficient of a monic factor is at most 2^m ||f||_2.
    let norm_sq: BigInt = fb.iter().map(|c| c * c).sum();
    let bound = (norm_sq.sqrt() + BigInt::one()) << m;
    let pb = BigInt::from(p);
    let mut steps = 0u32;
    while num_traits::pow(pb.clone(), 1usize << steps) <= &bound * 2 {
        steps += 1;
    }
    let modulus = num_traits::pow(pb, 1usize << steps);
    let lifted = multifactor_lift(&fb, &factors, &fp, steps);
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut cand = vec![BigInt::one()];
            for &i in &idx {
                cand = mul_z(&cand, &lifted[i]);
                reduce_all(&mut cand, &modulus);
            }
            let cand: Vec<BigInt> = cand.iter().map(|c| symmetric(c, &modulus)).collect();
            let (_, rem) = divrem_monic(&fb, &cand, None);
            if rem.is_empty() && cand.len() - 1 < m {
                return Some(cand.len() - 1);
            }
            if !next_combination(&mut idx, r) {
                break;
            }
        }
    }
    None
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Dedekind's criterion: `Z[x]/(f)` is maximal at `p` iff
/// `gcd(F̄, ḡ, h̄) = 1` where `f̄ = ḡ h̄` with `ḡ` the radical of `f̄` and
/// `F = (f - g h) / p`.
pub(crate) fn dedekind_maximal_at(f: &[i64], p: u64) -> bool {
    let fp = Fp::new(p);
    let fbar = fp.from_ints(f);
    let factors = fp.factor(&fbar);
    let mut g = vec![1u64];
    let mut h = vec![1u64];
    for (q, e) in &factors {
        g = fp.poly_mul(&g, q);
        for _ in 1..*e {
            h = fp.poly_mul(&h, q);
        }
    }
    let gh = mul_z(&lift_fp(&g), &lift_fp(&h));
    let diff = sub_z(&big(f), &gh);
    let pb = BigInt::from(p);
    let reduced: Vec<i64> = diff
        .iter()
        .map(|c| {
            debug_assert!((c % &pb).is_zero());
            (c / &pb).mod_floor(&pb).to_i64().unwrap()
        })
        .collect();
    let big_f = fp.from_ints(&reduced);
    let common = fp.gcd(&fp.gcd(&g, &h), &big_f);
    common.len() <= 1
}

/// Primes `p` with `p^2 | n`, ascending.
pub(crate) fn square_divisor_primes(mut n: u128) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e >= 2 {
                out.push(p as u64);
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // what remains has at most two prime factors, both above the cube root
    if n > 1 {
        let s = crate::primes::isqrt(n);
        if s * s == n {
            out.push(s as u64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&[1, 0, 1]), BigInt::from(-4));
        assert_eq!(discriminant(&[-1, -1, 0, 1]), BigInt::from(-23));
        assert_eq!(discriminant(&[16, 20, 0, 0, 0, 1]), BigInt::from(1_024_000_000));
        assert_eq!(discriminant(&[-2, 0, 0, 1]), BigInt::from(-108));
        assert_eq!(discriminant(&[-1, 1]), BigInt::from(1));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(count_real_roots(&[1, 0, 1]), 0);
        assert_eq!(count_real_roots(&[-1, -1, 0, 1]), 1);
        assert_eq!(count_real_roots(&[-1, -3, 0, 1]), 3);
        assert_eq!(count_real_roots(&[16, 20, 0, 0, 0, 1]), 1);
        assert_eq!(count_real_roots(&[1, 0, 0, 0, 1]), 0);
        assert_eq!(count_real_roots(&[-1, 1]), 1);
    }

    #[test]
    fn irreducibility_certificates() {
        let check = |f: &[i64]| certify_irreducible(f, &discriminant(f));
        assert!(check(&[1, 0, 1]).is_ok());
        assert!(check(&[16, 20, 0, 0, 0, 1]).is_ok());
        // x^4 + 1 is reducible modulo every prime but irreducible over Q
        assert!(check(&[1, 0, 0, 0, 1]).is_ok());
        // (x^2 + 1)(x^2 - 2) = x^4 - x^2 - 2
        assert_eq!(check(&[-2, 0, -1, 0, 1]), Err(Error::ReduciblePolynomial { degree: 2 }));
        // (x^2 + x + 1)(x^3 - x - 1)
        let f = [-1, -2, -2, 0, 1, 1];
        assert_eq!(check(&f), Err(Error::ReduciblePolynomial { degree: 2 }));
        // x^4 - 10x^2 + 1 (minimal polynomial of sqrt2 + sqrt3)
        assert!(check(&[1, 0, -10, 0, 1]).is_ok());
    }

    #[test]
    fn dedekind_criterion() {
        // x^2 + 3: Z[sqrt(-3)] is not 2-maximal
        assert!(!dedekind_maximal_at(&[3, 0, 1], 2));
        // x^2 + 1 is 2-maximal
        assert!(dedekind_maximal_at(&[1, 0, 1], 2));
        // x^5 + 20x + 16: index 32, maximal at 5
        assert!(!dedekind_maximal_at(&[16, 20, 0, 0, 0, 1], 2));
        assert!(dedekind_maximal_at(&[16, 20, 0, 0, 0, 1], 5));
        // x^3 - 2 is maximal at 2 and 3
        assert!(dedekind_maximal_at(&[-2, 0, 0, 1], 2));
        assert!(dedekind_maximal_at(&[-2, 0, 0, 1], 3));
    }

    #[test]
    fn square_divisors() {
        assert_eq!(square_divisor_primes(1_024_000_000), [2, 5]);
        assert_eq!(square_divisor_primes(23), Vec::<u64>::new());
        assert_eq!(square_divisor_primes(108), [2, 3]);
        assert_eq!(square_divisor_primes(1_000_003u128 * 1_000_003), [1_000_003]);
    }
}
