//! Dense polynomials over the prime field `F_p` and their factorization.
//!
//! Coefficients are stored lowest degree first and kept normalized (no
//! trailing zeros; the zero polynomial is the empty vector). The modulus must
//! be below `2^32` so that products of reduced residues fit in a `u64`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed for the equal-degree splitting; fixed so factorizations are reproducible.
const SPLIT_SEED: u64 = 0x5eed_1d3a_11ce_0001;

pub(crate) type Poly = Vec<u64>;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Fp {
    p: u64,
}

impl Fp {
    pub(crate) fn new(p: u64) -> Self {
        debug_assert!(p >= 2 && p < 1 << 32);
        Self { p }
    }

    pub(crate) fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    /// Reduces an integer coefficient into `[0, p)`.
    pub(crate) fn reduce(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    pub(crate) fn from_ints(&self, ascending: &[i64]) -> Poly {
        let mut f: Poly = ascending.iter().map(|&c| self.reduce(c)).collect();
        trim(&mut f);
        f
    }

    pub(crate) fn poly_add(&self, a: &[u64], b: &[u64]) -> Poly {
        let n = a.len().max(b.len());
        let mut out: Poly = (0..n)
            .map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub(crate) fn poly_sub(&self, a: &[u64], b: &[u64]) -> Poly {
        let n = a.len().max(b.len());
        let mut out: Poly = (0..n)
            .map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub(crate) fn poly_mul(&self, a: &[u64], b: &[u64]) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    /// Quotient and remainder of `a / b`; `b` must be nonzero.
    pub(crate) fn poly_divrem(&self, a: &[u64], b: &[u64]) -> (Poly, Poly) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        if a.len() < b.len() {
            return (Vec::new(), a.to_vec());
        }
        let lead_inv = self.inv(*b.last().unwrap());
        let mut rem = a.to_vec();
        let mut quot = vec![0u64; a.len() - b.len() + 1];
        for shift in (0..quot.len()).rev() {
            let c = self.mul(rem[shift + b.len() - 1], lead_inv);
            quot[shift] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    rem[shift + j] = self.sub(rem[shift + j], self.mul(c, bj));
                }
            }
        }
        rem.truncate(b.len() - 1);
        trim(&mut rem);
        trim(&mut quot);
        (quot, rem)
    }

    pub(crate) fn poly_rem(&self, a: &[u64], b: &[u64]) -> Poly {
        self.poly_divrem(a, b).1
    }

    pub(crate) fn monic(&self, a: &[u64]) -> Poly {
        match a.last() {
            None => Vec::new(),
            Some(&1) => a.to_vec(),
            Some(&lead) => {
                let inv = self.inv(lead);
                a.iter().map(|&c| self.mul(c, inv)).collect()
            }
        }
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub(crate) fn gcd(&self, a: &[u64], b: &[u64]) -> Poly {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        while !y.is_empty() {
            let r = self.poly_rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Extended Euclid: `(g, s, t)` with `s·a + t·b = g`, `g` monic.
    pub(crate) fn xgcd(&self, a: &[u64], b: &[u64]) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1) = (vec![1u64], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = self.poly_divrem(&r0, &r1);
            let s2 = self.poly_sub(&s0, &self.poly_mul(&q, &s1));
            let t2 = self.poly_sub(&t0, &self.poly_mul(&q, &t1));
            r0 = core::mem::replace(&mut r1, r);
            s0 = core::mem::replace(&mut s1, s2);
            t0 = core::mem::replace(&mut t1, t2);
        }
        let lead = *r0.last().expect("xgcd of two zero polynomials");
        let inv = self.inv(lead);
        let scale = |v: &[u64]| -> Poly { v.iter().map(|&c| self.mul(c, inv)).collect() };
        (scale(&r0), scale(&s0), scale(&t0))
    }

    pub(crate) fn derivative(&self, a: &[u64]) -> Poly {
        let mut out: Poly = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, i as u64 % self.p))
            .collect();
        trim(&mut out);
        out
    }

    pub(crate) fn mulmod(&self, a: &[u64], b: &[u64], f: &[u64]) -> Poly {
        self.poly_rem(&self.poly_mul(a, b), f)
    }

    pub(crate) fn powmod(&self, base: &[u64], mut exp: u64, f: &[u64]) -> Poly {
        let mut acc = self.poly_rem(&[1], f);
        let mut b = self.poly_rem(base, f);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mulmod(&acc, &b, f);
            }
            b = self.mulmod(&b, &b, f);
            exp >>= 1;
        }
        acc
    }

    /// Squarefree decomposition of a monic `f`: pairwise coprime squarefree
    /// monic `g_i` with `f = ∏ g_i^{e_i}`.
    pub(crate) fn squarefree(&self, f: &[u64]) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if f.len() <= 1 {
            return out;
        }
        let df = self.derivative(f);
        let mut c = self.gcd(f, &df);
        let mut w = self.poly_divrem(f, &c).0;
        let mut i = 1u32;
        while w.len() > 1 {
            let y = self.gcd(&w, &c);
            let fac = self.poly_divrem(&w, &y).0;
            if fac.len() > 1 {
                out.push((self.monic(&fac), i));
            }
            c = self.poly_divrem(&c, &y).0;
            w = y;
            i += 1;
        }
        if c.len() > 1 {
            // c is a p-th power: c(x) = r(x^p) with r = c^{1/p} over F_p
            let p = self.p as usize;
            let root: Poly = c.iter().step_by(p).copied().collect();
            for (g, e) in self.squarefree(&root) {
                out.push((g, e * self.p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a squarefree monic `f`:
    /// `(product of all irreducible factors of degree d, d)`.
    pub(crate) fn distinct_degree(&self, f: &[u64]) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut rest = f.to_vec();
        let x: Poly = vec![0, 1];
        let mut h = self.poly_rem(&x, &rest);
        let mut d = 1;
        while rest.len() - 1 >= 2 * d {
            h = self.powmod(&h, self.p, &rest);
            let g = self.gcd(&rest, &self.poly_sub(&h, &x));
            if g.len() > 1 {
                rest = self.poly_divrem(&rest, &g).0;
                h = self.poly_rem(&h, &rest);
                out.push((g, d));
            }
            d += 1;
        }
        if rest.len() > 1 {
            let deg = rest.len() - 1;
            out.push((rest, deg));
        }
        out
    }

    /// Cantor–Zassenhaus splitting of a squarefree monic `f` whose irreducible
    /// factors all have degree `d`.
    pub(crate) fn equal_degree(&self, f: &[u64], d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
        let n = f.len() - 1;
        if n == d {
            out.push(f.to_vec());
            return;
        }
        loop {
            let mut a: Poly = (0..n).map(|_| rng.gen_range(0..self.p)).collect();
            trim(&mut a);
            if a.len() < 2 {
                continue;
            }
            let g = self.gcd(&a, f);
            let candidate = if g.len() > 1 && g.len() < f.len() {
                g
            } else {
                let b = if self.p == 2 {
                    // absolute trace from F_{2^d} to F_2
                    let mut cur = a.clone();
                    let mut acc = a;
                    for _ in 1..d {
                        cur = self.mulmod(&cur, &cur, f);
                        acc = self.poly_add(&acc, &cur);
                    }
                    acc
                } else {
                    // a^{(p^d - 1)/2} = (a^{1 + p + ... + p^{d-1}})^{(p-1)/2}
                    let mut cur = a.clone();
                    let mut norm = a;
                    for _ in 1..d {
                        cur = self.powmod(&cur, self.p, f);
                        norm = self.mulmod(&norm, &cur, f);
                    }
                    let half = self.powmod(&norm, (self.p - 1) / 2, f);
                    self.poly_sub(&half, &[1])
                };
                self.gcd(&b, f)
            };
            if candidate.len() > 1 && candidate.len() < f.len() {
                let other = self.poly_divrem(f, &candidate).0;
                self.equal_degree(&candidate, d, rng, out);
                self.equal_degree(&other, d, rng, out);
                return;
            }
        }
    }

    /// Complete factorization of a monic `f` into monic irreducibles with
    /// multiplicities, sorted by degree then by coefficients from the top.
    pub(crate) fn factor(&self, f: &[u64]) -> Vec<(Poly, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED ^ self.p);
        let mut out = Vec::new();
        for (g, e) in self.squarefree(f) {
            for (block, d) in self.distinct_degree(&g) {
                let mut pieces = Vec::new();
                self.equal_degree(&block, d, &mut rng, &mut pieces);
                out.extend(pieces.into_iter().map(|q| (q, e)));
            }
        }
        out.sort_by(|a, b| cmp_poly(&a.0, &b.0).then(a.1.cmp(&b.1)));
        out
    }

    /// Degrees and multiplicities of the irreducible factors of a monic `f`,
    /// without splitting equal-degree blocks. Sorted ascending.
    pub(crate) fn factor_degrees(&self, f: &[u64]) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (g, e) in self.squarefree(f) {
            for (block, d) in self.distinct_degree(&g) {
                let count = (block.len() - 1) / d;
                out.extend(core::iter::repeat((d, e)).take(count));
            }
        }
        out.sort_unstable();
        out
    }
}

pub(crate) fn trim(f: &mut Poly) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

/// Orders by degree, then lexicographically from the leading coefficient down.
pub(crate) fn cmp_poly(a: &[u64], b: &[u64]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prod(fp: &Fp, factors: &[(Poly, u32)]) -> Poly {
        let mut acc = vec![1u64];
        for (g, e) in factors {
            for _ in 0..*e {
                acc = fp.poly_mul(&acc, g);
            }
        }
        acc
    }

    #[test]
    fn x2_plus_1() {
        let f = [1, 0, 1];
        assert_eq!(Fp::new(5).factor(&f), [(vec![2, 1], 1), (vec![3, 1], 1)]);
        assert_eq!(Fp::new(2).factor(&f), [(vec![1, 1], 2)]);
        assert_eq!(Fp::new(3).factor(&f), [(vec![1, 0, 1], 1)]);
    }

    #[test]
    fn inseparable_input_in_char_2() {
        // (x^2 + x + 1)^2 (x + 1)^4 over F_2
        let fp = Fp::new(2);
        let a = fp.poly_mul(&[1, 1, 1], &[1, 1, 1]);
        let b = fp.poly_mul(&fp.poly_mul(&[1, 1], &[1, 1]), &fp.poly_mul(&[1, 1], &[1, 1]));
        let f = fp.poly_mul(&a, &b);
        let fac = fp.factor(&f);
        assert_eq!(fac, [(vec![1, 1], 4), (vec![1, 1, 1], 2)]);
        assert_eq!(prod(&fp, &fac), f);
    }

    #[test]
    fn equal_degree_split_over_f2() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible over F_2; x^15 - 1 splits into
        // 1 + 1 + 2 + 4 + 4 + 4 degrees
        let fp = Fp::new(2);
        let mut f = vec![0u64; 16];
        f[0] = 1;
        f[15] = 1;
        let fac = fp.factor(&f);
        let degs: Vec<usize> = fac.iter().map(|(g, _)| g.len() - 1).collect();
        assert_eq!(degs, [1, 2, 4, 4, 4]);
        assert_eq!(prod(&fp, &fac), f);
    }

    #[test]
    fn xgcd_bezout() {
        let fp = Fp::new(7);
        let a = [3, 1, 0, 1];
        let b = [1, 2, 1];
        let (g, s, t) = fp.xgcd(&a, &b);
        let lhs = fp.poly_add(&fp.poly_mul(&s, &a), &fp.poly_mul(&t, &b));
        assert_eq!(lhs, g);
        assert_eq!(g, fp.gcd(&a, &b));
    }
}
