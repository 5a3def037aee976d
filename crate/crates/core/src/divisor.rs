//! Coefficients `d_K^(k)(n)` of `ζ_K(s)^k`.
//!
//! The Euler factor at `p` is `∏_i (1 - p^{-f_i s})^{-k}` over the prime
//! ideals above `p`, so `d_K^(k)` is multiplicative and its value at `p^j`
//! depends only on the residue degrees `f_i`. The sieve fills every
//! multiple of each prime with the local coefficient at the exact power of
//! `p` dividing it.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::numberfield::{NumberFieldSpec, SplittingType};
use crate::primes::primes_up_to;
use crate::{Error, Result};

/// Sieved values `d_K^(k)(n)` for `1 <= n <= N`, stored as running sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    field_label: String,
    k: u32,
    /// `cumulative[n] = Σ_{j<=n} d(j)`, `cumulative[0] = 0`
    cumulative: Vec<u64>,
    unresolved_primes: Vec<u64>,
}

impl DivisorTable {
    /// Builds a table from `values[0] = d(1), values[1] = d(2), ...`.
    pub fn from_values(field_label: impl ToString, k: u32, values: &[u64], unresolved_primes: Vec<u64>) -> Result<Self> {
        if values.first() != Some(&1) {
            return Err(Error::InvalidParameter("a divisor table must start with d(1) = 1".into()));
        }
        let mut cumulative = Vec::with_capacity(values.len() + 1);
        cumulative.push(0u64);
        let mut acc = 0u64;
        for &v in values {
            acc = acc.checked_add(v).ok_or(Error::Overflow("summatory function"))?;
            cumulative.push(acc);
        }
        Ok(Self { field_label: field_label.to_string(), k, cumulative, unresolved_primes })
    }

    pub fn field_label(&self) -> &str {
        &self.field_label
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Largest `n` in the table.
    pub fn len(&self) -> u64 {
        (self.cumulative.len() - 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index primes whose local factors came from user-supplied decompositions.
    pub fn unresolved_primes(&self) -> &[u64] {
        &self.unresolved_primes
    }

    /// `d_K^(k)(n)` for `1 <= n <= N`.
    pub fn value(&self, n: u64) -> u64 {
        let n = n as usize;
        self.cumulative[n] - self.cumulative[n - 1]
    }

    /// `d(1), d(2), ..., d(N)`.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.cumulative.windows(2).map(|w| w[1] - w[0])
    }

    /// `Σ_{n<=N} d(n)` for integer `N` within the table.
    pub fn summatory_at(&self, n: u64) -> u64 {
        self.cumulative[n as usize]
    }

    /// `D_K^(k)(x) = Σ_{n<=x} d_K^(k)(n)`.
    pub fn summatory(&self, x: f64) -> Result<u64> {
        if x.is_nan() {
            return Err(Error::InvalidParameter("x is NaN".into()));
        }
        if x < 1.0 {
            return Ok(0);
        }
        let n = libm::floor(x);
        if n > self.len() as f64 {
            return Err(Error::RangeExceeded { requested: x, available: self.len() });
        }
        Ok(self.cumulative[n as usize])
    }
}

fn binomial(n: u64, r: u64) -> Option<u64> {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).ok()
}

pub(crate) fn local_factor_from_splitting(split: &SplittingType, k: u32, max_power: usize) -> Result<Vec<u64>> {
    let mut series = vec![0u64; max_power + 1];
    series[0] = 1;
    for factor in &split.factors {
        let f = factor.residue_degree as usize;
        // (1 - T^f)^{-k} = Σ_j C(j + k - 1, k - 1) T^{f j}
        let mut next = vec![0u64; max_power + 1];
        for (i, &a) in series.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let mut j = 0;
            while i + f * j <= max_power {
                let c = binomial(j as u64 + k as u64 - 1, k as u64 - 1).ok_or(Error::Overflow("local factor"))?;
                let term = a.checked_mul(c).ok_or(Error::Overflow("local factor"))?;
                next[i + f * j] = next[i + f * j].checked_add(term).ok_or(Error::Overflow("local factor"))?;
                j += 1;
            }
        }
        series = next;
    }
    Ok(series)
}

/// Coefficients `d_K^(k)(p^j)` for `0 <= j <= max_power`.
pub fn local_factor(spec: &NumberFieldSpec, p: u64, k: u32, max_power: usize) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let split = spec.splitting_type(p)?;
    local_factor_from_splitting(&split, k, max_power)
}

/// Sieves `d_K^(k)(n)` for all `n <= n_max`.
pub fn sieve_divisors(spec: &NumberFieldSpec, k: u32, n_max: u64) -> Result<DivisorTable> {
    if k == 0 || n_max == 0 {
        return Err(Error::InvalidParameter("k and N must be positive".into()));
    }
    let n = usize::try_from(n_max).map_err(|_| Error::Overflow("table size"))?;
    let mut values = vec![1u64; n + 1];
    values[0] = 0;
    let mut unresolved = Vec::new();
    for p in primes_up_to(n_max) {
        let split = spec.splitting_type(p)?;
        if spec.index_primes().contains(&p) {
            unresolved.push(p);
        }
        let pu = p as usize;
        let mut max_power = 1;
        let mut q = pu;
        while q <= n / pu {
            q *= pu;
            max_power += 1;
        }
        let local = local_factor_from_splitting(&split, k, max_power)?;
        if local.iter().skip(1).all(|&c| c == 1) {
            continue;
        }
        for m in (pu..=n).step_by(pu) {
            let mut t = m / pu;
            let mut j = 1;
            while t % pu == 0 {
                t /= pu;
                j += 1;
            }
            values[m] = values[m].checked_mul(local[j]).ok_or(Error::Overflow("divisor value"))?;
        }
    }
    DivisorTable::from_values(spec.label(), k, &values[1..], unresolved)
}

/// Dirichlet convolution of two coefficient sequences indexed from `n = 1`.
pub fn dirichlet_convolve(a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().min(b.len());
    let mut out = vec![0u64; n];
    for i in 1..=n {
        if a[i - 1] == 0 {
            continue;
        }
        for j in 1..=n / i {
            out[i * j - 1] += a[i - 1] * b[j - 1];
        }
    }
    out
}

/// Number of `(a, b) ∈ Z^2` with `a^2 + b^2 <= x`, by direct enumeration over `a`.
pub fn oracle_lattice_count(x: f64) -> u64 {
    if x < 0.0 {
        return 0;
    }
    let n = libm::floor(x) as u64;
    let r = crate::primes::isqrt(n as u128) as u64;
    let mut count = 0u64;
    for a in 0..=r {
        let b = crate::primes::isqrt((n - a * a) as u128) as u64;
        let column = 2 * b + 1;
        count += if a == 0 { column } else { 2 * column };
    }
    count
}

/// Number of divisors of `n` by trial division.
pub fn oracle_divisor(n: u64) -> u64 {
    assert!(n >= 1);
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}
