use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use super::NumberFieldSpec;
use crate::primes::primes_up_to;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensitySource {
    ExactGroup,
    Empirical,
    UserSupplied,
}

/// Densities `δ_ν` for `0 <= ν <= m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector {
    deltas: Vec<f64>,
    exact: Option<Vec<Ratio<u64>>>,
    source: DensitySource,
    analyzed_primes: Option<u64>,
}

impl DensityVector {
    pub(crate) fn from_exact(exact: Vec<Ratio<u64>>, source: DensitySource) -> Self {
        let deltas = exact.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
        Self { deltas, exact: Some(exact), source, analyzed_primes: None }
    }

    /// User-supplied densities; `Σ ν δ_ν` must be 1 within `1e-9`.
    pub fn user_supplied(deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() < 2 || deltas.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return Err(Error::InvalidParameter("densities must lie in [0, 1] for nu = 0..=m".into()));
        }
        let v = Self { deltas, exact: None, source: DensitySource::UserSupplied, analyzed_primes: None };
        if (v.weighted_sum() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("densities must satisfy sum nu * delta_nu = 1".into()));
        }
        Ok(v)
    }

    /// Exact rational densities (exact `1/m` at `ν = m`, zero elsewhere in
    /// `1..m`) of a normal extension of degree `m`.
    pub fn normal_extension(m: usize) -> Self {
        let mut exact = vec![Ratio::new(0u64, 1); m + 1];
        exact[m] = Ratio::new(1, m as u64);
        exact[0] = Ratio::new(m as u64 - 1, m as u64);
        Self::from_exact(exact, DensitySource::UserSupplied)
    }

    pub fn degree(&self) -> usize {
        self.deltas.len() - 1
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn delta(&self, nu: usize) -> f64 {
        self.deltas.get(nu).copied().unwrap_or(0.0)
    }

    pub fn exact(&self) -> Option<&[Ratio<u64>]> {
        self.exact.as_deref()
    }

    pub fn source(&self) -> DensitySource {
        self.source
    }

    /// Number of primes behind an empirical estimate.
    pub fn analyzed_primes(&self) -> Option<u64> {
        self.analyzed_primes
    }

    /// `I = {ν >= 1 : δ_ν > 0}`
    pub fn support(&self) -> Vec<usize> {
        (1..self.deltas.len()).filter(|&nu| self.deltas[nu] > 0.0).collect()
    }

    /// `R = |I|`
    pub fn r(&self) -> usize {
        self.support().len()
    }

    /// `Σ_{ν>=1} ν δ_ν`, which equals 1.
    pub fn weighted_sum(&self) -> f64 {
        self.deltas.iter().enumerate().map(|(nu, d)| nu as f64 * d).sum()
    }

    /// `Σ ν δ_ν` in exact arithmetic, when exact values are known.
    pub fn weighted_sum_exact(&self) -> Option<Ratio<u64>> {
        self.exact.as_ref().map(|e| {
            e.iter().enumerate().fold(Ratio::new(0, 1), |acc, (nu, d)| acc + *d * Ratio::from_integer(nu as u64))
        })
    }
}

/// Tallies of splitting types over a set of primes; chunks can be merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingCounts {
    /// `by_nu[ν]`: unramified primes with exactly `ν` degree-one primes above
    pub by_nu: Vec<u64>,
    pub ramified: u64,
    pub index_skipped: u64,
}

impl SplittingCounts {
    pub fn new(degree: usize) -> Self {
        Self { by_nu: vec![0; degree + 1], ramified: 0, index_skipped: 0 }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.by_nu.iter_mut().zip(&other.by_nu) {
            *a += b;
        }
        self.ramified += other.ramified;
        self.index_skipped += other.index_skipped;
    }

    pub fn analyzed(&self) -> u64 {
        self.by_nu.iter().sum()
    }

    pub fn into_densities(self) -> DensityVector {
        let total = self.analyzed().max(1) as f64;
        DensityVector {
            deltas: self.by_nu.iter().map(|&c| c as f64 / total).collect(),
            exact: None,
            source: DensitySource::Empirical,
            analyzed_primes: Some(self.analyzed()),
        }
    }
}

/// Classifies each prime in `primes`. Primes whose splitting is unknown
/// (index divisors without local data) are skipped and counted separately.
pub fn count_splitting(spec: &NumberFieldSpec, primes: &[u64]) -> SplittingCounts {
    let mut counts = SplittingCounts::new(spec.degree());
    for &p in primes {
        match spec.splitting_type(p) {
            Ok(s) if s.ramified => counts.ramified += 1,
            Ok(s) => counts.by_nu[s.nu] += 1,
            Err(_) => counts.index_skipped += 1,
        }
    }
    counts
}

/// Empirical densities over the unramified primes `p <= prime_bound`.
pub fn estimate_densities(spec: &NumberFieldSpec, prime_bound: u64) -> Result<DensityVector> {
    if prime_bound < 100 {
        return Err(Error::InvalidParameter("prime bound must be at least 100".into()));
    }
    Ok(count_splitting(spec, &primes_up_to(prime_bound)).into_densities())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::parse_field;

    #[test]
    fn rationals_split_completely() {
        let q = NumberFieldSpec::rationals();
        let d = estimate_densities(&q, 1000).unwrap();
        assert_eq!(d.deltas(), [0.0, 1.0]);
        assert_eq!(d.analyzed_primes(), Some(168));
    }

    #[test]
    fn gaussian_counts_match_residue_classes() {
        let k = parse_field(&[1, 0, 1], None).unwrap();
        let primes = primes_up_to(100_000);
        let c = count_splitting(&k, &primes);
        let one_mod_4 = primes.iter().filter(|&&p| p % 4 == 1).count() as u64;
        let three_mod_4 = primes.iter().filter(|&&p| p % 4 == 3).count() as u64;
        assert_eq!(c.by_nu, [three_mod_4, 0, one_mod_4]);
        assert_eq!(c.ramified, 1);
    }

    #[test]
    fn chunked_counts_agree() {
        let k = parse_field(&[1, 0, -1, -1], None).unwrap();
        let primes = primes_up_to(20_000);
        let whole = count_splitting(&k, &primes);
        let mut merged = SplittingCounts::new(3);
        for chunk in primes.chunks(777) {
            merged.merge(&count_splitting(&k, chunk));
        }
        assert_eq!(whole, merged);
    }

    #[test]
    fn user_supplied_validation() {
        assert!(DensityVector::user_supplied(vec![0.5, 0.0, 0.5]).is_ok());
        assert!(DensityVector::user_supplied(vec![0.5, 0.5]).is_err());
        let n = DensityVector::normal_extension(4);
        assert_eq!(n.weighted_sum_exact(), Some(Ratio::from_integer(1)));
        assert_eq!(n.support(), [4]);
    }

    #[test]
    fn bound_too_small() {
        assert!(estimate_densities(&NumberFieldSpec::rationals(), 99).is_err());
    }
}
