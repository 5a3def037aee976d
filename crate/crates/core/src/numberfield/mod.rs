//! Number fields given by a monic irreducible integer polynomial, the
//! splitting of rational primes (Dedekind's theorem) and the densities
//! `δ_ν` of primes with exactly `ν` unramified degree-one prime ideals.
//!
//! Polynomials cross this module's public boundary leading coefficient
//! first: `[1, 0, 1]` is `x^2 + 1` and `[1, 0, -1, -1]` is `x^3 - x - 1`.

mod densities;
pub(crate) mod fp;
mod group;
mod zpoly;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

pub use densities::{count_splitting, estimate_densities, DensitySource, DensityVector, SplittingCounts};
pub use group::{densities_from_group, Permutation, GROUP_LIMIT};

use crate::primes::is_prime;
use crate::{Error, Result};

/// A number field `K = Q[x]/(f)` with the invariants the rest of the crate needs.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberFieldSpec {
    label: String,
    /// lowest degree first
    coeffs: Vec<i64>,
    r1: usize,
    r2: usize,
    disc_f: i128,
    disc: u64,
    index_primes: Vec<u64>,
    local_data: Vec<(u64, Vec<PrimeFactor>)>,
}

/// Residue degree and ramification index of one prime ideal above `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeFactor {
    pub residue_degree: u32,
    pub ramification: u32,
}

impl PrimeFactor {
    pub const fn new(residue_degree: u32, ramification: u32) -> Self {
        Self { residue_degree, ramification }
    }
}

/// How a rational prime decomposes in `O_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingType {
    pub p: u64,
    /// sorted ascending
    pub factors: Vec<PrimeFactor>,
    /// number of unramified degree-one prime ideals above `p`
    pub nu: usize,
    pub ramified: bool,
}

impl SplittingType {
    fn from_factors(p: u64, mut factors: Vec<PrimeFactor>) -> Self {
        factors.sort_unstable();
        let nu = factors.iter().filter(|f| f.residue_degree == 1 && f.ramification == 1).count();
        let ramified = factors.iter().any(|f| f.ramification > 1);
        Self { p, factors, nu, ramified }
    }

    /// `Σ e_i f_i`, which equals the field degree.
    pub fn degree_sum(&self) -> usize {
        self.factors.iter().map(|f| (f.residue_degree * f.ramification) as usize).sum()
    }
}

/// A monic irreducible factor modulo `p` with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModpFactor {
    /// leading coefficient first, reduced into `[0, p)`
    pub coeffs: Vec<u64>,
    pub multiplicity: u32,
}

impl ModpFactor {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn ascending(descending: &[i64]) -> Vec<i64> {
    descending.iter().rev().copied().collect()
}

fn check_prime(p: u64) -> Result<()> {
    if p >= 1 << 32 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// Factors `f` modulo `p` into monic irreducibles.
///
/// `f` is given leading coefficient first. A non-monic `f` is factored up to
/// its leading coefficient. The result is sorted by degree, then by
/// coefficients from the top.
pub fn factor_mod_p(coeffs: &[i64], p: u64) -> Result<Vec<ModpFactor>> {
    check_prime(p)?;
    let field = fp::Fp::new(p);
    let f = field.from_ints(&ascending(coeffs));
    if f.is_empty() {
        return Err(Error::InvalidPolynomial("polynomial vanishes modulo p".into()));
    }
    let f = field.monic(&f);
    Ok(field
        .factor(&f)
        .into_iter()
        .map(|(g, e)| ModpFactor { coeffs: g.into_iter().rev().collect(), multiplicity: e })
        .collect())
}

/// Builds a [`NumberFieldSpec`] from a monic polynomial (leading coefficient first).
///
/// The field discriminant is `|disc f|` when Dedekind's criterion certifies
/// `Z[x]/(f)` maximal at every `p` with `p^2 | disc f`. Otherwise `d_override`
/// must supply it, and the failing primes are recorded as index primes whose
/// splitting is only available through [`NumberFieldSpec::with_local_splitting`].
pub fn parse_field(coeffs: &[i64], d_override: Option<u64>) -> Result<NumberFieldSpec> {
    let mut desc = coeffs;
    while desc.first() == Some(&0) {
        desc = &desc[1..];
    }
    match desc.first() {
        None => return Err(Error::InvalidPolynomial("zero polynomial".into())),
        Some(1) => {}
        Some(_) => return Err(Error::InvalidPolynomial("polynomial is not monic".into())),
    }
    if desc.len() < 2 {
        return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
    }
    let f = ascending(desc);
    let m = f.len() - 1;

    let disc_big = zpoly::discriminant(&f);
    if disc_big == BigInt::from(0) {
        return Err(Error::ReduciblePolynomial { degree: zpoly::repeated_part_degree(&f) });
    }
    zpoly::certify_irreducible(&f, &disc_big)?;
    let disc_f = disc_big.to_i128().ok_or(Error::Overflow("polynomial discriminant"))?;

    let r1 = zpoly::count_real_roots(&f);
    let r2 = (m - r1) / 2;

    let abs_disc = disc_big.abs().to_u128().ok_or(Error::Overflow("polynomial discriminant"))?;
    let index_primes: Vec<u64> = zpoly::square_divisor_primes(abs_disc)
        .into_iter()
        .filter(|&p| !zpoly::dedekind_maximal_at(&f, p))
        .collect();

    let disc = if index_primes.is_empty() {
        let d = u64::try_from(abs_disc).map_err(|_| Error::Overflow("field discriminant"))?;
        if let Some(given) = d_override {
            if given != d {
                return Err(Error::InconsistentDiscriminant { supplied: given, disc_f });
            }
        }
        d
    } else {
        let given = d_override.ok_or(Error::UnknownDiscriminant { prime: index_primes[0] })?;
        check_discriminant(given, abs_disc, &index_primes)
            .then_some(given)
            .ok_or(Error::InconsistentDiscriminant { supplied: given, disc_f })?
    };

    Ok(NumberFieldSpec {
        label: String::new(),
        coeffs: f,
        r1,
        r2,
        disc_f,
        disc,
        index_primes,
        local_data: Vec::new(),
    })
}

/// `|disc f| = [O_K : Z[ξ]]^2 · D`, and the index is divisible exactly by the
/// primes where Dedekind's criterion fails.
fn check_discriminant(d: u64, abs_disc: u128, index_primes: &[u64]) -> bool {
    if d == 0 || abs_disc % d as u128 != 0 {
        return false;
    }
    let q = abs_disc / d as u128;
    let s = crate::primes::isqrt(q);
    if s * s != q {
        return false;
    }
    let mut rest = s;
    for &p in index_primes {
        if rest % p as u128 != 0 {
            return false;
        }
        while rest % p as u128 == 0 {
            rest /= p as u128;
        }
    }
    rest == 1
}

impl NumberFieldSpec {
    /// The rational field `Q`, defined by `x - 1`.
    pub fn rationals() -> Self {
        parse_field(&[1, -1], None).expect("x - 1 defines Q").with_label("Q")
    }

    pub fn with_label(mut self, label: impl ToString) -> Self {
        self.label = label.to_string();
        self
    }

    /// Supplies the decomposition of an index prime, where Dedekind's theorem
    /// does not apply.
    pub fn with_local_splitting(mut self, p: u64, factors: Vec<PrimeFactor>) -> Result<Self> {
        if !self.index_primes.contains(&p) {
            return Err(Error::InvalidParameter(alloc::format!("{p} is not an index prime of this field")));
        }
        let total: usize = factors.iter().map(|f| (f.residue_degree * f.ramification) as usize).sum();
        if total != self.degree() || factors.iter().any(|f| f.residue_degree == 0 || f.ramification == 0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "local data at {p} must satisfy sum e_i f_i = {}",
                self.degree()
            )));
        }
        let ramified = factors.iter().any(|f| f.ramification > 1);
        if ramified != (self.disc % p == 0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "local data at {p} disagrees with the discriminant about ramification"
            )));
        }
        self.local_data.retain(|(q, _)| *q != p);
        self.local_data.push((p, factors));
        self.local_data.sort_by_key(|(q, _)| *q);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Defining polynomial, leading coefficient first.
    pub fn coeffs(&self) -> Vec<i64> {
        self.coeffs.iter().rev().copied().collect()
    }

    /// `m = [K : Q]`
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn r1(&self) -> usize {
        self.r1
    }

    pub fn r2(&self) -> usize {
        self.r2
    }

    pub fn poly_discriminant(&self) -> i128 {
        self.disc_f
    }

    /// Absolute value `D` of the field discriminant.
    pub fn discriminant(&self) -> u64 {
        self.disc
    }

    /// Primes where `Z[ξ]` fails to be maximal (Dedekind's criterion).
    pub fn index_primes(&self) -> &[u64] {
        &self.index_primes
    }

    /// Index primes for which no local decomposition was supplied.
    pub fn unresolved_primes(&self) -> Vec<u64> {
        self.index_primes
            .iter()
            .copied()
            .filter(|p| !self.local_data.iter().any(|(q, _)| q == p))
            .collect()
    }

    /// Decomposition of `p` in `O_K`, read off the factorization of `f` mod `p`.
    pub fn splitting_type(&self, p: u64) -> Result<SplittingType> {
        check_prime(p)?;
        if self.index_primes.contains(&p) {
            return match self.local_data.iter().find(|(q, _)| *q == p) {
                Some((_, factors)) => Ok(SplittingType::from_factors(p, factors.clone())),
                None => Err(Error::IndexDivisor(p)),
            };
        }
        let field = fp::Fp::new(p);
        let f = field.from_ints(&self.coeffs);
        let factors = field
            .factor_degrees(&f)
            .into_iter()
            .map(|(d, e)| PrimeFactor::new(d as u32, e))
            .collect();
        Ok(SplittingType::from_factors(p, factors))
    }
}
