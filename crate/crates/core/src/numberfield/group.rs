//! Exact splitting densities from a transitive permutation group.
//!
//! With `G` the Galois group of the normal closure acting on the `m` cosets
//! of `H = Gal(K^G / K)` (equivalently on the roots of `f`), a Frobenius
//! element with exactly `ν` fixed points corresponds to a prime with exactly
//! `ν` degree-one prime ideals above it, so `δ_ν` is the proportion of group
//! elements fixing exactly `ν` points.

use alloc::collections::BTreeSet;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use super::densities::{DensitySource, DensityVector};
use crate::{Error, Result};

/// Largest group order [`densities_from_group`] will enumerate.
pub const GROUP_LIMIT: usize = 1_000_000;

const MAX_POINTS: usize = 16;

/// A permutation of `{0, .., m-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    /// From one-line notation on `{1, .., m}`: `images[i]` is the image of `i + 1`.
    pub fn from_one_line(images: &[usize]) -> Result<Self> {
        let m = images.len();
        if m == 0 || m > MAX_POINTS {
            return Err(Error::InvalidPermutation(alloc::format!("degree {m} outside 1..={MAX_POINTS}")));
        }
        let mut seen = vec![false; m];
        let mut out = Vec::with_capacity(m);
        for &img in images {
            if img == 0 || img > m || seen[img - 1] {
                return Err(Error::InvalidPermutation(alloc::format!("{images:?} is not a permutation of 1..={m}")));
            }
            seen[img - 1] = true;
            out.push((img - 1) as u8);
        }
        Ok(Self(out))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|&(i, &j)| i == j as usize).count()
    }

    fn key(&self) -> u128 {
        self.0.iter().enumerate().fold(0u128, |acc, (i, &j)| acc | (j as u128) << (8 * i))
    }

    /// `self` followed by `other`.
    fn then(&self, other: &Self) -> Self {
        Self(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }
}

/// Exact densities `δ_ν`, `0 <= ν <= m`, from generators of a transitive group.
pub fn densities_from_group(degree: usize, generators: &[Permutation]) -> Result<DensityVector> {
    if degree == 0 || degree > MAX_POINTS {
        return Err(Error::InvalidPermutation(alloc::format!("degree {degree} outside 1..={MAX_POINTS}")));
    }
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::InvalidPermutation(alloc::format!(
            "generator acts on {} points, expected {degree}",
            g.degree()
        )));
    }

    let mut orbit = vec![false; degree];
    orbit[0] = true;
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        for g in generators {
            let j = g.0[i] as usize;
            if !orbit[j] {
                orbit[j] = true;
                stack.push(j);
            }
        }
    }
    if orbit.iter().any(|&o| !o) {
        return Err(Error::IntransitiveGroup);
    }

    let identity = Permutation((0..degree as u8).collect());
    let mut seen = BTreeSet::new();
    seen.insert(identity.key());
    let mut queue = VecDeque::from([identity]);
    let mut counts = vec![0u64; degree + 1];
    while let Some(g) = queue.pop_front() {
        counts[g.fixed_points()] += 1;
        for s in generators {
            let h = g.then(s);
            if seen.insert(h.key()) {
                if seen.len() > GROUP_LIMIT {
                    return Err(Error::GroupTooLarge { limit: GROUP_LIMIT });
                }
                queue.push_back(h);
            }
        }
    }
    let order = seen.len() as u64;
    let exact: Vec<Ratio<u64>> = counts.iter().map(|&c| Ratio::new(c, order)).collect();
    Ok(DensityVector::from_exact(exact, DensitySource::ExactGroup))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    #[test]
    fn symmetric_group_s3() {
        let d = densities_from_group(3, &[perm(&[2, 1, 3]), perm(&[2, 3, 1])]).unwrap();
        let exact = d.exact().unwrap();
        assert_eq!(exact, [Ratio::new(1, 3), Ratio::new(1, 2), Ratio::new(0, 1), Ratio::new(1, 6)]);
    }

    #[test]
    fn alternating_group_a5() {
        let d = densities_from_group(5, &[perm(&[2, 3, 1, 4, 5]), perm(&[2, 3, 4, 5, 1])]).unwrap();
        let exact = d.exact().unwrap();
        assert_eq!(exact[1], Ratio::new(1, 4));
        assert_eq!(exact[2], Ratio::new(1, 3));
        assert_eq!(exact[5], Ratio::new(1, 60));
        assert_eq!(exact[0], Ratio::new(2, 5));
        assert_eq!(d.support(), [1, 2, 5]);
    }

    #[test]
    fn trivial_group_on_one_point() {
        let d = densities_from_group(1, &[]).unwrap();
        assert_eq!(d.exact().unwrap(), [Ratio::new(0, 1), Ratio::new(1, 1)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(densities_from_group(3, &[perm(&[2, 1, 3])]), Err(Error::IntransitiveGroup));
        assert!(Permutation::from_one_line(&[1, 1, 2]).is_err());
        assert!(Permutation::from_one_line(&[0, 1]).is_err());
        // S_10 has 3628800 elements
        let s10 = [perm(&[2, 1, 3, 4, 5, 6, 7, 8, 9, 10]), perm(&[2, 3, 4, 5, 6, 7, 8, 9, 10, 1])];
        assert_eq!(densities_from_group(10, &s10), Err(Error::GroupTooLarge { limit: GROUP_LIMIT }));
    }

    #[test]
    fn normal_extension_has_mass_at_m() {
        // cyclic group of order 4 acting regularly
        let d = densities_from_group(4, &[perm(&[2, 3, 4, 1])]).unwrap();
        let exact = d.exact().unwrap();
        assert_eq!(exact[4], Ratio::new(1, 4));
        assert_eq!(exact[0], Ratio::new(3, 4));
    }
}
