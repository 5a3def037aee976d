//! Arithmetic core for the Piltz divisor problem over number fields.
//!
//! Everything in this crate is a pure function of its inputs and works
//! without `std` (an allocator is required). File formats, configuration and
//! the command-line front end live in the `piltz` crate.
//!
//! The modules follow the computation bottom-up:
//!
//! * [`numberfield`]: defining polynomials, splitting of rational primes
//!   (Dedekind), exact and empirical splitting densities.
//! * [`divisor`]: the coefficients `d_K^(k)(n)` of `ζ_K(s)^k`, sieved
//!   multiplicatively, with brute-force oracles.
//! * [`mainterm`]: the Laurent expansion of `ζ_K` at `s = 1`, the residue
//!   main term and the error term `Δ_K^(k)(x)`.
//! * [`voronoi`]: both sides of the Gaussian-smoothed Voronoi-type identity
//!   and the smoothing inequality.
//! * [`resonance`]: resonator sets, the resonance cosine sum and its maximum
//!   search, and the Ω-exponents.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod divisor;
mod error;
pub mod mainterm;
pub mod numberfield;
pub mod primes;
pub mod resonance;
pub mod sum;
pub mod voronoi;

pub use error::{Error, Result};
