//! Field configuration files.
//!
//! ```json
//! {
//!   "label": "Q(i)",
//!   "coeffs": [1, 0, 1],
//!   "D": 4,
//!   "class_number_data": { "h": 1, "regulator": 1.0, "roots_of_unity": 4 },
//!   "galois_generators": [[2, 1]],
//!   "local_splitting": [{ "p": 2, "factors": [[1, 2]] }]
//! }
//! ```
//!
//! `coeffs` lists the monic defining polynomial, leading coefficient first.
//! `D` is needed only when some `p` with `p² | disc f` fails Dedekind's
//! criterion. `local_splitting` gives `[residue_degree, ramification]` pairs for
//! such primes. `galois_generators` are permutations of `1..=m` in one-line
//! notation generating the Galois group acting on the roots.

use std::path::Path;

use piltz_core::mainterm::residue_from_class_number;
use piltz_core::numberfield::{densities_from_group, parse_field, DensityVector, NumberFieldSpec, Permutation, PrimeFactor};
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassNumberData {
    pub h: u64,
    pub regulator: f64,
    pub roots_of_unity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSplitting {
    pub p: u64,
    pub factors: Vec<[u32; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub label: String,
    pub coeffs: Vec<i64>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_number_data: Option<ClassNumberData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub galois_generators: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub local_splitting: Vec<LocalSplitting>,
}

/// A parsed configuration together with the field it defines.
#[derive(Debug, Clone)]
pub struct Field {
    pub config: FieldConfig,
    pub spec: NumberFieldSpec,
}

impl FieldConfig {
    pub fn from_json(text: &str) -> Result<Self, AppError> {
        serde_json::from_str(text).map_err(|e| AppError::Config(format!("field config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates the polynomial and builds the field.
    pub fn build(self) -> Result<Field, AppError> {
        let config_err = |e: piltz_core::Error| AppError::Config(format!("field {}: {e}", self.label));
        let mut spec = parse_field(&self.coeffs, self.d).map_err(config_err)?.with_label(&self.label);
        for local in &self.local_splitting {
            let factors = local.factors.iter().map(|&[f, e]| PrimeFactor::new(f, e)).collect();
            spec = spec.with_local_splitting(local.p, factors).map_err(config_err)?;
        }
        Ok(Field { config: self, spec })
    }
}

impl Field {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        FieldConfig::load(path)?.build()
    }

    pub fn from_json(text: &str) -> Result<Self, AppError> {
        FieldConfig::from_json(text)?.build()
    }

    pub fn label(&self) -> &str {
        &self.config.label
    }

    /// Residue of `ζ_K` at 1 from the class number formula, when the data is given.
    pub fn class_number_residue(&self) -> Option<f64> {
        self.config.class_number_data.as_ref().map(|c| {
            residue_from_class_number(
                self.spec.r1(),
                self.spec.r2(),
                c.h,
                c.regulator,
                c.roots_of_unity,
                self.spec.discriminant(),
            )
        })
    }

    /// Exact densities from the configured Galois generators.
    pub fn exact_densities(&self) -> Result<Option<DensityVector>, AppError> {
        let Some(gens) = &self.config.galois_generators else { return Ok(None) };
        let perms = gens
            .iter()
            .map(|g| Permutation::from_one_line(g))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AppError::Config(format!("galois_generators: {e}")))?;
        densities_from_group(self.spec.degree(), &perms)
            .map(Some)
            .map_err(|e| AppError::Config(format!("galois_generators: {e}")))
    }
}

/// A density file: `{"deltas": [δ_0, δ_1, ..., δ_m]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFile {
    pub deltas: Vec<f64>,
}

impl DensityFile {
    pub fn load(path: &Path) -> Result<DensityVector, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: Self = serde_json::from_str(&text).map_err(|e| AppError::Config(format!("density file: {e}")))?;
        DensityVector::user_supplied(file.deltas).map_err(|e| AppError::Config(format!("density file: {e}")))
    }
}

/// The configurations shipped in `fields/`.
pub mod builtin {
    pub const RATIONALS: &str = include_str!("../fields/q.json");
    pub const GAUSSIAN: &str = include_str!("../fields/qi.json");
    pub const CUBIC_23: &str = include_str!("../fields/cubic23.json");
    pub const QUINTIC: &str = include_str!("../fields/quintic.json");
}
