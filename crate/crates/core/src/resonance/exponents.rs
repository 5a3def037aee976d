use num_rational::Ratio;

use crate::numberfield::DensityVector;
use crate::{Error, Result};

use super::{default_mu, kappa};

/// Sign information carried by the Ω-result, from `k r₁ mod 8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    OmegaPlus,
    OmegaMinus,
    Omega,
}

impl SignClass {
    pub fn from_kr1(kr1: u64) -> Self {
        match kr1 % 8 {
            3 => Self::OmegaPlus,
            7 => Self::OmegaMinus,
            _ => Self::Omega,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::OmegaPlus => "omega_plus",
            Self::OmegaMinus => "omega_minus",
            Self::Omega => "omega_unsigned",
        }
    }
}

/// Exponents of `log log x` and `log log log x` in the Ω-bound, with the
/// earlier exponents for comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaExponents {
    pub m: usize,
    pub k: u32,
    /// `(mk+1)/(2mk) (Σ δ_ν (kν)^{2mk/(mk+1)} - 1)`.
    pub beta: f64,
    /// `-(mk+1) R / (4mk)`.
    pub gamma: f64,
    pub gamma_exact: Ratio<i64>,
    /// `κ` for the default `μ_ν`.
    pub kappa: f64,
    /// `R/2`.
    pub mu_half_r: f64,
    pub beta_gkmn: f64,
    /// `-(mk+1) R/(4mk) - (mk-1)/(2mk)`.
    pub gamma_gkmn: f64,
    pub gamma_gkmn_exact: Ratio<i64>,
    /// `(mk-1)/(2mk) ((Σ δ_ν ν log ν) k + k log k - k + 1) + k - 1`.
    pub beta_hafner: f64,
    pub sign_class: SignClass,
}

pub fn exponents(m: usize, k: u32, r1: usize, densities: &DensityVector) -> Result<OmegaExponents> {
    if densities.degree() != m {
        return Err(Error::InvalidParameter("density vector degree differs from m".into()));
    }
    let mk_int = m as i64 * k as i64;
    if mk_int < 2 {
        return Err(Error::HypothesisViolated("mk >= 2 is required".into()));
    }
    let mk = mk_int as f64;
    let kf = k as f64;
    let s = 2.0 * mk / (mk + 1.0);
    let support = densities.support();
    let weighted: f64 = support.iter().map(|&nu| densities.delta(nu) * libm::pow(kf * nu as f64, s)).sum();
    let beta = (weighted - 1.0) / s;
    let r = support.len() as i64;
    let gamma_exact = Ratio::new(-(mk_int + 1) * r, 4 * mk_int);
    let gamma_gkmn_exact = gamma_exact - Ratio::new(mk_int - 1, 2 * mk_int);
    let to_f = |q: Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;
    let nu_log_nu: f64 = support.iter().map(|&nu| densities.delta(nu) * nu as f64 * libm::log(nu as f64)).sum();
    let beta_hafner = (mk - 1.0) / (2.0 * mk) * (nu_log_nu * kf + kf * libm::log(kf) - kf + 1.0) + kf - 1.0;
    Ok(OmegaExponents {
        m,
        k,
        beta,
        gamma: to_f(gamma_exact),
        gamma_exact,
        kappa: kappa(densities, &default_mu(densities, k))?,
        mu_half_r: r as f64 / 2.0,
        beta_gkmn: beta,
        gamma_gkmn: to_f(gamma_gkmn_exact),
        gamma_gkmn_exact,
        beta_hafner,
        sign_class: SignClass::from_kr1(k as u64 * r1 as u64),
    })
}

/// `(3/4)(2^{4/3} - 1)`: the exponent for the classical divisor problem.
pub fn divisor_problem_beta() -> f64 {
    0.75 * (libm::pow(2.0, 4.0 / 3.0) - 1.0)
}

/// Closed form of `β` for a normal extension of degree `m`:
/// `k(mk+1)(mk)^{-2/(mk+1)}/2 - 1/2 - 1/(2mk)`.
pub fn normal_extension_beta(m: u32, k: u32) -> f64 {
    let mk = (m * k) as f64;
    0.5 * k as f64 * (mk + 1.0) * libm::pow(mk, -2.0 / (mk + 1.0)) - 0.5 - 0.5 / mk
}

/// `-1/4 - 1/(4mk)`, the `γ` of a normal extension.
pub fn normal_extension_gamma(m: u32, k: u32) -> f64 {
    -0.25 - 0.25 / (m * k) as f64
}

/// Closed form of `β` for a non-normal cubic field:
/// `((3k+1)/12) k^{(3k-1)/(3k+1)} (3^{(3k-1)/(3k+1)} + 1) - 1/2 - 1/(6k)`.
pub fn cubic_nonnormal_beta(k: u32) -> f64 {
    let k = k as f64;
    let e = (3.0 * k - 1.0) / (3.0 * k + 1.0);
    (3.0 * k + 1.0) / 12.0 * libm::pow(k, e) * (libm::pow(3.0, e) + 1.0) - 0.5 - 1.0 / (6.0 * k)
}

/// `-1/2 - 1/(6k)`.
pub fn cubic_nonnormal_gamma(k: u32) -> f64 {
    -0.5 - 1.0 / (6.0 * k as f64)
}

/// The closed form stated for a quintic field with group `A5`:
/// `((5k+1)/600) k^{(5k-1)/(5k+1)} (15 + 5·2^{(15k+1)/(5k+1)} + 5^{10k/(5k+1)}) - 1/2 - 1/(10k)`.
///
/// Its middle term is half of what `β` gives for `δ₁ = 1/4, δ₂ = 1/3, δ₅ = 1/60`
/// (`20·2^{10k/(5k+1)}` in place of `5·2^{(15k+1)/(5k+1)}`), so it falls short of
/// [`exponents`]`.beta`. Both are reported.
pub fn quintic_a5_beta_stated(k: u32) -> f64 {
    let k = k as f64;
    let q = 5.0 * k + 1.0;
    q / 600.0
        * libm::pow(k, (5.0 * k - 1.0) / q)
        * (15.0 + 5.0 * libm::pow(2.0, (15.0 * k + 1.0) / q) + libm::pow(5.0, 10.0 * k / q))
        - 0.5
        - 0.1 / k
}

/// `-3/4 - 3/(20k)`.
pub fn quintic_a5_gamma(k: u32) -> f64 {
    -0.75 - 0.15 / k as f64
}
