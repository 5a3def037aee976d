//! Resonator sets, the resonance cosine sum and the Ω-exponents.
//!
//! Two scales named `α` appear. The resonator window is
//! `n ∈ [C1^{mk} α, 2^{mk} α]` (`alpha_n_scale`, stored in
//! [`ResonatorConfig::alpha`]); the frequencies `λ_n = 2πmk (n/D^k)^{1/mk}` of
//! those `n` fill `[C1 α_λ, 2 α_λ]` with `α_λ = 2πmk (α/D^k)^{1/mk}`
//! ([`ResonatorConfig::alpha_lambda_scale`]).
//!
//! Linear independence of the `λ_n` over `Q` is not checked: they are the
//! `mk`-th roots of distinct squarefree integers up to a common factor.

mod exponents;
mod search;

pub use exponents::*;
pub use search::*;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::numberfield::{DensityVector, NumberFieldSpec};
use crate::primes::primes_up_to;
use crate::{Error, Result};

/// `(A1, A2, A3, A4)` used in the proof of the main theorem.
pub const DEFAULT_A: [f64; 4] = [8.0 / 5.0, 3.0 / 2.0, 1.0, 9.0 / 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ResonatorConfig {
    pub k: u32,
    pub c1: f64,
    /// Size parameter of the resonator window in `n`.
    pub alpha: f64,
    /// `μ_ν` indexed by `ν = 0..=m`; entries outside `I` are ignored.
    pub mu: Vec<f64>,
    /// `A1, A2, A3, A4`.
    pub a: [f64; 4],
    pub x_big: f64,
    pub theta: f64,
}

impl ResonatorConfig {
    /// Defaults: `C1 = 1`, [`DEFAULT_A`], `μ` from [`default_mu`] and
    /// `θ = (kr₁-3)π/4`.
    pub fn new(spec: &NumberFieldSpec, densities: &DensityVector, k: u32, x_big: f64, alpha: f64) -> Result<Self> {
        let cfg = Self {
            k,
            c1: 1.0,
            alpha,
            mu: default_mu(densities, k),
            a: DEFAULT_A,
            x_big,
            theta: (k as f64 * spec.r1() as f64 - 3.0) * PI / 4.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        if !(self.c1 > 0.0 && self.c1 < 2.0) {
            return Err(Error::InvalidParameter("C1 must lie in (0, 2)".into()));
        }
        let [a1, a2, a3, a4] = self.a;
        if !(0.0 < a4 && a4 < a3 && a3 < a2 && a2 < a1) {
            return Err(Error::InvalidParameter("need 0 < A4 < A3 < A2 < A1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter("alpha must be positive".into()));
        }
        if !(self.x_big >= 1.0 && self.x_big.is_finite()) {
            return Err(Error::InvalidParameter("X must be at least 1".into()));
        }
        if self.mu.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            return Err(Error::InvalidParameter("mu_nu must be non-negative".into()));
        }
        Ok(())
    }

    pub fn mk(&self, spec: &NumberFieldSpec) -> u32 {
        spec.degree() as u32 * self.k
    }

    /// `α_λ = 2πmk (α/D^k)^{1/mk}`.
    pub fn alpha_lambda_scale(&self, spec: &NumberFieldSpec) -> f64 {
        let mk = self.mk(spec) as f64;
        let d_k = libm::pow(spec.discriminant() as f64, self.k as f64);
        2.0 * PI * mk * libm::pow(self.alpha / d_k, 1.0 / mk)
    }

    /// `[C1^{mk} α, 2^{mk} α]`.
    pub fn window(&self, spec: &NumberFieldSpec) -> (f64, f64) {
        let mk = self.mk(spec) as f64;
        (libm::pow(self.c1, mk) * self.alpha, libm::pow(2.0, mk) * self.alpha)
    }

    /// `⌊μ_ν log log α⌋` for each `ν ∈ I`, zero elsewhere.
    pub fn prime_counts(&self, densities: &DensityVector) -> Result<Vec<u32>> {
        let ll = libm::log(libm::log(self.alpha));
        let mut counts = vec![0u32; densities.degree() + 1];
        for nu in densities.support() {
            let mu = self.mu.get(nu).copied().unwrap_or(0.0);
            if mu <= 0.0 {
                return Err(Error::InvalidParameter("mu_nu must be positive on I".into()));
            }
            let c = libm::floor(mu * ll);
            if !(c >= 0.0) {
                return Err(Error::InvalidParameter("floor(mu_nu log log alpha) is negative; alpha must be at least e".into()));
            }
            counts[nu] = c as u32;
        }
        Ok(counts)
    }
}

/// `μ_ν = δ_ν (kν)^{2mk/(mk+1)}`.
pub fn default_mu(densities: &DensityVector, k: u32) -> Vec<f64> {
    let m = densities.degree() as f64;
    let mk = m * k as f64;
    weighted_mu(densities, k as f64, 2.0 * mk / (mk + 1.0))
}

/// `μ_ν = δ_ν (mν)^{2mk/(mk+1)}`, as printed in the construction.
pub fn printed_mu(densities: &DensityVector, k: u32) -> Vec<f64> {
    let m = densities.degree() as f64;
    let mk = m * k as f64;
    weighted_mu(densities, m, 2.0 * mk / (mk + 1.0))
}

fn weighted_mu(densities: &DensityVector, scale: f64, exp: f64) -> Vec<f64> {
    densities
        .deltas()
        .iter()
        .enumerate()
        .map(|(nu, &d)| if nu == 0 || d == 0.0 { 0.0 } else { d * libm::pow(scale * nu as f64, exp) })
        .collect()
}

/// Rational primes up to `bound` grouped by `ν`, the number of degree-one
/// primes above them. Ramified primes and primes without a known splitting
/// type are left out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePools {
    bound: u64,
    by_nu: Vec<Vec<u64>>,
}

impl PrimePools {
    pub fn new(spec: &NumberFieldSpec, bound: u64) -> Self {
        let mut by_nu = vec![Vec::new(); spec.degree() + 1];
        for p in primes_up_to(bound) {
            if let Ok(s) = spec.splitting_type(p) {
                if !s.ramified {
                    by_nu[s.nu].push(p);
                }
            }
        }
        Self { bound, by_nu }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn pool(&self, nu: usize) -> &[u64] {
        self.by_nu.get(nu).map_or(&[], |v| v.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonatorSet {
    pub members: Vec<u64>,
    /// Prime factors of each member, ascending.
    pub factorizations: Vec<Vec<u64>>,
    /// Number of prime factors drawn from each `P_ν`.
    pub counts: Vec<u32>,
    pub window: (f64, f64),
}

impl ResonatorSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

struct Dfs<'a> {
    slots: Vec<(&'a [u64], u32)>,
    min_tail: Vec<f64>,
    lo: f64,
    hi: f64,
    stack: Vec<u64>,
    out: Vec<(u64, Vec<u64>)>,
}

impl Dfs<'_> {
    fn run(&mut self, slot: usize, start: usize, left: u32, product: u64) {
        if slot == self.slots.len() {
            if product as f64 >= self.lo && product as f64 <= self.hi {
                let mut f = self.stack.clone();
                f.sort_unstable();
                self.out.push((product, f));
            }
            return;
        }
        if left == 0 {
            let next = self.slots.get(slot + 1).map_or(0, |s| s.1);
            self.run(slot + 1, 0, next, product);
            return;
        }
        let pool = self.slots[slot].0;
        let rest = self.min_tail[slot + 1];
        for i in start..pool.len() {
            if i + left as usize > pool.len() {
                break;
            }
            let p = pool[i];
            if product as f64 * libm::pow(p as f64, left as f64) * rest > self.hi {
                break;
            }
            self.stack.push(p);
            self.run(slot, i + 1, left - 1, product * p);
            self.stack.pop();
        }
    }
}

/// All squarefree `n` in the window with exactly `⌊μ_ν log log α⌋` prime
/// factors from each `P_ν`, `ν ∈ I`, and no other prime factors.
pub fn build_resonator(
    spec: &NumberFieldSpec,
    densities: &DensityVector,
    cfg: &ResonatorConfig,
    pools: &PrimePools,
) -> Result<ResonatorSet> {
    cfg.validate()?;
    if densities.degree() != spec.degree() {
        return Err(Error::InvalidParameter("density vector degree differs from the field degree".into()));
    }
    let window = cfg.window(spec);
    if (pools.bound() as f64) < window.1 {
        return Err(Error::PoolTooSmall { bound: pools.bound(), needed: window.1 });
    }
    let counts = cfg.prime_counts(densities)?;
    let slots: Vec<(&[u64], u32)> =
        densities.support().into_iter().filter(|&nu| counts[nu] > 0).map(|nu| (pools.pool(nu), counts[nu])).collect();
    let mut min_tail = vec![1.0; slots.len() + 1];
    for s in (0..slots.len()).rev() {
        let (pool, c) = slots[s];
        let smallest = if pool.len() < c as usize {
            f64::INFINITY
        } else {
            pool[..c as usize].iter().map(|&p| p as f64).product()
        };
        min_tail[s] = min_tail[s + 1] * smallest;
    }
    let first = slots.first().map_or(0, |s| s.1);
    let mut dfs = Dfs { slots, min_tail, lo: window.0, hi: window.1, stack: Vec::new(), out: Vec::new() };
    dfs.run(0, 0, first, 1);
    let mut out = dfs.out;
    out.sort_unstable_by_key(|e| e.0);
    let (members, factorizations) = out.into_iter().unzip();
    Ok(ResonatorSet { members, factorizations, counts, window })
}

/// `κ = -1 + Σ_{ν∈I} μ_ν (1 + log δ_ν - log μ_ν)`.
pub fn kappa(densities: &DensityVector, mu: &[f64]) -> Result<f64> {
    let mut acc = -1.0;
    for nu in densities.support() {
        let m = mu.get(nu).copied().unwrap_or(0.0);
        if m <= 0.0 {
            return Err(Error::InvalidParameter("mu_nu must be positive on I".into()));
        }
        acc += m * (1.0 + libm::log(densities.delta(nu)) - libm::log(m));
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaChoice {
    pub alpha: f64,
    pub kappa: f64,
    /// `μ = R/2`.
    pub mu: f64,
}

/// `α = C(k) log X (log log X)^{-κ} (log log log X)^{R/2}`.
pub fn choose_alpha(x_big: f64, densities: &DensityVector, mu: &[f64], c_k: f64) -> Result<AlphaChoice> {
    let l1 = libm::log(x_big);
    let l2 = libm::log(l1);
    let l3 = libm::log(l2);
    if !(l3 > 0.0) {
        return Err(Error::XTooSmall(x_big));
    }
    if !(c_k > 0.0) {
        return Err(Error::InvalidParameter("C(k) must be positive".into()));
    }
    let kappa = kappa(densities, mu)?;
    let half_r = densities.r() as f64 / 2.0;
    Ok(AlphaChoice { alpha: c_k * l1 * libm::pow(l2, -kappa) * libm::pow(l3, half_r), kappa, mu: half_r })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub c_k: f64,
    pub choice: AlphaChoice,
    pub resonator: ResonatorSet,
    /// `round(log X)`, the size aimed for.
    pub target: usize,
}

/// Picks `C(k)` so that `|M|` is about `log X`: bisection in `log α` for the
/// smallest `α` (at resolution `1e-9`) whose resonator has at least
/// `round(log X)` members, searched over `e <= α <= pools.bound() / 2^{mk}`.
pub fn calibrate_alpha(
    spec: &NumberFieldSpec,
    densities: &DensityVector,
    template: &ResonatorConfig,
    pools: &PrimePools,
) -> Result<Calibration> {
    let unit = choose_alpha(template.x_big, densities, &template.mu, 1.0)?;
    let target = libm::round(libm::log(template.x_big)).max(1.0) as usize;
    let mk = template.mk(spec) as f64;
    let a_max = pools.bound() as f64 / libm::pow(2.0, mk);
    let a_min = core::f64::consts::E;
    if a_max < a_min {
        return Err(Error::PoolTooSmall { bound: pools.bound(), needed: libm::pow(2.0, mk) * a_min });
    }
    let build = |alpha: f64| {
        let cfg = ResonatorConfig { alpha, ..template.clone() };
        build_resonator(spec, densities, &cfg, pools)
    };
    let (mut lo, mut hi) = (libm::log(a_min), libm::log(a_max));
    let mut best = build(libm::exp(hi))?;
    if best.len() >= target {
        let low = build(a_min)?;
        if low.len() >= target {
            hi = lo;
            best = low;
        } else {
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                let set = build(libm::exp(mid))?;
                if set.len() >= target {
                    hi = mid;
                    best = set;
                } else {
                    lo = mid;
                }
            }
        }
    }
    let alpha = libm::exp(hi);
    let c_k = alpha / unit.alpha;
    Ok(Calibration { c_k, choice: AlphaChoice { alpha, ..unit }, resonator: best, target })
}
