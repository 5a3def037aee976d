//! The Gaussian-smoothed error term and its truncated Voronoi series.
//!
//! With `a = α^{1/mk}` the smoothed error term is
//! `(a/√π) ∫_{|u|<=U} Δ_K^(k)(x^{mk} e^{u/x}) e^{-a²u²} du`.
//! `Δ` is a step function minus a smooth main term. The step part is
//! integrated exactly through `erf`; only the smooth part goes through the
//! trapezoid rule.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::divisor::DivisorTable;
use crate::mainterm::{ErrorTerm, MainTermPoly};
use crate::numberfield::NumberFieldSpec;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Series terms whose Gaussian factor falls below this are dropped by default.
pub const SERIES_CUTOFF: f64 = 1e-10;

/// Number of `h`-values sampled in `[-1, 1]` by [`smoothing_inequality_check`].
pub const INEQUALITY_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    pub x: f64,
    pub alpha: f64,
    /// Integration range `|u| <= u_cutoff`.
    pub u_cutoff: f64,
    pub quad_step: f64,
    pub n_terms: u64,
}

impl SmoothingParams {
    /// Defaults: `U = min(x, 6 mk α^{-1/mk})`, step `α^{-1/mk}/8`, and the
    /// smallest series length whose Gaussian factor is below [`SERIES_CUTOFF`].
    pub fn new(spec: &NumberFieldSpec, k: u32, x: f64, alpha: f64) -> Result<Self> {
        check_xa(x, alpha)?;
        let mk = mk(spec, k)?;
        let inv_a = libm::pow(alpha, -1.0 / mk);
        let d_k = libm::pow(spec.discriminant() as f64, k as f64);
        let n = d_k * alpha * libm::pow(libm::log(1.0 / SERIES_CUTOFF) / (PI * PI), mk / 2.0);
        Ok(Self {
            x,
            alpha,
            u_cutoff: x.min(6.0 * mk * inv_a),
            quad_step: inv_a / 8.0,
            n_terms: libm::ceil(n).max(1.0) as u64,
        })
    }

    pub fn with_n_terms(mut self, n_terms: u64) -> Self {
        self.n_terms = n_terms;
        self
    }

    pub fn with_u_cutoff(mut self, u_cutoff: f64) -> Self {
        self.u_cutoff = u_cutoff;
        self
    }

    pub fn with_quad_step(mut self, quad_step: f64) -> Self {
        self.quad_step = quad_step;
        self
    }

    fn validate(&self, mk: f64) -> Result<()> {
        check_xa(self.x, self.alpha)?;
        if !(self.u_cutoff > 0.0 && self.u_cutoff <= self.x) {
            return Err(Error::InvalidParameter("u_cutoff must lie in (0, x]".into()));
        }
        if self.n_terms == 0 {
            return Err(Error::InvalidParameter("n_terms must be positive".into()));
        }
        let max = libm::pow(self.alpha, -1.0 / mk) / 8.0;
        if !(self.quad_step > 0.0) || self.quad_step > max {
            return Err(Error::StepTooCoarse { step: self.quad_step, max });
        }
        Ok(())
    }
}

fn check_xa(x: f64, alpha: f64) -> Result<()> {
    if !(x >= 2.0 && x.is_finite()) {
        return Err(Error::InvalidParameter("x must be a finite real >= 2".into()));
    }
    if !(alpha >= 2.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter("alpha must be a finite real >= 2".into()));
    }
    Ok(())
}

fn mk(spec: &NumberFieldSpec, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    Ok((spec.degree() as u64 * k as u64) as f64)
}

/// Gaussian weight mass `(a/√π) ∫_{|u|<=U} e^{-a²u²} du = erf(aU)`.
pub fn gaussian_mass(spec: &NumberFieldSpec, k: u32, params: &SmoothingParams) -> Result<f64> {
    let a = libm::pow(params.alpha, 1.0 / mk(spec, k)?);
    Ok(libm::erf(a * params.u_cutoff))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedValue {
    pub value: f64,
    /// Step-halving difference of the trapezoid part plus rounding.
    pub quad_error: f64,
}

/// `(a/√π) ∫_{t}^{U} e^{-a²u²} du` for `t >= -U`, without cancellation.
fn upper_mass(a: f64, t: f64, u: f64) -> f64 {
    if t >= 0.0 {
        0.5 * (libm::erfc(a * t) - libm::erfc(a * u))
    } else {
        0.5 * (libm::erf(a * u) + libm::erf(-a * t))
    }
}

/// The smoothed error term on the left of the Voronoi identity.
pub fn smoothed_lhs(
    spec: &NumberFieldSpec,
    table: &DivisorTable,
    main: &MainTermPoly,
    params: &SmoothingParams,
) -> Result<SmoothedValue> {
    let delta = ErrorTerm::new(table, main)?;
    let k = table.k();
    let mk = mk(spec, k)?;
    params.validate(mk)?;
    let (x, u_max) = (params.x, params.u_cutoff);
    let a = libm::pow(params.alpha, 1.0 / mk);
    let y0 = libm::pow(x, mk);
    let y_hi = y0 * libm::exp(u_max / x);
    if y_hi >= (table.len() + 1) as f64 {
        return Err(Error::RangeExceeded { requested: y_hi, available: table.len() });
    }
    let y_lo = y0 * libm::exp(-u_max / x);

    // Every n contributes d(n) times the weight mass where x^{mk} e^{u/x} >= n.
    let n_lo = delta.table().summatory(y_lo)?;
    let mut steps = CompensatedSum::new();
    steps.add(n_lo as f64 * libm::erf(a * u_max));
    let first = libm::floor(y_lo) as u64 + 1;
    let last = libm::floor(y_hi) as u64;
    let mut jumps = 0u64;
    for n in first.max(1)..=last {
        let d = table.value(n);
        if d == 0 {
            continue;
        }
        let t = (x * libm::log(n as f64 / y0)).max(-u_max);
        steps.add(d as f64 * upper_mass(a, t, u_max));
        jumps += 1;
    }

    let weight = |u: f64| a / libm::sqrt(PI) * libm::exp(-a * a * u * u);
    let smooth = |u: f64| weight(u) * main.eval(y0 * libm::exp(u / x));
    let intervals = libm::ceil(2.0 * u_max / params.quad_step).max(2.0) as usize;
    let h = 2.0 * u_max / intervals as f64;
    let mut coarse = CompensatedSum::new();
    let mut mid = CompensatedSum::new();
    for i in 0..=intervals {
        let v = smooth(-u_max + i as f64 * h);
        coarse.add(if i == 0 || i == intervals { 0.5 * v } else { v });
    }
    for i in 0..intervals {
        mid.add(smooth(-u_max + (i as f64 + 0.5) * h));
    }
    let t_h = coarse.value() * h;
    let t_half = 0.5 * (t_h + mid.value() * h);

    let value = steps.value() - t_half;
    let rounding = f64::EPSILON * libm::sqrt((jumps + intervals as u64) as f64) * (steps.value().abs() + t_half.abs());
    Ok(SmoothedValue { value, quad_error: libm::fabs(t_half - t_h) + rounding })
}

/// Constants of one evaluation of the truncated series.
#[derive(Debug, Clone, Copy)]
struct Series {
    prefactor: f64,
    exponent: f64,
    gauss: f64,
    freq: f64,
    phase: f64,
    two_over_mk: f64,
    inv_mk: f64,
    x: f64,
}

impl Series {
    fn new(spec: &NumberFieldSpec, k: u32, params: &SmoothingParams) -> Result<Self> {
        let mk = mk(spec, k)?;
        let m = spec.degree() as f64;
        let d = spec.discriminant() as f64;
        let d_k = libm::pow(d, k as f64);
        let x = params.x;
        Ok(Self {
            prefactor: libm::pow(d, 1.0 / (2.0 * m)) / (PI * libm::sqrt(mk)) * libm::pow(x, (mk - 1.0) / 2.0),
            exponent: -(mk + 1.0) / (2.0 * mk),
            gauss: PI * PI / libm::pow(d_k * params.alpha, 2.0 / mk),
            freq: 2.0 * PI * mk / libm::pow(d_k, 1.0 / mk),
            phase: (k as f64 * spec.r1() as f64 - 3.0) * PI / 4.0,
            two_over_mk: 2.0 / mk,
            inv_mk: 1.0 / mk,
            x,
        })
    }

    /// Term without `d(n)` and without the prefactor.
    fn kernel(&self, n: f64) -> (f64, f64) {
        let amp = libm::pow(n, self.exponent) * libm::exp(-self.gauss * libm::pow(n, self.two_over_mk));
        let arg = self.freq * libm::pow(n, self.inv_mk) * self.x + self.phase;
        (amp, arg)
    }
}

/// One term of the truncated series, for tabulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsTerm {
    pub n: u64,
    pub d: u64,
    /// `prefactor · d(n) n^{-(mk+1)/(2mk)} exp(-π²(n/(D^k α))^{2/mk})`.
    pub amplitude: f64,
    /// `2πmk (n/D^k)^{1/mk} x + (kr₁-3)π/4`.
    pub phase: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// `|term|` at `n = n_terms`.
    pub last_term: f64,
    /// Majorant of `Σ_{n > n_terms} |term|`.
    pub tail_bound: f64,
}

fn check_terms(table: &DivisorTable, n_terms: u64) -> Result<()> {
    if n_terms > table.len() {
        return Err(Error::RangeExceeded { requested: n_terms as f64, available: table.len() });
    }
    Ok(())
}

/// Every term of the truncated series, in ascending `n`.
pub fn rhs_terms(spec: &NumberFieldSpec, table: &DivisorTable, params: &SmoothingParams) -> Result<Vec<RhsTerm>> {
    let series = Series::new(spec, table.k(), params)?;
    check_terms(table, params.n_terms)?;
    Ok((1..=params.n_terms)
        .map(|n| {
            let d = table.value(n);
            let (amp, arg) = series.kernel(n as f64);
            let amplitude = series.prefactor * d as f64 * amp;
            RhsTerm { n, d, amplitude, phase: arg, value: amplitude * libm::cos(arg) }
        })
        .collect())
}

/// `(D^{1/2m}/(π√mk)) x^{(mk-1)/2} Σ_{n<=n_terms} d(n) n^{-(mk+1)/(2mk)}
/// exp(-π²(n/(D^k α))^{2/mk}) cos(2πmk (n/D^k)^{1/mk} x + (kr₁-3)π/4)`.
pub fn voronoi_rhs(spec: &NumberFieldSpec, table: &DivisorTable, params: &SmoothingParams) -> Result<SeriesValue> {
    let k = table.k();
    params.validate(mk(spec, k)?)?;
    check_terms(table, params.n_terms)?;
    let series = Series::new(spec, k, params)?;
    let mut acc = CompensatedSum::new();
    let mut last_term = 0.0;
    for n in 1..=params.n_terms {
        let d = table.value(n);
        let (amp, arg) = series.kernel(n as f64);
        let term = d as f64 * amp * libm::cos(arg);
        acc.add(term);
        last_term = libm::fabs(term);
    }
    let tail = tail_majorant(&series, spec.degree() as f64 * k as f64, params.n_terms);
    Ok(SeriesValue {
        value: series.prefactor * acc.value(),
        last_term: series.prefactor * last_term,
        tail_bound: series.prefactor * tail,
    })
}

/// `Σ_{n>N} n^{log₂ mk} |kernel(n)|`, using `d_K^(k)(n) <= d_{mk}(n) <= n^{log₂ mk}`.
fn tail_majorant(series: &Series, mk: f64, n_terms: u64) -> f64 {
    let lift = libm::log2(mk);
    let mut acc = CompensatedSum::new();
    let mut n = n_terms + 1;
    let mut prev = 0.0;
    loop {
        let (amp, _) = series.kernel(n as f64);
        let term = libm::pow(n as f64, lift) * amp;
        acc.add(term);
        if term < prev && term <= 1e-18 * acc.value() || term == 0.0 || n - n_terms > 100_000_000 {
            break;
        }
        prev = term;
        n += 1;
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub lhs: SmoothedValue,
    pub rhs: SeriesValue,
    pub abs_diff: f64,
    /// `x^{mk/2-3/5}`: the `x`-part of the error term.
    pub x_scale: f64,
    /// `x^{mk/2-3/5} α^{1/2}`.
    pub predicted_error_scale: f64,
    /// `x^{mk/2-3/5} α^{2/mk}`.
    pub alternate_error_scale: f64,
}

/// Both sides of the smoothed identity and the size of their difference.
///
/// `lhs_table` must reach `x^{mk} e^{U/x}` and `series_table` must reach `n_terms`;
/// one table covering both may be passed twice.
pub fn voronoi_discrepancy(
    spec: &NumberFieldSpec,
    lhs_table: &DivisorTable,
    series_table: &DivisorTable,
    main: &MainTermPoly,
    params: &SmoothingParams,
) -> Result<Discrepancy> {
    if lhs_table.k() != series_table.k() {
        return Err(Error::InvalidParameter("tables use different k".into()));
    }
    let lhs = smoothed_lhs(spec, lhs_table, main, params)?;
    let rhs = voronoi_rhs(spec, series_table, params)?;
    let mk = mk(spec, lhs_table.k())?;
    let x_scale = libm::pow(params.x, mk / 2.0 - 0.6);
    Ok(Discrepancy {
        lhs,
        rhs,
        abs_diff: libm::fabs(lhs.value - rhs.value),
        x_scale,
        predicted_error_scale: x_scale * libm::sqrt(params.alpha),
        alternate_error_scale: x_scale * libm::pow(params.alpha, 2.0 / mk),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingCheck {
    /// `max Δ(x^{mk} e^h)` over `|h| <= 1`.
    pub max_side: f64,
    pub argmax_h: f64,
    pub integral_side: f64,
    pub tail_allowance: f64,
    pub holds: bool,
}

/// Compares `max_{|h|<=1} Δ(x^{mk} e^h)` with the smoothed integral.
///
/// The maximum is taken over [`INEQUALITY_GRID`] equally spaced `h` together
/// with every jump point in range; since `Δ` decreases between jumps this is
/// the exact supremum. `tail_allowance = slack · x^{mk-1} e^{-x²}`.
pub fn smoothing_inequality_check(
    spec: &NumberFieldSpec,
    table: &DivisorTable,
    main: &MainTermPoly,
    params: &SmoothingParams,
    slack: f64,
) -> Result<SmoothingCheck> {
    let delta = ErrorTerm::new(table, main)?;
    let mk = mk(spec, table.k())?;
    params.validate(mk)?;
    let x = params.x;
    let y0 = libm::pow(x, mk);
    let y_hi = y0 * core::f64::consts::E;
    if y_hi >= (table.len() + 1) as f64 {
        return Err(Error::RangeExceeded { requested: y_hi, available: table.len() });
    }
    let y_lo = y0 / core::f64::consts::E;

    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut consider = |v: f64, h: f64| {
        if v > best.0 {
            best = (v, h);
        }
    };
    for i in 0..INEQUALITY_GRID {
        let h = -1.0 + 2.0 * i as f64 / (INEQUALITY_GRID - 1) as f64;
        consider(delta.eval(y0 * libm::exp(h))?, h);
    }
    let first = libm::ceil(y_lo) as u64;
    for n in first.max(1)..=libm::floor(y_hi) as u64 {
        if table.value(n) > 0 {
            consider(delta.eval(n as f64)?, libm::log(n as f64 / y0));
        }
    }

    let integral_side = smoothed_lhs(spec, table, main, params)?.value;
    let tail_allowance = slack * libm::pow(x, mk - 1.0) * libm::exp(-x * x);
    Ok(SmoothingCheck {
        max_side: best.0,
        argmax_h: best.1,
        integral_side,
        tail_allowance,
        holds: best.0 >= integral_side - tail_allowance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::divisor::sieve_divisors;
    use crate::mainterm::LaurentExpansion;
    use crate::numberfield::parse_field;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn main_q(k: u32) -> MainTermPoly {
        let l = LaurentExpansion { field_label: "Q".into(), c: vec![1.0, EULER_GAMMA], est_error: vec![0.0; 2] };
        crate::mainterm::main_term_poly(&l, k).unwrap()
    }

    #[test]
    fn defaults_respect_invariants() {
        let q = NumberFieldSpec::rationals();
        let p = SmoothingParams::new(&q, 2, 10.0, 4.0).unwrap();
        assert!(p.u_cutoff <= p.x);
        assert!((p.quad_step - 0.5 / 8.0).abs() < 1e-15);
        assert!(gaussian_mass(&q, 2, &p).unwrap() >= 1.0 - 1e-12);
        // exp(-π² n / α) < 1e-10 first at n > α ln(1e10)/π²
        assert_eq!(p.n_terms, libm::ceil(4.0 * libm::log(1e10) / (PI * PI)) as u64);
        assert!(SmoothingParams::new(&q, 2, 1.5, 4.0).is_err());
        let coarse = p.with_quad_step(0.1);
        let t = sieve_divisors(&q, 2, 1000).unwrap();
        assert!(matches!(smoothed_lhs(&q, &t, &main_q(2), &coarse), Err(Error::StepTooCoarse { .. })));
    }

    #[test]
    fn lhs_range_checked() {
        let q = NumberFieldSpec::rationals();
        let t = sieve_divisors(&q, 2, 100).unwrap();
        let p = SmoothingParams::new(&q, 2, 10.0, 4.0).unwrap();
        assert!(matches!(smoothed_lhs(&q, &t, &main_q(2), &p), Err(Error::RangeExceeded { .. })));
    }

    #[test]
    fn rhs_first_term_rationals() {
        let q = NumberFieldSpec::rationals();
        let t = sieve_divisors(&q, 2, 10).unwrap();
        let p = SmoothingParams::new(&q, 2, 3.0, 4.0).unwrap().with_n_terms(1);
        let v = voronoi_rhs(&q, &t, &p).unwrap();
        let want = libm::sqrt(3.0) * libm::exp(-PI * PI / 4.0) * libm::cos(12.0 * PI - PI / 4.0) / (PI * libm::sqrt(2.0));
        assert!((v.value - want).abs() < 1e-15);
        assert!((v.last_term - want.abs()).abs() < 1e-15);
    }

    #[test]
    fn rhs_terms_sum_to_rhs() {
        let qi = parse_field(&[1, 0, 1], None).unwrap();
        let t = sieve_divisors(&qi, 1, 500).unwrap();
        let p = SmoothingParams::new(&qi, 1, 5.0, 9.0).unwrap().with_n_terms(400);
        let terms = rhs_terms(&qi, &t, &p).unwrap();
        let total: f64 = terms.iter().map(|t| t.value).sum();
        let v = voronoi_rhs(&qi, &t, &p).unwrap();
        assert!((total - v.value).abs() < 1e-12);
        assert_eq!(terms[4].d, 2);
    }

    #[test]
    fn inequality_tail_underflows() {
        let q = NumberFieldSpec::rationals();
        let t = sieve_divisors(&q, 1, 200).unwrap();
        let p = SmoothingParams::new(&q, 1, 30.0, 4.0).unwrap();
        let c = smoothing_inequality_check(&q, &t, &main_q(1), &p, 1.0).unwrap();
        assert_eq!(c.tail_allowance, 0.0);
        assert!(c.holds);
    }
}
