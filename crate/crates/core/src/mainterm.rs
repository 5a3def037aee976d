//! Laurent data of `ζ_K` at `s = 1`, the residue main term and `Δ_K^(k)(x)`.
//!
//! `ζ_K(s)` for `s` slightly above 1 is the partial sum over the sieved
//! coefficients plus the Abel-summation tail `ρ̂ N^{1-s} / (s - 1)`, where
//! `ρ̂ = D_K(N) / N` estimates the residue. The Laurent coefficients come
//! from polynomial extrapolation of `g(s) = (s - 1) ζ_K(s)` sampled at
//! `s = 1 + h 2^{-i}`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::divisor::DivisorTable;
use crate::numberfield::NumberFieldSpec;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Smallest table accepted for `ζ_K` evaluation near `s = 1`.
pub const MIN_ZETA_RANGE: u64 = 10_000;

/// `ζ_K(s)` with an estimate of the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// `ζ_K(s) = c[0]/(s-1) + c[1] + c[2](s-1) + ...`
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentExpansion {
    pub field_label: String,
    pub c: Vec<f64>,
    pub est_error: Vec<f64>,
}

impl LaurentExpansion {
    /// Number of coefficients.
    pub fn order(&self) -> usize {
        self.c.len()
    }

    /// The residue `ρ_K = c[0]`.
    pub fn residue(&self) -> f64 {
        self.c[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentOptions {
    /// largest node offset `h` in `s = 1 + h 2^{-i}`
    pub base_step: f64,
    /// number of nodes
    pub levels: usize,
    /// relative tolerance on each coefficient's error estimate
    pub tolerance: f64,
}

impl Default for LaurentOptions {
    fn default() -> Self {
        Self { base_step: 1.0 / 16.0, levels: 6, tolerance: 1e-2 }
    }
}

fn check_zeta_table(table: &DivisorTable) -> Result<()> {
    if table.k() != 1 {
        return Err(Error::InvalidParameter("zeta evaluation needs a k = 1 table".into()));
    }
    if table.len() < MIN_ZETA_RANGE {
        return Err(Error::InsufficientRange(alloc::format!(
            "table has {} entries, at least {MIN_ZETA_RANGE} needed",
            table.len()
        )));
    }
    Ok(())
}

struct PartialSum {
    /// `Σ_{n<=N} a(n) n^{-s}`
    value: f64,
    /// `Σ |terms|`, for rounding estimates
    magnitude: f64,
}

fn partial_sum(table: &DivisorTable, s: f64) -> PartialSum {
    let mut acc = CompensatedSum::new();
    for (i, a) in table.values().enumerate() {
        if a != 0 {
            let n = (i + 1) as f64;
            acc.add(a as f64 * libm::exp(-s * libm::log(n)));
        }
    }
    let value = acc.value();
    PartialSum { value, magnitude: value }
}

/// `(s - 1) ζ_K(s)` and a rounding-scale estimate of its absolute error.
fn g_value(table: &DivisorTable, s: f64) -> (f64, f64) {
    let n = table.len() as f64;
    let rho = table.summatory_at(table.len()) as f64 / n;
    let ps = partial_sum(table, s);
    let tail = rho * libm::exp((1.0 - s) * libm::log(n));
    let g = (s - 1.0) * ps.value + tail;
    let rounding = 16.0 * f64::EPSILON * ((s - 1.0) * ps.magnitude + tail + libm::sqrt(n) * (s - 1.0));
    (g, rounding)
}

/// `ζ_K(s)` for `1 < s <= 2` from a `k = 1` table.
///
/// The error bound is `N^{θ - s}` with the trivial error-term exponent `θ = 1 - 1/m`.
pub fn zeta_k_near_1(spec: &NumberFieldSpec, table: &DivisorTable, s: f64) -> Result<ZetaEstimate> {
    check_zeta_table(table)?;
    if !(s > 1.0 && s <= 2.0) {
        return Err(Error::InvalidParameter("s must lie in (1, 2]".into()));
    }
    let (g, _) = g_value(table, s);
    let theta = 1.0 - 1.0 / spec.degree() as f64;
    let n = table.len() as f64;
    Ok(ZetaEstimate { value: g / (s - 1.0), error_bound: libm::pow(n, theta - s) })
}

/// Monomial coefficients of the polynomial interpolating `(x_i, y_i)`.
fn interpolate(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // Newton divided differences
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // expand the Newton form from the innermost coefficient outwards
    let mut poly = vec![0.0; n];
    poly[0] = dd[n - 1];
    let mut len = 1;
    for i in (0..n - 1).rev() {
        // poly <- poly * (x - xs[i]) + dd[i]
        for j in (0..=len).rev() {
            let shifted = if j > 0 { poly[j - 1] } else { 0.0 };
            let here = if j < len { poly[j] } else { 0.0 };
            poly[j] = shifted - xs[i] * here;
        }
        len += 1;
        poly[0] += dd[i];
    }
    poly
}

/// First `order` Laurent coefficients of `ζ_K` at `s = 1`.
pub fn laurent_coeffs(table: &DivisorTable, order: usize, opts: LaurentOptions) -> Result<LaurentExpansion> {
    check_zeta_table(table)?;
    if order == 0 || order > 4 {
        return Err(Error::InvalidParameter("order must lie in 1..=4".into()));
    }
    if opts.levels < order + 2 || !(opts.base_step > 0.0 && opts.base_step <= 0.5) {
        return Err(Error::InvalidParameter("need base_step in (0, 1/2] and at least order + 2 levels".into()));
    }
    let nodes: Vec<f64> = (0..opts.levels).map(|i| opts.base_step / (1u64 << i) as f64).collect();
    let (gs, noise): (Vec<f64>, Vec<f64>) = nodes.iter().map(|t| g_value(table, 1.0 + t)).unzip();

    let full = interpolate(&nodes, &gs);
    let fine = interpolate(&nodes[1..], &gs[1..]);

    // sensitivity of each coefficient to rounding in the samples
    let mut rounding = vec![0.0; order];
    for (i, &eps) in noise.iter().enumerate() {
        let mut unit = vec![0.0; nodes.len()];
        unit[i] = 1.0;
        let w = interpolate(&nodes, &unit);
        for j in 0..order {
            rounding[j] += libm::fabs(w[j]) * eps;
        }
    }

    // Truncating at N biases g by roughly the drift of D(N')/N' near N'= N;
    // the bias enters c[j] through the j-th t-derivative of t N^{-t}.
    let n = table.len();
    let rho_at = |m: u64| table.summatory_at(m) as f64 / m as f64;
    let drift = [n / 2, 3 * n / 4].iter().map(|&m| libm::fabs(rho_at(m) - rho_at(n))).fold(0.0, f64::max);
    let tail_scale = drift + 1.0 / n as f64;
    let log_n = libm::log(n as f64);
    let truncation = |j: usize| -> f64 {
        if j == 0 {
            tail_scale
        } else {
            let fact: f64 = (1..j).map(|i| i as f64).product();
            tail_scale * libm::pow(log_n, (j - 1) as f64) / fact
        }
    };

    let c: Vec<f64> = full[..order].to_vec();
    let est_error: Vec<f64> =
        (0..order).map(|j| libm::fabs(full[j] - fine[j]) + rounding[j] + truncation(j)).collect();
    for (j, (&cj, &err)) in c.iter().zip(&est_error).enumerate() {
        if err > opts.tolerance * libm::fmax(1.0, libm::fabs(cj)) {
            return Err(Error::ExtrapolationUnstable { index: j, estimate: err });
        }
    }
    Ok(LaurentExpansion { field_label: table.field_label().to_string(), c, est_error })
}

/// Residue of `ζ_K` at 1 from the class number formula
/// `2^{r1} (2π)^{r2} h R / (w √D)`.
pub fn residue_from_class_number(r1: usize, r2: usize, class_number: u64, regulator: f64, roots_of_unity: u64, disc: u64) -> f64 {
    libm::pow(2.0, r1 as f64) * libm::pow(2.0 * PI, r2 as f64) * class_number as f64 * regulator
        / (roots_of_unity as f64 * libm::sqrt(disc as f64))
}

/// `Res_{w=1} ζ_K(w)^k x^w / w = x Σ_j coeffs[j] (log x)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MainTermPoly {
    pub k: u32,
    pub coeffs: Vec<f64>,
}

impl MainTermPoly {
    pub fn eval(&self, x: f64) -> f64 {
        let l = libm::log(x);
        x * self.coeffs.iter().rev().fold(0.0, |acc, &b| acc * l + b)
    }
}

/// Builds the main-term polynomial from the Laurent series of `ζ_K`.
///
/// With `t = w - 1`, `ζ_K^k = t^{-k} P(t)` and `x^w / w = x e^{t log x} / (1 + t)`,
/// so the residue is `x` times the `t^{k-1}` coefficient of
/// `P(t) e^{t log x} Σ (-t)^i`.
pub fn main_term_poly(laurent: &LaurentExpansion, k: u32) -> Result<MainTermPoly> {
    let k_us = k as usize;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if laurent.order() < k_us {
        return Err(Error::InsufficientOrder { needed: k_us, have: laurent.order() });
    }
    let base = &laurent.c[..k_us];
    let mut power = vec![0.0; k_us];
    power[0] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; k_us];
        for (i, &a) in power.iter().enumerate() {
            for (j, &b) in base.iter().enumerate().take(k_us - i) {
                next[i + j] += a * b;
            }
        }
        power = next;
    }
    let mut coeffs = vec![0.0; k_us];
    let mut factorial = 1.0;
    for (j, coeff) in coeffs.iter_mut().enumerate() {
        if j > 0 {
            factorial *= j as f64;
        }
        let mut acc = 0.0;
        for a in 0..k_us - j {
            let i = k_us - 1 - j - a;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += power[a] * sign;
        }
        *coeff = acc / factorial;
    }
    Ok(MainTermPoly { k, coeffs })
}

pub fn main_term(laurent: &LaurentExpansion, k: u32, x: f64) -> Result<f64> {
    Ok(main_term_poly(laurent, k)?.eval(x))
}

/// `Δ_K^(k)(y) = D_K^(k)(y) - Res_{w=1} ζ_K^k(w) y^w / w`, bound to one table.
#[derive(Debug, Clone, Copy)]
pub struct ErrorTerm<'a> {
    table: &'a DivisorTable,
    main: &'a MainTermPoly,
}

impl<'a> ErrorTerm<'a> {
    pub fn new(table: &'a DivisorTable, main: &'a MainTermPoly) -> Result<Self> {
        if table.k() != main.k {
            return Err(Error::InvalidParameter("table and main term use different k".into()));
        }
        Ok(Self { table, main })
    }

    pub fn table(&self) -> &'a DivisorTable {
        self.table
    }

    pub fn main(&self) -> &'a MainTermPoly {
        self.main
    }

    /// Right-continuous: the sum includes `n = y` at integers.
    pub fn eval(&self, y: f64) -> Result<f64> {
        Ok(self.table.summatory(y)? as f64 - self.main.eval(y))
    }
}

pub fn delta(table: &DivisorTable, main: &MainTermPoly, x: f64) -> Result<f64> {
    ErrorTerm::new(table, main)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn exact(c: &[f64]) -> LaurentExpansion {
        LaurentExpansion { field_label: "test".into(), c: c.to_vec(), est_error: vec![0.0; c.len()] }
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let xs = [0.5, 0.25, 0.125, 0.0625];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 0.5 * x * x + 7.0 * x * x * x).collect();
        let p = interpolate(&xs, &ys);
        for (a, b) in p.iter().zip([3.0, -2.0, 0.5, 7.0]) {
            assert!((a - b).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn main_term_for_rationals() {
        let l = exact(&[1.0, EULER_GAMMA]);
        let p = main_term_poly(&l, 2).unwrap();
        assert!((p.coeffs[1] - 1.0).abs() < 1e-15);
        assert!((p.coeffs[0] - (2.0 * EULER_GAMMA - 1.0)).abs() < 1e-15);
        assert!((main_term(&l, 1, 100.0).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(main_term_poly(&exact(&[1.0]), 2), Err(Error::InsufficientOrder { needed: 2, have: 1 }));
    }

    #[test]
    fn leading_coefficient_identity() {
        let l = exact(&[0.7, -0.3, 0.11, 0.05]);
        for k in 1..=4u32 {
            let p = main_term_poly(&l, k).unwrap();
            let fact: f64 = (1..k).map(f64::from).product();
            let lead = libm::pow(0.7, k as f64) / fact;
            assert!((p.coeffs[k as usize - 1] - lead).abs() < 1e-15 * lead.max(1.0));
        }
    }

    #[test]
    fn third_power_by_hand() {
        // c = (a, b, c): P = a^3 + 3a^2 b t + (3a b^2 + 3a^2 c) t^2
        let (a, b, c) = (0.9, 0.2, -0.1);
        let p = main_term_poly(&exact(&[a, b, c]), 3).unwrap();
        let p0 = a * a * a;
        let p1 = 3.0 * a * a * b;
        let p2 = 3.0 * a * b * b + 3.0 * a * a * c;
        assert!((p.coeffs[2] - p0 / 2.0).abs() < 1e-15);
        assert!((p.coeffs[1] - (p1 - p0)).abs() < 1e-15);
        assert!((p.coeffs[0] - (p2 - p1 + p0)).abs() < 1e-15);
    }

    #[test]
    fn class_number_formula() {
        let rho = residue_from_class_number(0, 1, 1, 1.0, 4, 4);
        assert!((rho - PI / 4.0).abs() < 1e-15);
        assert!((residue_from_class_number(1, 0, 1, 1.0, 2, 1) - 1.0).abs() < 1e-15);
    }
}
