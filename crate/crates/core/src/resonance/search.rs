use alloc::vec::Vec;
use core::f64::consts::{E, PI};
use core::ops::Range;

use super::{ResonatorConfig, ResonatorSet};
use crate::divisor::DivisorTable;
use crate::numberfield::NumberFieldSpec;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Upper limit on the number of grid points in a search.
pub const GRID_CAP: u64 = 10_000_000;

/// Candidates kept from the grid for local refinement.
pub const POLISH_CANDIDATES: usize = 10;

/// Terms with `f(n)` below this fraction of `Σ f` are skipped while searching.
pub const SEARCH_DROP: f64 = 1e-17;

const BLOCK: usize = 256;

fn shape(spec: &NumberFieldSpec, cfg: &ResonatorConfig) -> (f64, f64, f64) {
    let mk = cfg.mk(spec) as f64;
    let d_k = libm::pow(spec.discriminant() as f64, cfg.k as f64);
    (mk, d_k, libm::pow(cfg.x_big, cfg.a[0]))
}

fn weight(n: u64, d: u64, mk: f64, d_k: f64, alpha: f64) -> f64 {
    let nf = n as f64;
    d as f64 * libm::pow(nf, -(mk + 1.0) / (2.0 * mk)) * libm::exp(-PI * PI * libm::pow(nf / (d_k * alpha), 2.0 / mk))
}

/// `f(n) = d(n) n^{-(mk+1)/(2mk)} exp(-π² (n/(D^k α))^{2/mk})` for `n <= X^{A1}`, else 0.
pub fn resonance_weight(n: u64, spec: &NumberFieldSpec, table: &DivisorTable, cfg: &ResonatorConfig) -> Result<f64> {
    let (mk, d_k, cutoff) = shape(spec, cfg);
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if n as f64 > cutoff {
        return Ok(0.0);
    }
    if n > table.len() {
        return Err(Error::RangeExceeded { requested: n as f64, available: table.len() });
    }
    Ok(weight(n, table.value(n), mk, d_k, cfg.alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub n: u64,
    pub lambda: f64,
    pub f: f64,
}

/// The sum `A(x) = Σ_{n <= X^{A1}} f(n) cos(λ_n x + θ)` with its terms precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSum {
    terms: Vec<Term>,
    search: Vec<Term>,
    theta: f64,
    total: f64,
    x_big: f64,
    a: [f64; 4],
    alpha_n: f64,
    alpha_lambda: f64,
    c1: f64,
}

impl ResonanceSum {
    pub fn new(spec: &NumberFieldSpec, table: &DivisorTable, cfg: &ResonatorConfig) -> Result<Self> {
        cfg.validate()?;
        if table.k() != cfg.k {
            return Err(Error::InvalidParameter("table and resonator use different k".into()));
        }
        let (mk, d_k, cutoff) = shape(spec, cfg);
        let n_max = libm::floor(cutoff) as u64;
        if n_max > table.len() {
            return Err(Error::RangeExceeded { requested: cutoff, available: table.len() });
        }
        let freq = 2.0 * PI * mk / libm::pow(d_k, 1.0 / mk);
        let mut total = CompensatedSum::new();
        let mut terms = Vec::new();
        for n in 1..=n_max {
            let d = table.value(n);
            if d == 0 {
                continue;
            }
            let f = weight(n, d, mk, d_k, cfg.alpha);
            total.add(f);
            if f > 0.0 {
                terms.push(Term { n, lambda: freq * libm::pow(n as f64, 1.0 / mk), f });
            }
        }
        let total = total.value();
        let search = terms.iter().copied().filter(|t| t.f >= SEARCH_DROP * total).collect();
        Ok(Self {
            terms,
            search,
            theta: cfg.theta,
            total,
            x_big: cfg.x_big,
            a: cfg.a,
            alpha_n: cfg.alpha,
            alpha_lambda: cfg.alpha_lambda_scale(spec),
            c1: cfg.c1,
        })
    }

    /// Terms with `f(n) > 0`, ascending in `n`.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `Σ_{n <= X^{A1}} f(n)`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `A(x)`, summed in ascending `n` with compensation.
    pub fn value(&self, x: f64) -> f64 {
        Self::eval(&self.terms, self.theta, x)
    }

    fn eval(terms: &[Term], theta: f64, x: f64) -> f64 {
        terms.iter().map(|t| t.f * libm::cos(t.lambda * x + theta)).collect::<CompensatedSum>().value()
    }

    fn search_abs(&self, x: f64) -> f64 {
        libm::fabs(Self::eval(&self.search, self.theta, x))
    }

    /// `[X^{A3}/2, 2 A2² X^{A2} log² X]`.
    pub fn interval(&self) -> (f64, f64) {
        let [_, a2, a3, _] = self.a;
        let l = libm::log(self.x_big);
        (libm::pow(self.x_big, a3) / 2.0, 2.0 * a2 * a2 * libm::pow(self.x_big, a2) * l * l)
    }

    /// Uniform grid with spacing `2π/(8 λ_max)`, capped at `grid_points`.
    pub fn plan(&self, grid_points: u64) -> Result<SearchPlan> {
        if grid_points < 1000 {
            return Err(Error::InvalidParameter("grid_points must be at least 1000".into()));
        }
        let cap = grid_points.min(GRID_CAP);
        let (x_lo, x_hi) = self.interval();
        let lambda_max = self.search.iter().map(|t| t.lambda).fold(0.0, f64::max);
        let spacing = if lambda_max > 0.0 { 2.0 * PI / lambda_max / 8.0 } else { x_hi - x_lo };
        let needed = libm::ceil((x_hi - x_lo) / spacing) + 1.0;
        let points = if needed >= cap as f64 { cap } else { (needed as u64).max(2) };
        Ok(SearchPlan { x_lo, x_hi, step: (x_hi - x_lo) / (points - 1) as f64, points, lambda_max })
    }

    /// Best [`POLISH_CANDIDATES`] grid points among the indices in `range`.
    pub fn scan(&self, plan: &SearchPlan, range: Range<u64>) -> Vec<Candidate> {
        let mut top = Vec::with_capacity(POLISH_CANDIDATES + 1);
        let steps: Vec<(f64, f64)> =
            self.search.iter().map(|t| (libm::cos(t.lambda * plan.step), libm::sin(t.lambda * plan.step))).collect();
        let mut buf = [0.0f64; BLOCK];
        let block = BLOCK as u64;
        let mut start = range.start;
        while start < range.end {
            // phasors are reseeded at multiples of BLOCK so values do not depend on the range
            let base = start / block * block;
            let end = range.end.min(base + block);
            let len = (end - base) as usize;
            buf[..len].fill(0.0);
            let x0 = plan.x(base);
            for (t, &(wc, ws)) in self.search.iter().zip(&steps) {
                let arg = t.lambda * x0 + self.theta;
                let (mut zc, mut zs) = (libm::cos(arg), libm::sin(arg));
                for b in buf[..len].iter_mut() {
                    *b += t.f * zc;
                    let c = zc * wc - zs * ws;
                    zs = zs * wc + zc * ws;
                    zc = c;
                }
            }
            for j in (start - base) as usize..len {
                insert(&mut top, Candidate { x: plan.x(base + j as u64), abs: libm::fabs(buf[j]) });
            }
            start = end;
        }
        top
    }

    /// Golden-section refinement of `|A|` within one grid step of each candidate.
    pub fn polish(&self, plan: &SearchPlan, candidates: &[Candidate]) -> Candidate {
        let mut best = Candidate { x: plan.x_lo, abs: self.search_abs(plan.x_lo) };
        for c in candidates {
            let at = Candidate { x: c.x, abs: self.search_abs(c.x) };
            let mut a = (c.x - plan.step).max(plan.x_lo);
            let mut b = (c.x + plan.step).min(plan.x_hi);
            let g = 0.5 * (libm::sqrt(5.0) - 1.0);
            let mut u = b - g * (b - a);
            let mut v = a + g * (b - a);
            let (mut fu, mut fv) = (self.search_abs(u), self.search_abs(v));
            for _ in 0..80 {
                if fu >= fv {
                    b = v;
                    v = u;
                    fv = fu;
                    u = b - g * (b - a);
                    fu = self.search_abs(u);
                } else {
                    a = u;
                    u = v;
                    fu = fv;
                    v = a + g * (b - a);
                    fv = self.search_abs(v);
                }
            }
            let refined = if fu >= fv { Candidate { x: u, abs: fu } } else { Candidate { x: v, abs: fv } };
            for cand in [at, refined] {
                if cand.better_than(&best) {
                    best = cand;
                }
            }
        }
        best
    }

    /// Assembles the report for a located maximum.
    pub fn outcome(&self, resonator: &ResonatorSet, plan: &SearchPlan, best: Candidate) -> Result<SearchOutcome> {
        if resonator.is_empty() {
            return Err(Error::EmptyResonator);
        }
        let mut mass = CompensatedSum::new();
        for &n in &resonator.members {
            if let Ok(i) = self.terms.binary_search_by_key(&n, |t| t.n) {
                mass.add(self.terms[i].f);
            }
        }
        let resonator_mass = mass.value();
        let bound_rhs = PI / (4.0 * E) * resonator_mass;
        let max_abs = libm::fabs(self.value(best.x));
        let [_, a2, a3, a4] = self.a;
        let low: f64 =
            self.terms.iter().filter(|t| t.lambda <= 4.0 * self.alpha_lambda).map(|t| t.f).collect::<CompensatedSum>().value();
        let x_pow = |e: f64| libm::pow(self.x_big, e);
        Ok(SearchOutcome {
            x_star: best.x,
            max_abs,
            bound_rhs,
            margin: max_abs - bound_rhs,
            resonator_mass,
            total_mass: self.total,
            m_size: resonator.len(),
            proxy_resonator: x_pow(a3 - a2) * libm::exp(2.0 * resonator.len() as f64 / self.c1) * low,
            proxy_tail: x_pow(-a4) / self.alpha_lambda * self.total,
            proxy_tail_n_scale: x_pow(-a4) / self.alpha_n * self.total,
            interval: (plan.x_lo, plan.x_hi),
            grid_points: plan.points,
            grid_step: plan.step,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchPlan {
    pub x_lo: f64,
    pub x_hi: f64,
    pub step: f64,
    pub points: u64,
    pub lambda_max: f64,
}

impl SearchPlan {
    pub fn x(&self, i: u64) -> f64 {
        if i + 1 == self.points {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.step
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub x: f64,
    pub abs: f64,
}

impl Candidate {
    /// Larger `|A|` wins; ties go to the smaller `x`.
    pub fn better_than(&self, other: &Candidate) -> bool {
        self.abs > other.abs || (self.abs == other.abs && self.x < other.x)
    }
}

fn insert(top: &mut Vec<Candidate>, c: Candidate) {
    if top.len() == POLISH_CANDIDATES && !c.better_than(&top[POLISH_CANDIDATES - 1]) {
        return;
    }
    let pos = top.iter().position(|t| c.better_than(t)).unwrap_or(top.len());
    top.insert(pos, c);
    top.truncate(POLISH_CANDIDATES);
}

/// Merges per-chunk candidate lists; the result does not depend on chunking.
pub fn merge_candidates(lists: &[Vec<Candidate>]) -> Vec<Candidate> {
    let mut top = Vec::with_capacity(POLISH_CANDIDATES + 1);
    for c in lists.iter().flatten() {
        insert(&mut top, *c);
    }
    top
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub x_star: f64,
    pub max_abs: f64,
    /// `(π/4e) Σ_{n∈M} f(n)`.
    pub bound_rhs: f64,
    pub margin: f64,
    pub resonator_mass: f64,
    pub total_mass: f64,
    pub m_size: usize,
    /// `X^{A3-A2} e^{2|M|/C1} Σ_{λ_n <= 4α_λ} f(n)`.
    pub proxy_resonator: f64,
    /// `(X^{-A4}/α_λ) Σ_{n <= X^{A1}} f(n)`.
    pub proxy_tail: f64,
    /// The same with `α` in place of `α_λ`.
    pub proxy_tail_n_scale: f64,
    pub interval: (f64, f64),
    pub grid_points: u64,
    pub grid_step: f64,
}

impl SearchOutcome {
    /// `max_abs >= bound_rhs - proxy_resonator - proxy_tail`.
    pub fn within_proxies(&self) -> bool {
        self.max_abs >= self.bound_rhs - self.proxy_resonator - self.proxy_tail
    }
}

/// Grid search for `max |A(x)|` over the theorem's interval, refined locally.
pub fn resonance_search(
    spec: &NumberFieldSpec,
    table: &DivisorTable,
    cfg: &ResonatorConfig,
    resonator: &ResonatorSet,
    grid_points: u64,
) -> Result<SearchOutcome> {
    if resonator.is_empty() {
        return Err(Error::EmptyResonator);
    }
    let sum = ResonanceSum::new(spec, table, cfg)?;
    let plan = sum.plan(grid_points)?;
    let top = sum.scan(&plan, 0..plan.points);
    let best = sum.polish(&plan, &top);
    sum.outcome(resonator, &plan, best)
}

/// `A(x)` for a single `x`.
pub fn cosine_sum(x: f64, spec: &NumberFieldSpec, table: &DivisorTable, cfg: &ResonatorConfig) -> Result<f64> {
    Ok(ResonanceSum::new(spec, table, cfg)?.value(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::sieve_divisors;
    use crate::numberfield::DensityVector;

    #[test]
    fn weights_by_hand() {
        let q = NumberFieldSpec::rationals();
        let d = DensityVector::normal_extension(1);
        let t2 = sieve_divisors(&q, 2, 100).unwrap();
        let cfg = ResonatorConfig::new(&q, &d, 2, 10.0, 4.0).unwrap();
        let f1 = resonance_weight(1, &q, &t2, &cfg).unwrap();
        assert!((f1 - libm::exp(-PI * PI / 4.0)).abs() < 1e-15);
        assert_eq!(resonance_weight(40, &q, &t2, &cfg).unwrap(), 0.0);
        let t1 = sieve_divisors(&q, 1, 100).unwrap();
        let cfg = ResonatorConfig::new(&q, &d, 1, 10.0, 4.0).unwrap();
        let f4 = resonance_weight(4, &q, &t1, &cfg).unwrap();
        assert!((f4 - 0.25 * libm::exp(-PI * PI)).abs() < 1e-18);
    }

    #[test]
    fn scan_matches_direct_evaluation() {
        let q = NumberFieldSpec::rationals();
        let d = DensityVector::normal_extension(1);
        let t = sieve_divisors(&q, 2, 100_000).unwrap();
        let cfg = ResonatorConfig::new(&q, &d, 2, 1e3, 30.0).unwrap();
        let sum = ResonanceSum::new(&q, &t, &cfg).unwrap();
        let plan = sum.plan(5000).unwrap();
        let top = sum.scan(&plan, 0..plan.points);
        for c in &top {
            assert!((c.abs - sum.value(c.x).abs()).abs() < 1e-6 * sum.total(), "{c:?} {}", sum.value(c.x));
        }
        let split: Vec<Vec<Candidate>> =
            [0..1234, 1234..3000, 3000..plan.points].into_iter().map(|r| sum.scan(&plan, r)).collect();
        assert_eq!(merge_candidates(&split), top);
    }

    #[test]
    fn candidate_ordering() {
        let mut top = Vec::new();
        for i in 0..20 {
            insert(&mut top, Candidate { x: i as f64, abs: (i % 5) as f64 });
        }
        assert_eq!(top.len(), POLISH_CANDIDATES);
        assert_eq!(top[0], Candidate { x: 4.0, abs: 4.0 });
        assert_eq!(top[1], Candidate { x: 9.0, abs: 4.0 });
    }
}
