use std::f64::consts::PI;

use piltz_core::divisor::{sieve_divisors, DivisorTable};
use piltz_core::mainterm::{delta, main_term_poly, LaurentExpansion, MainTermPoly};
use piltz_core::numberfield::{parse_field, NumberFieldSpec};
use piltz_core::voronoi::*;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn main_for(c: &[f64], k: u32) -> MainTermPoly {
    let l = LaurentExpansion { field_label: String::new(), c: c.to_vec(), est_error: vec![0.0; c.len()] };
    main_term_poly(&l, k).unwrap()
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut z = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, z);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let w = 2.0 / ((1.0 - z * z) * dp * dp);
                    break (z, w);
                }
            }
        })
        .collect()
}

/// Integrates Δ against the Gaussian piece by piece between jumps.
fn oracle_lhs(spec: &NumberFieldSpec, table: &DivisorTable, main: &MainTermPoly, p: &SmoothingParams) -> f64 {
    let mk = (spec.degree() as u32 * table.k()) as f64;
    let a = p.alpha.powf(1.0 / mk);
    let y0 = p.x.powf(mk);
    let u = p.u_cutoff;
    let mut cuts = vec![-u];
    for n in 1..=table.len() {
        let t = p.x * (n as f64 / y0).ln();
        if t > -u && t < u && table.value(n) > 0 {
            cuts.push(t);
        }
    }
    cuts.push(u);
    let rule = gauss_legendre(12);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let sub = 16;
        let width = (w[1] - w[0]) / sub as f64;
        for s in 0..sub {
            let lo = w[0] + s as f64 * width;
            for &(z, wt) in &rule {
                let v = lo + 0.5 * width * (z + 1.0);
                let f = delta(table, main, y0 * (v / p.x).exp()).unwrap() * (-(a * v) * (a * v)).exp();
                total += 0.5 * width * wt * f;
            }
        }
    }
    total * a / PI.sqrt()
}

#[test]
fn lhs_matches_piecewise_oracle() {
    let q = NumberFieldSpec::rationals();
    let t1 = sieve_divisors(&q, 1, 1000).unwrap();
    let m1 = main_for(&[1.0], 1);
    let p = SmoothingParams::new(&q, 1, 10.0, 4.0).unwrap();
    let got = smoothed_lhs(&q, &t1, &m1, &p).unwrap();
    let want = oracle_lhs(&q, &t1, &m1, &p);
    assert!((got.value - want).abs() < 1e-6, "{got:?} {want}");

    let t2 = sieve_divisors(&q, 2, 1000).unwrap();
    let m2 = main_for(&[1.0, EULER_GAMMA], 2);
    let p = SmoothingParams::new(&q, 2, 10.0, 4.0).unwrap();
    let got = smoothed_lhs(&q, &t2, &m2, &p).unwrap();
    let want = oracle_lhs(&q, &t2, &m2, &p);
    assert!((got.value - want).abs() < 1e-6, "{got:?} {want}");

    let qi = parse_field(&[1, 0, 1], None).unwrap();
    let t = sieve_divisors(&qi, 1, 1000).unwrap();
    let m = main_for(&[PI / 4.0], 1);
    let p = SmoothingParams::new(&qi, 1, 10.0, 9.0).unwrap();
    let got = smoothed_lhs(&qi, &t, &m, &p).unwrap();
    let want = oracle_lhs(&qi, &t, &m, &p);
    assert!((got.value - want).abs() < 1e-6, "{got:?} {want}");
}

#[test]
fn concentrated_gaussian_recovers_delta() {
    let q = NumberFieldSpec::rationals();
    let t = sieve_divisors(&q, 1, 100).unwrap();
    let m = main_for(&[1.0], 1);
    let p = SmoothingParams::new(&q, 1, 10.3, 1e6).unwrap();
    let v = smoothed_lhs(&q, &t, &m, &p).unwrap().value;
    assert!((v - (10.0 - 10.3)).abs() < 1e-2, "{v}");
}

#[test]
fn lhs_bounded_by_sup() {
    let q = NumberFieldSpec::rationals();
    let t = sieve_divisors(&q, 2, 1000).unwrap();
    let m = main_for(&[1.0, EULER_GAMMA], 2);
    let p = SmoothingParams::new(&q, 2, 10.0, 4.0).unwrap();
    let v = smoothed_lhs(&q, &t, &m, &p).unwrap().value;
    let y0: f64 = 100.0;
    let mut sup: f64 = 0.0;
    for i in 0..=20_000 {
        let u = -p.u_cutoff + 2.0 * p.u_cutoff * i as f64 / 20_000.0;
        sup = sup.max(delta(&t, &m, y0 * (u / p.x).exp()).unwrap().abs());
    }
    for n in 1..=1000u64 {
        let u = p.x * (n as f64 / y0).ln();
        if u.abs() <= p.u_cutoff {
            sup = sup.max(delta(&t, &m, n as f64).unwrap().abs());
            sup = sup.max(delta(&t, &m, n as f64 - 1e-9).unwrap().abs());
        }
    }
    assert!(v.is_finite() && v.abs() <= sup, "{v} {sup}");
}

#[test]
fn quadrature_step_halving_within_estimate() {
    let qi = parse_field(&[1, 0, 1], None).unwrap();
    let t = sieve_divisors(&qi, 2, 5000).unwrap();
    let m = main_for(&[PI / 4.0, 0.2], 2);
    let p = SmoothingParams::new(&qi, 2, 5.0, 4.0).unwrap();
    let a = smoothed_lhs(&qi, &t, &m, &p).unwrap();
    let b = smoothed_lhs(&qi, &t, &m, &p.with_quad_step(p.quad_step / 2.0)).unwrap();
    assert!((a.value - b.value).abs() <= a.quad_error, "{a:?} {b:?}");
}

#[test]
fn gaussian_mass_by_trapezoid() {
    let q = NumberFieldSpec::rationals();
    let qi = parse_field(&[1, 0, 1], None).unwrap();
    for (spec, k) in [(&q, 2), (&qi, 1), (&qi, 2)] {
        for x in [5.0, 10.0, 20.0] {
            for alpha in [4.0, 9.0] {
                let p = SmoothingParams::new(spec, k, x, alpha).unwrap();
                let mass = gaussian_mass(spec, k, &p).unwrap();
                assert!(mass >= 1.0 - 1e-12 && mass <= 1.0);
                let mk = (spec.degree() as u32 * k) as f64;
                let a = alpha.powf(1.0 / mk);
                let n = 20_000;
                let h = 2.0 * p.u_cutoff / n as f64;
                let trap: f64 = (0..=n)
                    .map(|i| {
                        let u = -p.u_cutoff + i as f64 * h;
                        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                        w * (-(a * u) * (a * u)).exp()
                    })
                    .sum::<f64>()
                    * h
                    * a
                    / PI.sqrt();
                assert!((trap - mass).abs() < 1e-12, "{trap} {mass}");
            }
        }
    }
}

#[test]
fn rhs_specialized_to_divisor_function() {
    let q = NumberFieldSpec::rationals();
    let t = sieve_divisors(&q, 2, 2000).unwrap();
    for (x, alpha) in [(5.0, 4.0), (10.0, 9.0), (7.25, 2.0)] {
        let p = SmoothingParams::new(&q, 2, x, alpha).unwrap().with_n_terms(2000);
        let general = voronoi_rhs(&q, &t, &p).unwrap().value;
        let hand: f64 = (1..=2000u64)
            .map(|n| {
                let nf = n as f64;
                t.value(n) as f64 * nf.powf(-0.75) * (-PI * PI * nf / alpha).exp() * (4.0 * PI * nf.sqrt() * x - PI / 4.0).cos()
            })
            .sum::<f64>()
            * x.sqrt()
            / (PI * 2f64.sqrt());
        assert!((general - hand).abs() < 1e-12 * x.sqrt(), "{general} {hand}");
    }
}

#[test]
fn rhs_gaussian_circle_frequencies() {
    let qi = parse_field(&[1, 0, 1], None).unwrap();
    let t = sieve_divisors(&qi, 1, 100).unwrap();
    let p = SmoothingParams::new(&qi, 1, 3.5, 4.0).unwrap().with_n_terms(50);
    for term in rhs_terms(&qi, &t, &p).unwrap() {
        let want = 2.0 * PI * (term.n as f64).sqrt() * 3.5 - 0.75 * PI;
        assert!((term.phase - want).abs() < 1e-12);
    }
}

#[test]
fn rhs_tail_bound_and_self_convergence() {
    let q = NumberFieldSpec::rationals();
    let t = sieve_divisors(&q, 2, 20_000).unwrap();
    let p = SmoothingParams::new(&q, 2, 10.0, 4.0).unwrap();
    let mut prev: Option<f64> = None;
    for n in [10, 20, 40, 80] {
        let a = voronoi_rhs(&q, &t, &p.with_n_terms(n)).unwrap();
        let b = voronoi_rhs(&q, &t, &p.with_n_terms(2 * n)).unwrap();
        assert!((a.value - b.value).abs() <= a.tail_bound, "{n} {a:?} {b:?}");
        if let Some(prev) = prev {
            assert!((a.value - b.value).abs() <= prev);
        }
        prev = Some((a.value - b.value).abs().max(1e-300));
    }
    let a = voronoi_rhs(&q, &t, &p.with_n_terms(5000)).unwrap();
    let b = voronoi_rhs(&q, &t, &p.with_n_terms(10_000)).unwrap();
    assert!((a.value - b.value).abs() < 1e-12);
    // past the default cutoff every term is below 1e-10 relative to the prefactor scale
    assert!(a.last_term < 1e-10 * 10f64.sqrt());
}

#[test]
fn discrepancy_scales_with_x() {
    let q = NumberFieldSpec::rationals();
    let t = sieve_divisors(&q, 1, 200).unwrap();
    let m = main_for(&[1.0], 1);
    let ratios: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&x| {
            let p = SmoothingParams::new(&q, 1, x, 4.0).unwrap();
            let d = voronoi_discrepancy(&q, &t, &t, &m, &p).unwrap();
            d.abs_diff / d.x_scale
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi / lo < 20.0, "{ratios:?}");
}

#[test]
fn minimal_parameters_finite() {
    let q = NumberFieldSpec::rationals();
    let qi = parse_field(&[1, 0, 1], None).unwrap();
    for (spec, k) in [(&q, 1), (&q, 2), (&qi, 1), (&qi, 2)] {
        let t = sieve_divisors(spec, k, 2000).unwrap();
        let c = if spec.degree() == 1 { vec![1.0, EULER_GAMMA] } else { vec![PI / 4.0, 0.2] };
        let m = main_for(&c, k);
        let p = SmoothingParams::new(spec, k, 2.0, 2.0).unwrap();
        let d = voronoi_discrepancy(spec, &t, &t, &m, &p).unwrap();
        assert!(d.lhs.value.is_finite() && d.rhs.value.is_finite() && d.abs_diff.is_finite());
    }
}

#[test]
fn smoothing_inequality_examples() {
    let q = NumberFieldSpec::rationals();
    let t1 = sieve_divisors(&q, 1, 100).unwrap();
    let p = SmoothingParams::new(&q, 1, 5.0, 4.0).unwrap();
    let c = smoothing_inequality_check(&q, &t1, &main_for(&[1.0], 1), &p, 1.0).unwrap();
    assert!(c.holds, "{c:?}");
    let t2 = sieve_divisors(&q, 2, 1000).unwrap();
    let p = SmoothingParams::new(&q, 2, 10.0, 9.0).unwrap();
    let c = smoothing_inequality_check(&q, &t2, &main_for(&[1.0, EULER_GAMMA], 2), &p, 1.0).unwrap();
    assert!(c.holds, "{c:?}");
    assert!(c.max_side >= c.integral_side);
}
