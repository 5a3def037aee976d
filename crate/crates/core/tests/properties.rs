use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use piltz_core::divisor::*;
use piltz_core::numberfield::*;
use piltz_core::primes::{is_prime, primes_up_to};

fn mulmod_poly(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // descending coefficients
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    out
}

fn eval_mod(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().fold(0u128, |acc, &c| (acc * x as u128 + c as u128) % p as u128) as u64
}

fn prime_below_10k() -> impl Strategy<Value = u64> {
    (2u64..10_000).prop_filter("prime", |&p| is_prime(p))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn factor_mod_p_round_trip(
        p in prime_below_10k(),
        lead in 1i64..50,
        tail in prop::collection::vec(-1000i64..1000, 1..=8),
    ) {
        prop_assume!(lead as u64 % p != 0);
        let mut f = vec![lead];
        f.extend(&tail);
        let factors = factor_mod_p(&f, p).unwrap();
        let mut prod = vec![1u64];
        for g in &factors {
            prop_assert_eq!(g.coeffs[0], 1);
            for _ in 0..g.multiplicity {
                prod = mulmod_poly(&prod, &g.coeffs, p);
            }
            if g.degree() > 1 && p < 2000 {
                prop_assert!((0..p).all(|x| eval_mod(&g.coeffs, x, p) != 0));
            }
        }
        let lc = lead.rem_euclid(p as i64) as u64;
        let scaled: Vec<u64> = prod.iter().map(|&c| (c as u128 * lc as u128 % p as u128) as u64).collect();
        let want: Vec<u64> = f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        prop_assert_eq!(scaled, want);
        let keys: Vec<(usize, Vec<u64>)> = factors.iter().map(|g| (g.degree(), g.coeffs.clone())).collect();
        prop_assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    }
}

fn fields() -> Vec<NumberFieldSpec> {
    vec![
        NumberFieldSpec::rationals(),
        parse_field(&[1, 0, 1], None).unwrap(),
        parse_field(&[1, 0, -1, -1], None).unwrap(),
        parse_field(&[1, 0, 0, -2], None).unwrap(),
        parse_field(&[1, 0, 0, 0, 20, 16], Some(1_000_000))
            .unwrap()
            .with_local_splitting(2, vec![PrimeFactor::new(1, 4), PrimeFactor::new(1, 1)])
            .unwrap(),
    ]
}

#[test]
fn dirichlet_powers_agree() {
    for spec in fields() {
        let base: Vec<u64> = sieve_divisors(&spec, 1, 10_000).unwrap().values().collect();
        let mut power = base.clone();
        for k in 2..=3 {
            power = dirichlet_convolve(&power, &base);
            let sieved: Vec<u64> = sieve_divisors(&spec, k, 10_000).unwrap().values().collect();
            assert_eq!(sieved, power, "{:?} k={k}", spec.coeffs());
        }
    }
}

#[test]
fn tables_are_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in fields() {
        let t = sieve_divisors(&spec, 2, 1_000_000).unwrap();
        assert_eq!(t.value(1), 1);
        let mut checked = 0;
        while checked < 500 {
            let a = rng.gen_range(1..=1000u64);
            let b = rng.gen_range(1..=1000u64);
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            assert_eq!(t.value(a * b), t.value(a) * t.value(b));
            checked += 1;
        }
    }
}

#[test]
fn prime_values_are_k_nu() {
    for spec in fields() {
        for k in 1..=3 {
            let t = sieve_divisors(&spec, k, 5000).unwrap();
            for p in primes_up_to(5000) {
                let Ok(s) = spec.splitting_type(p) else { continue };
                if !s.ramified {
                    assert_eq!(t.value(p), k as u64 * s.nu as u64);
                }
                let lf = local_factor(&spec, p, k, 3).unwrap();
                let mut q = 1u64;
                for (j, &c) in lf.iter().enumerate() {
                    if q > 5000 {
                        break;
                    }
                    assert_eq!(t.value(q), c, "p={p} j={j}");
                    q *= p;
                }
            }
        }
    }
}

#[test]
fn divisor_function_matches_trial_division() {
    let t = sieve_divisors(&NumberFieldSpec::rationals(), 2, 100_000).unwrap();
    for n in 1..=100_000 {
        assert_eq!(t.value(n), oracle_divisor(n));
    }
    assert_eq!(t.summatory(10.0).unwrap(), 27);
}

#[test]
fn gauss_circle_exact() {
    let qi = parse_field(&[1, 0, 1], None).unwrap();
    let t = sieve_divisors(&qi, 1, 1_000_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let x: f64 = rng.gen_range(0.0..1e6);
        assert_eq!(4 * t.summatory(x).unwrap() + 1, oracle_lattice_count(x), "{x}");
    }
    let s = t.summatory(1e6).unwrap() as f64 / 1e6;
    assert!((s - PI / 4.0).abs() < 0.01);
}

#[test]
fn chebotarev_trend() {
    let qi = parse_field(&[1, 0, 1], None).unwrap();
    let errs: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&b| (estimate_densities(&qi, b as u64).unwrap().delta(2) - 0.5).abs())
        .collect();
    assert!(errs[3] < 0.01);
    assert!(errs[3] <= errs[0]);
    for (e, b) in errs.iter().zip([1e3f64, 1e4, 1e5, 1e6]) {
        assert!(*e <= b.powf(-0.25), "{errs:?}");
    }
}
