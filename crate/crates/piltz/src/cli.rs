//! Argument parsing and the command implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use piltz_core::divisor::DivisorTable;
use piltz_core::mainterm::{laurent_coeffs, main_term_poly, LaurentExpansion, LaurentOptions, MainTermPoly};
use piltz_core::numberfield::{DensitySource, DensityVector};
use piltz_core::resonance::{
    build_resonator, calibrate_alpha, exponents, kappa, OmegaExponents, PrimePools, ResonatorConfig,
};
use piltz_core::voronoi::{gaussian_mass, rhs_terms, voronoi_discrepancy, SmoothingParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{cache_dir, load_or_sieve};
use crate::config::{DensityFile, Field};
use crate::error::AppError;
use crate::parallel::{default_threads, estimate_densities_parallel, resonance_search_parallel};
use crate::verify::{run_suite, Context};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "piltz", version, about = "Divisor problems over number fields: sieves, main terms, Voronoi checks and resonance bounds")]
pub struct Cli {
    /// Upper bound on worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field invariants (`field [info] <config>`) or densities (`field densities <config>`)
    Field {
        /// `info`, `densities`, or the config path (meaning `info`)
        action: String,
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        /// Use the Galois generators instead of counting primes
        #[arg(long)]
        exact: bool,
    },
    /// Splitting densities δ_ν
    Densities {
        config: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[arg(long)]
        exact: bool,
    },
    /// Table of d_K^(k)(n) for n <= N
    Divisors {
        config: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
        /// CSV destination
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Laurent coefficients of ζ_K at 1 and the main-term polynomial
    Mainterm {
        config: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        order: usize,
        /// Range of the k = 1 table used for ζ_K
        #[arg(long = "table", default_value_t = 1_000_000)]
        table_n: u64,
    },
    /// The error term Δ_K^(k)(x)
    Delta {
        config: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: f64,
        #[arg(long = "table", default_value_t = 1_000_000)]
        table_n: u64,
    },
    /// Both sides of the smoothed Voronoi identity
    Voronoi {
        config: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        alpha: f64,
        /// Series length
        #[arg(long)]
        terms: Option<u64>,
        #[arg(long, value_enum)]
        report: Option<Format>,
        #[arg(long = "table", default_value_t = 1_000_000)]
        table_n: u64,
    },
    /// Resonator construction and the maximum search
    Resonate {
        config: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long = "X")]
        x_big: f64,
        #[arg(long = "C1", default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = piltz_core::resonance::GRID_CAP)]
        grid: u64,
        /// Comma-separated μ_0,...,μ_m
        #[arg(long)]
        mu_override: Option<String>,
        /// Fixed α; calibrated to |M| ≈ log X when absent
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        pool_bound: u64,
        /// Prime bound when densities must be estimated
        #[arg(long, default_value_t = 1_000_000)]
        density_bound: u64,
    },
    /// Ω-exponents β, γ and their comparison values
    Exponents {
        config: PathBuf,
        #[arg(long)]
        k: u32,
        /// JSON file `{"deltas": [...]}`
        #[arg(long)]
        densities: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        density_bound: u64,
    },
    /// Run the acceptance suite
    VerifyAll,
}

struct Env<'a> {
    cli: &'a Cli,
    threads: usize,
    cache: Option<PathBuf>,
}

impl Env<'_> {
    fn format(&self, default: Format) -> Format {
        self.cli.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<(), AppError> {
        match &self.cli.output {
            Some(path) => write_file(path, text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| AppError::Io(e.to_string()))
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<(), AppError> {
        self.emit(&to_json(value))
    }

    fn table(&self, field: &Field, k: u32, n: u64) -> Result<DivisorTable, AppError> {
        load_or_sieve(field, k, n, self.cache.as_deref())
    }

    fn laurent(&self, field: &Field, order: usize, table_n: u64) -> Result<LaurentExpansion, AppError> {
        let t = self.table(field, 1, table_n)?;
        Ok(laurent_coeffs(&t, order, LaurentOptions::default())?)
    }

    fn main_poly(&self, field: &Field, k: u32, table_n: u64) -> Result<MainTermPoly, AppError> {
        Ok(main_term_poly(&self.laurent(field, k as usize, table_n)?, k)?)
    }

    fn densities(&self, field: &Field, bound: u64) -> Result<DensityVector, AppError> {
        match field.exact_densities()? {
            Some(d) => Ok(d),
            None => Ok(estimate_densities_parallel(&field.spec, bound, self.threads)?),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), AppError> {
    std::fs::write(path, text).map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Pretty JSON with shortest round-trip floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| AppError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| AppError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn positive(name: &str, v: u32) -> Result<u32, AppError> {
    if v == 0 {
        return Err(AppError::Config(format!("--{name} must be positive")));
    }
    Ok(v)
}

pub fn run(cli: &Cli) -> Result<(), AppError> {
    let threads = cli.threads.unwrap_or_else(default_threads);
    if threads == 0 {
        return Err(AppError::Config("--threads must be positive".into()));
    }
    let env = Env { cli, threads, cache: cache_dir() };
    match &cli.command {
        Command::Field { action, config, bound, exact } => match (action.as_str(), config) {
            ("info", Some(path)) => field_info(&env, path),
            ("densities", Some(path)) => densities(&env, path, *bound, *exact),
            (other, None) if other != "info" && other != "densities" => field_info(&env, Path::new(other)),
            (other, _) => Err(AppError::Config(format!("usage: field [info|densities] <config> (got `{other}`)"))),
        },
        Command::Densities { config, bound, exact } => densities(&env, config, *bound, *exact),
        Command::Divisors { config, k, n, out } => divisors(&env, config, *k, *n, out.as_deref()),
        Command::Mainterm { config, k, order, table_n } => mainterm(&env, config, *k, *order, *table_n),
        Command::Delta { config, k, x, table_n } => delta(&env, config, *k, *x, *table_n),
        Command::Voronoi { config, k, x, alpha, terms, report, table_n } => {
            voronoi(&env, config, *k, *x, *alpha, *terms, *report, *table_n)
        }
        Command::Resonate { config, k, x_big, c1, grid, mu_override, alpha, pool_bound, density_bound } => {
            let opts = ResonateOpts {
                k: *k,
                x_big: *x_big,
                c1: *c1,
                grid: *grid,
                mu: mu_override.as_deref(),
                alpha: *alpha,
                pool_bound: *pool_bound,
                density_bound: *density_bound,
            };
            resonate(&env, config, &opts)
        }
        Command::Exponents { config, k, densities, density_bound } => {
            exponents_cmd(&env, config, *k, densities.as_deref(), *density_bound)
        }
        Command::VerifyAll => verify_all(&env),
    }
}

#[derive(Serialize)]
struct FieldInfo<'a> {
    m: usize,
    r1: usize,
    r2: usize,
    #[serde(rename = "D")]
    d: u64,
    label: &'a str,
    coeffs: &'a [i64],
    poly_discriminant: i128,
    index_primes: &'a [u64],
    unresolved_primes: Vec<u64>,
    class_number_residue: Option<f64>,
}

fn field_info(env: &Env, path: &Path) -> Result<(), AppError> {
    let f = Field::load(path)?;
    env.emit_json(&FieldInfo {
        m: f.spec.degree(),
        r1: f.spec.r1(),
        r2: f.spec.r2(),
        d: f.spec.discriminant(),
        label: f.label(),
        coeffs: &f.config.coeffs,
        poly_discriminant: f.spec.poly_discriminant(),
        index_primes: f.spec.index_primes(),
        unresolved_primes: f.spec.unresolved_primes(),
        class_number_residue: f.class_number_residue(),
    })
}

fn densities(env: &Env, path: &Path, bound: u64, exact: bool) -> Result<(), AppError> {
    let f = Field::load(path)?;
    let d = if exact {
        f.exact_densities()?.ok_or_else(|| AppError::Config("--exact needs galois_generators in the config".into()))?
    } else {
        estimate_densities_parallel(&f.spec, bound, env.threads)?
    };
    let source = match d.source() {
        DensitySource::ExactGroup => "exact_group",
        DensitySource::Empirical => "empirical",
        DensitySource::UserSupplied => "user_supplied",
    };
    env.emit_json(&json!({
        "label": f.label(),
        "source": source,
        "deltas": d.deltas(),
        "exact": d.exact().map(|e| e.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
        "prime_bound": if exact { None } else { Some(bound) },
        "analyzed_primes": d.analyzed_primes(),
        "support": d.support(),
        "R": d.r(),
        "weighted_sum": d.weighted_sum(),
    }))
}

fn divisors(env: &Env, path: &Path, k: u32, n: u64, out: Option<&Path>) -> Result<(), AppError> {
    let f = Field::load(path)?;
    positive("k", k)?;
    if n == 0 {
        return Err(AppError::Config("--n must be positive".into()));
    }
    let t = env.table(&f, k, n)?;
    let text = match (env.format(Format::Csv), out) {
        (Format::Json, None) => to_json(&json!({
            "label": f.label(),
            "k": k,
            "n": n,
            "d": t.values().collect::<Vec<_>>(),
            "summatory": t.summatory_at(n),
            "unresolved_primes": t.unresolved_primes(),
        })),
        _ => csv_text(&["n", "d"], t.values().enumerate().map(|(i, d)| vec![(i + 1).to_string(), d.to_string()]))?,
    };
    match out {
        Some(p) => write_file(p, &text),
        None => env.emit(&text),
    }
}

fn mainterm(env: &Env, path: &Path, k: u32, order: usize, table_n: u64) -> Result<(), AppError> {
    let f = Field::load(path)?;
    positive("k", k)?;
    let l = env.laurent(&f, order, table_n)?;
    let poly = main_term_poly(&l, k)?;
    env.emit_json(&json!({
        "label": f.label(),
        "table_n": table_n,
        "laurent": { "c": l.c, "est_error": l.est_error },
        "main_term": { "k": k, "coeffs": poly.coeffs },
        "class_number_residue": f.class_number_residue(),
    }))
}

fn delta(env: &Env, path: &Path, k: u32, x: f64, table_n: u64) -> Result<(), AppError> {
    let f = Field::load(path)?;
    positive("k", k)?;
    if !(x >= 1.0 && x.is_finite()) {
        return Err(AppError::Config("--x must be at least 1".into()));
    }
    let main = env.main_poly(&f, k, table_n)?;
    let t = env.table(&f, k, x.floor() as u64)?;
    let summatory = t.summatory(x)?;
    let mt = main.eval(x);
    env.emit_json(&json!({
        "label": f.label(),
        "k": k,
        "x": x,
        "summatory": summatory,
        "main_term": mt,
        "delta": summatory as f64 - mt,
    }))
}

#[allow(clippy::too_many_arguments)]
fn voronoi(
    env: &Env,
    path: &Path,
    k: u32,
    x: f64,
    alpha: f64,
    terms: Option<u64>,
    report: Option<Format>,
    table_n: u64,
) -> Result<(), AppError> {
    let f = Field::load(path)?;
    positive("k", k)?;
    let spec = &f.spec;
    let mut p = SmoothingParams::new(spec, k, x, alpha)?;
    if let Some(n) = terms {
        p = p.with_n_terms(n);
    }
    let mk = (spec.degree() as u32 * k) as f64;
    let lhs_need = (x.powf(mk) * (p.u_cutoff / x).exp()).ceil() as u64 + 2;
    let t = env.table(&f, k, lhs_need.max(p.n_terms))?;
    if report.or(env.cli.format) == Some(Format::Csv) {
        let rows = rhs_terms(spec, &t, &p)?.into_iter().map(|r| {
            vec![r.n.to_string(), r.d.to_string(), r.amplitude.to_string(), r.phase.to_string(), r.value.to_string()]
        });
        return env.emit(&csv_text(&["n", "d", "amplitude", "phase", "value"], rows)?);
    }
    let main = env.main_poly(&f, k, table_n)?;
    let d = voronoi_discrepancy(spec, &t, &t, &main, &p)?;
    env.emit_json(&json!({
        "label": f.label(),
        "k": k,
        "params": { "x": p.x, "alpha": p.alpha, "u_cutoff": p.u_cutoff, "quad_step": p.quad_step, "n_terms": p.n_terms },
        "gaussian_mass": gaussian_mass(spec, k, &p)?,
        "lhs": { "value": d.lhs.value, "quad_error": d.lhs.quad_error },
        "rhs": { "value": d.rhs.value, "last_term": d.rhs.last_term, "tail_bound": d.rhs.tail_bound },
        "abs_diff": d.abs_diff,
        "x_scale": d.x_scale,
        "predicted_error_scale": d.predicted_error_scale,
        "alternate_error_scale": d.alternate_error_scale,
    }))
}

struct ResonateOpts<'a> {
    k: u32,
    x_big: f64,
    c1: f64,
    grid: u64,
    mu: Option<&'a str>,
    alpha: Option<f64>,
    pool_bound: u64,
    density_bound: u64,
}

fn parse_mu(text: &str, m: usize) -> Result<Vec<f64>, AppError> {
    let mu = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| AppError::Config(format!("--mu-override: {e}")))?;
    if mu.len() != m + 1 {
        return Err(AppError::Config(format!("--mu-override needs {} values (ν = 0..={m})", m + 1)));
    }
    Ok(mu)
}

fn resonate(env: &Env, path: &Path, o: &ResonateOpts) -> Result<(), AppError> {
    let f = Field::load(path)?;
    positive("k", o.k)?;
    let spec = &f.spec;
    let d = env.densities(&f, o.density_bound)?;
    let mut template = ResonatorConfig::new(spec, &d, o.k, o.x_big, o.alpha.unwrap_or(10.0))?;
    template.c1 = o.c1;
    if let Some(text) = o.mu {
        template.mu = parse_mu(text, spec.degree())?;
    }
    template.validate()?;
    let pools = PrimePools::new(spec, o.pool_bound);
    let (cfg, resonator, c_k) = match o.alpha {
        Some(_) => {
            let set = build_resonator(spec, &d, &template, &pools)?;
            (template, set, None)
        }
        None => {
            let cal = calibrate_alpha(spec, &d, &template, &pools)?;
            (ResonatorConfig { alpha: cal.choice.alpha, ..template }, cal.resonator, Some(cal.c_k))
        }
    };
    let n = o.x_big.powf(cfg.a[0]).floor() as u64;
    let t = env.table(&f, o.k, n.max(1))?;
    let out = resonance_search_parallel(spec, &t, &cfg, &resonator, o.grid, env.threads)?;
    env.emit_json(&json!({
        "label": f.label(),
        "k": o.k,
        "X": o.x_big,
        "x_star": out.x_star,
        "max_abs": out.max_abs,
        "bound_rhs": out.bound_rhs,
        "margin": out.margin,
        "M_size": out.m_size,
        "alpha": cfg.alpha,
        "alpha_lambda": cfg.alpha_lambda_scale(spec),
        "C_k": c_k,
        "C1": cfg.c1,
        "kappa": kappa(&d, &cfg.mu)?,
        "mu": cfg.mu,
        "theta": cfg.theta,
        "resonator": resonator.members,
        "prime_counts": resonator.counts,
        "proxy_resonator": out.proxy_resonator,
        "proxy_tail": out.proxy_tail,
        "proxy_tail_n_scale": out.proxy_tail_n_scale,
        "within_proxies": out.within_proxies(),
        "resonator_mass": out.resonator_mass,
        "total_mass": out.total_mass,
        "interval": [out.interval.0, out.interval.1],
        "grid_points": out.grid_points,
        "grid_step": out.grid_step,
    }))
}

#[derive(Serialize)]
struct ExponentsOut {
    beta: f64,
    gamma: f64,
    gamma_exact: String,
    kappa: f64,
    mu: f64,
    beta_gkmn: f64,
    gamma_gkmn: f64,
    gamma_gkmn_exact: String,
    beta_hafner: f64,
    sign_class: &'static str,
    m: usize,
    k: u32,
    r1: usize,
    deltas: Vec<f64>,
}

impl ExponentsOut {
    fn new(e: OmegaExponents, r1: usize, d: &DensityVector) -> Self {
        Self {
            beta: e.beta,
            gamma: e.gamma,
            gamma_exact: e.gamma_exact.to_string(),
            kappa: e.kappa,
            mu: e.mu_half_r,
            beta_gkmn: e.beta_gkmn,
            gamma_gkmn: e.gamma_gkmn,
            gamma_gkmn_exact: e.gamma_gkmn_exact.to_string(),
            beta_hafner: e.beta_hafner,
            sign_class: e.sign_class.name(),
            m: e.m,
            k: e.k,
            r1,
            deltas: d.deltas().to_vec(),
        }
    }
}

fn exponents_cmd(env: &Env, path: &Path, k: u32, file: Option<&Path>, bound: u64) -> Result<(), AppError> {
    let f = Field::load(path)?;
    positive("k", k)?;
    let d = match file {
        Some(p) => DensityFile::load(p)?,
        None if f.spec.degree() == 1 => DensityVector::normal_extension(1),
        None => env.densities(&f, bound)?,
    };
    let e = exponents(f.spec.degree(), k, f.spec.r1(), &d)?;
    env.emit_json(&ExponentsOut::new(e, f.spec.r1(), &d))
}

fn verify_all(env: &Env) -> Result<(), AppError> {
    let ctx = Context { threads: env.threads };
    let report = run_suite(&ctx, |r, _| println!("{}", r.line()));
    if let Some(path) = &env.cli.output {
        write_file(path, &report.to_json())?;
    } else if env.cli.format == Some(Format::Json) {
        print!("{}", report.to_json());
    }
    let failed: Vec<Value> = report.criteria.iter().filter(|r| !r.pass).map(|r| json!(r.id)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(AppError::Failed(format!("criteria failed: {}", Value::Array(failed))))
    }
}
