//! Command-line surface: catalog, generate, verify, evolve, sample, export.
//!
//! Configuration precedence: FPSOLVE_SEED env var > flags > --config file >
//! built-in defaults. Exit codes: 0 success, 1 check/runtime failure,
//! 2 usage or spec error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::catalog::{eigenpair, family_infos, Eigenstate, SolvableFamily};
use crate::error::{FpError, Result};
use crate::field::{Interval, ScalarField};
use crate::io::{
    interval_to_json, write_csv, Check, FamilySpec, ProblemSpec, Report, SCHEMA_VERSION,
};
use crate::langevin::{histogram_tv, simulate, SamplerConfig};
use crate::oracle::{
    build_grid, discrete_steady, evolve_fp, fit_decay_rate, fp_residual, Bc, DiscreteProblem,
};
use crate::solutions::{mode_from_states, nodal_domains, steady_state, FpMode, SteadyState};
use crate::susy::{
    drift_from_state, factorization_check, quantum_potential, riccati_residual_on,
    superpotential_of_state, DriftPotential, RESIDUAL_GRID_MARGIN, RESIDUAL_GRID_POINTS,
};

#[derive(Parser)]
#[command(
    name = "fpsolve",
    version,
    about = "Exactly solvable 1D Fokker-Planck problems from solvable quantum potentials"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the solvable families and their parameters
    Catalog {
        #[arg(long)]
        json: bool,
        /// Show one family in detail
        #[arg(long)]
        family: Option<String>,
    },
    /// Emit potential.csv, steady.csv and modes.json for a problem
    Generate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the full analytic-vs-numeric check suite
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Print the report as JSON instead of one line per check
        #[arg(long)]
        json: bool,
        /// Also write the JSON report to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crank-Nicolson evolution of a perturbed steady state (snapshots.csv)
    Evolve {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Langevin sampling against the steady density (histogram.csv)
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Steps per chain, including burn-in
        #[arg(long, default_value_t = 130_000)]
        steps: usize,
        #[arg(long, default_value_t = 5_000)]
        burn_in: usize,
        #[arg(long, default_value_t = 100)]
        bins: usize,
    },
    /// Print the fully resolved problem spec as JSON
    Export {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

#[derive(Args)]
struct SpecArgs {
    /// JSON spec file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    /// Family parameter, repeatable: --param omega=1.0
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Generating level n
    #[arg(long)]
    level: Option<usize>,
    /// Drift offset U_0
    #[arg(long)]
    offset: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    grid_eps: Option<f64>,
    /// Explicit grid bounds "lo,hi"
    #[arg(long, value_name = "LO,HI")]
    bounds: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    /// Evolution horizon T
    #[arg(long, visible_alias = "t")]
    horizon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    chains: Option<usize>,
    /// Highest mode index reported
    #[arg(long)]
    imax: Option<usize>,
}

impl SpecArgs {
    fn resolve(&self) -> Result<ProblemSpec> {
        let mut spec = match &self.config {
            Some(path) => ProblemSpec::from_json(&std::fs::read_to_string(path)?)?,
            None => ProblemSpec::default(),
        };
        if let Some(name) = &self.family {
            if *name != spec.family.name {
                spec.family = FamilySpec {
                    name: name.clone(),
                    params: Default::default(),
                };
            }
        }
        for pair in &self.params {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                FpError::InvalidConfig(format!("--param wants KEY=VALUE, got `{pair}`"))
            })?;
            let value: f64 = value.parse().map_err(|_| {
                FpError::InvalidConfig(format!("parameter `{key}` has non-numeric value"))
            })?;
            spec.family.params.insert(key.to_string(), value);
        }
        if let Some(v) = self.level {
            spec.level = v;
        }
        if let Some(v) = self.offset {
            spec.offset = v;
        }
        if let Some(v) = self.grid_n {
            spec.grid.n = v;
        }
        if let Some(v) = self.grid_eps {
            spec.grid.eps = v;
        }
        if let Some(text) = &self.bounds {
            let (lo, hi) = text.split_once(',').ok_or_else(|| {
                FpError::InvalidConfig("--bounds wants LO,HI".into())
            })?;
            let lo: f64 = lo.trim().parse().map_err(|_| {
                FpError::InvalidConfig("--bounds values must be numeric".into())
            })?;
            let hi: f64 = hi.trim().parse().map_err(|_| {
                FpError::InvalidConfig("--bounds values must be numeric".into())
            })?;
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(FpError::InvalidConfig("--bounds needs lo < hi".into()));
            }
            spec.grid.bounds = Some((lo, hi));
        }
        if let Some(v) = self.dt {
            spec.run.dt = v;
        }
        if let Some(v) = self.horizon {
            spec.run.horizon = v;
        }
        if let Some(v) = self.seed {
            spec.run.seed = v;
        }
        if let Some(v) = self.chains {
            spec.run.chains = v;
        }
        if let Some(v) = self.imax {
            spec.run.imax = v;
        }
        // documented precedence: env > flag > file
        if let Ok(text) = std::env::var("FPSOLVE_SEED") {
            let seed: u64 = text.parse().map_err(|_| {
                FpError::InvalidConfig(format!("FPSOLVE_SEED=`{text}` is not a u64"))
            })?;
            spec.run.seed = seed;
        }
        Ok(spec)
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Command::Catalog { json, family } => cmd_catalog(json, family.as_deref()),
        Command::Generate { spec, out } => spec.resolve().and_then(|s| cmd_generate(&s, &out)),
        Command::Verify { spec, json, out } => spec
            .resolve()
            .and_then(|s| cmd_verify(&s, json, out.as_deref())),
        Command::Evolve { spec, out } => spec.resolve().and_then(|s| cmd_evolve(&s, &out)),
        Command::Sample {
            spec,
            out,
            steps,
            burn_in,
            bins,
        } => spec
            .resolve()
            .and_then(|s| cmd_sample(&s, &out, steps, burn_in, bins)),
        Command::Export { spec } => spec.resolve().map(|s| {
            println!("{}", s.to_json());
            ExitCode::SUCCESS
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &FpError) -> u8 {
    match e {
        FpError::UnknownFamily(_)
        | FpError::ParamOutOfRange { .. }
        | FpError::IndexAboveSpectrum { .. }
        | FpError::InvalidConfig(_)
        | FpError::Io(_)
        | FpError::Json(_) => 2,
        _ => 1,
    }
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

fn cmd_catalog(json: bool, only: Option<&str>) -> Result<ExitCode> {
    let infos: Vec<_> = family_infos()
        .into_iter()
        .filter(|f| only.is_none_or(|name| f.name == name))
        .collect();
    if infos.is_empty() {
        return Err(FpError::UnknownFamily(only.unwrap_or("").to_string()));
    }
    if json {
        let doc: Vec<serde_json::Value> = infos
            .iter()
            .map(|f| {
                serde_json::json!({
                    "name": f.name,
                    "domain": f.domain,
                    "bound_states": f.bound_states,
                    "params": f.params.iter().map(|p| serde_json::json!({
                        "name": p.name,
                        "symbol": p.symbol,
                        "range": p.range,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "families": doc,
            }))?
        );
    } else {
        println!(
            "{:<14} {:<34} {:<14} bound states",
            "family", "parameters", "domain"
        );
        for f in &infos {
            let params: Vec<String> = f
                .params
                .iter()
                .map(|p| format!("{} ({})", p.name, p.range))
                .collect();
            println!(
                "{:<14} {:<34} {:<14} {}",
                f.name,
                params.join(", "),
                f.domain,
                f.bound_states
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// shared problem assembly
// ---------------------------------------------------------------------------

struct Problem {
    family: SolvableFamily,
    state: Eigenstate,
    drift: DriftPotential,
    domains: Vec<Interval>,
}

fn assemble(spec: &ProblemSpec) -> Result<Problem> {
    let family = spec.build_family()?;
    let state = eigenpair(&family, spec.level)?;
    let drift = drift_from_state(&state, spec.offset);
    let domains = nodal_domains(&drift);
    Ok(Problem {
        family,
        state,
        drift,
        domains,
    })
}

/// Window for residual grids: the state's support at grid.eps, clipped to the
/// family domain, unless explicit bounds were given.
fn residual_window(spec: &ProblemSpec, state: &Eigenstate, family: &SolvableFamily) -> Interval {
    match spec.grid.bounds {
        Some((lo, hi)) => Interval::new(lo, hi),
        None => state
            .support_window(spec.grid.eps)
            .intersect(&family.domain())
            .expect("support always meets the domain"),
    }
}

fn domain_grid(
    spec: &ProblemSpec,
    drift: &DriftPotential,
    domain: Interval,
    n: usize,
    bc: Bc,
) -> Result<(DiscreteProblem, SteadyState)> {
    let steady = steady_state(drift, domain)?;
    let dp = build_grid(domain, n, &steady.density(), spec.grid.eps, bc)?;
    Ok((dp, steady))
}

fn admissible_on(mode: &FpMode, domain: Interval) -> bool {
    mode.admissible_domains()
        .iter()
        .any(|d| d.approx_eq(&domain, 1e-9))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Run every check of the suite at the spec's tolerances.
pub fn run_verify(spec: &ProblemSpec) -> Result<Report> {
    let p = assemble(spec)?;
    let tol = &spec.run.tolerances;
    let v_s = p.family.potential();
    let energy = p.state.energy();
    let mut checks = Vec::new();

    // Riccati identity for the generating superpotential
    let w = superpotential_of_state(&p.state);
    let window = residual_window(spec, &p.state, &p.family);
    let riccati = riccati_residual_on(
        &w,
        &v_s,
        energy,
        window,
        RESIDUAL_GRID_POINTS,
        RESIDUAL_GRID_MARGIN,
    )?;
    checks.push(Check::new(
        "riccati_residual",
        riccati.residual_sup,
        tol.riccati,
    ));

    // Two routes to the quantum potential; the grid keeps the singularity
    // margin away from interior poles and from singular walls
    let vq = quantum_potential(&p.drift);
    let mut vq_sup: f64 = 0.0;
    let lo = window.lo + RESIDUAL_GRID_MARGIN;
    let hi = window.hi - RESIDUAL_GRID_MARGIN;
    for j in 0..RESIDUAL_GRID_POINTS {
        let x = lo + (hi - lo) * j as f64 / (RESIDUAL_GRID_POINTS - 1) as f64;
        if p.state
            .nodes()
            .iter()
            .any(|s| (x - s).abs() < RESIDUAL_GRID_MARGIN)
        {
            continue;
        }
        let diff = (vq.field.eval(x) - (v_s.eval(x) - energy)).abs();
        if !diff.is_finite() {
            vq_sup = f64::INFINITY;
            break;
        }
        vq_sup = vq_sup.max(diff);
    }
    checks.push(Check::new("vq_consistency", vq_sup, tol.vq_consistency));

    // Zero mode of the factorized operator, one grid per nodal domain.
    // The defect is pure O(h^2) discretization; refine until it sits well
    // under the tolerance (capped), so steep drifts are judged fairly.
    let mut fact_worst: f64 = 0.0;
    for &d in &p.domains {
        let steady = steady_state(&p.drift, d)?;
        let mut n = 4000usize;
        let defect = loop {
            let dp = build_grid(d, n, &steady.density(), spec.grid.eps, Bc::Dirichlet)?;
            let defect = factorization_check(&p.drift, &dp)?;
            if defect <= 0.5 * tol.factorization || n >= 32_000 {
                break defect;
            }
            n *= 2;
        };
        fact_worst = fact_worst.max(defect);
    }
    checks.push(Check::new(
        "factorization_zero_mode",
        fact_worst,
        tol.factorization,
    ));

    // Pointwise Fokker-Planck identity for every admissible mode
    let top = p
        .family
        .bound_state_count()
        .map(|c| c - 1)
        .unwrap_or(spec.run.imax)
        .min(spec.run.imax);
    let mut modes = Vec::new();
    for i in 0..=top {
        let state_i = eigenpair(&p.family, i)?;
        modes.push(mode_from_states(&p.state, &state_i)?);
    }
    let mut fp_worst: f64 = 0.0;
    for &d in &p.domains {
        let (dp, _) = domain_grid(spec, &p.drift, d, spec.grid.n, Bc::NoFlux)?;
        for m in &modes {
            if !admissible_on(m, d) {
                continue;
            }
            fp_worst = fp_worst.max(fp_residual(&p.drift, m, &dp)?);
        }
    }
    checks.push(Check::new("fp_residual_modes", fp_worst, tol.fp_residual));

    // Dynamical rate: relax a single-mode perturbation, fit the decay
    let mut rate_err: f64 = 0.0;
    let mut r2_defect: f64 = 0.0;
    for &d in &p.domains {
        let first_excited = modes
            .iter()
            .find(|m| m.rate() > 0.0 && admissible_on(m, d));
        let Some(m) = first_excited else { continue };
        let (dp, _) = domain_grid(spec, &p.drift, d, spec.grid.n, Bc::NoFlux)?;
        let base = discrete_steady(&p.drift, &dp)?;
        let profile = m.profile();
        let f0: Vec<f64> = (0..dp.points())
            .map(|j| base[j] + 0.1 * profile.eval(dp.x(j)))
            .collect();
        let horizon = spec.run.horizon.max(8.0 / m.rate());
        let run = evolve_fp(&p.drift, &f0, &dp, spec.run.dt, horizon)?;
        let (rate, r2) = fit_decay_rate(&run, &base)?;
        rate_err = rate_err.max((rate - m.rate()).abs() / m.rate());
        r2_defect = r2_defect.max(1.0 - r2);
    }
    checks.push(Check::new("rate_fit_rel_err", rate_err, tol.rate_rel));
    checks.push(Check::new("rate_fit_r2_defect", r2_defect, tol.r2_defect));

    // Long-time convergence to the steady density from a generic start
    let mut l1_worst: f64 = 0.0;
    for &d in &p.domains {
        let gap = modes
            .iter()
            .filter(|m| m.rate() > 0.0 && admissible_on(m, d))
            .map(|m| m.rate())
            .fold(f64::INFINITY, f64::min);
        if !gap.is_finite() {
            continue;
        }
        let (dp, steady) = domain_grid(spec, &p.drift, d, spec.grid.n, Bc::NoFlux)?;
        let center = dp.lo() + 0.35 * (dp.hi() - dp.lo());
        let width = 0.1 * (dp.hi() - dp.lo());
        let mut f0: Vec<f64> = (0..dp.points())
            .map(|j| {
                let x = dp.x(j);
                (-((x - center) / width).powi(2)).exp() + 0.01
            })
            .collect();
        let mass: f64 = dp.h() * f0.iter().sum::<f64>();
        f0.iter_mut().for_each(|v| *v /= mass);
        let run = evolve_fp(&p.drift, &f0, &dp, spec.run.dt, 20.0 / gap)?;
        let last = run.snapshots.last().expect("at least one snapshot");
        let density = steady.density();
        let l1: f64 = dp.h()
            * (0..dp.points())
                .map(|j| (last[j] - density.eval(dp.x(j))).abs())
                .sum::<f64>();
        l1_worst = l1_worst.max(l1);
    }
    checks.push(Check::new("long_time_l1", l1_worst, tol.long_time_l1));

    // Stochastic check of e^{-2U}
    let mut tv_worst: f64 = 0.0;
    for &d in &p.domains {
        let (dp, steady) = domain_grid(spec, &p.drift, d, spec.grid.n, Bc::NoFlux)?;
        let stats = run_sampler(spec, &p.drift, &dp, &steady, 130_000, 5_000, 100)?;
        tv_worst = tv_worst.max(stats.tv_distance);
    }
    checks.push(Check::new("langevin_tv", tv_worst, tol.histogram_tv));

    Ok(Report::new(checks, vec![]))
}

fn run_sampler(
    spec: &ProblemSpec,
    drift: &DriftPotential,
    dp: &DiscreteProblem,
    steady: &SteadyState,
    steps: usize,
    burn_in: usize,
    bins: usize,
) -> Result<crate::langevin::SampleStats> {
    // inset singular walls so the stability heuristic holds
    let inset = 4.0 * spec.run.dt;
    let near = |x: f64| {
        drift
            .singularities()
            .iter()
            .any(|s| (x - s).abs() < 1e-9)
    };
    let lo = if near(dp.lo()) { dp.lo() + inset } else { dp.lo() };
    let hi = if near(dp.hi()) { dp.hi() - inset } else { dp.hi() };
    let cfg = SamplerConfig {
        dt: spec.run.dt,
        steps,
        burn_in,
        seed: spec.run.seed,
        chains: spec.run.chains,
        reflection_bounds: Interval::new(lo, hi),
    };
    let samples = simulate(drift, &cfg)?;
    histogram_tv(&samples, steady, bins)
}

fn cmd_verify(spec: &ProblemSpec, json: bool, out: Option<&Path>) -> Result<ExitCode> {
    let report = run_verify(spec)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for c in &report.checks {
            println!(
                "{} {:<24} measured {:>12.4e}  tolerance {:>9.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            );
        }
        println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
    }
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

fn cmd_generate(spec: &ProblemSpec, out: &Path) -> Result<ExitCode> {
    std::fs::create_dir_all(out)?;
    let p = assemble(spec)?;
    let vq = quantum_potential(&p.drift);
    let per_domain = (spec.grid.n / p.domains.len()).max(200);

    let mut potential_rows = Vec::new();
    let mut steady_rows = Vec::new();
    for &d in &p.domains {
        let (dp, steady) = domain_grid(spec, &p.drift, d, per_domain, Bc::NoFlux)?;
        let density = steady.density();
        let margin = RESIDUAL_GRID_MARGIN;
        for j in 0..=dp.intervals() {
            let x = dp.x(j);
            if p.state.nodes().iter().any(|s| (x - s).abs() < margin) {
                continue;
            }
            potential_rows.push(vec![
                x,
                p.drift.eval(x),
                p.drift.d1(x),
                vq.field.eval(x),
            ]);
            steady_rows.push(vec![x, density.eval(x)]);
        }
    }
    let potential_path = out.join("potential.csv");
    write_csv(&potential_path, "x,U,U_prime,V_q", &potential_rows)?;
    let steady_path = out.join("steady.csv");
    write_csv(&steady_path, "x,density", &steady_rows)?;

    let top = p
        .family
        .bound_state_count()
        .map(|c| c - 1)
        .unwrap_or(spec.run.imax)
        .min(spec.run.imax);
    let mut mode_docs = Vec::new();
    for i in 0..=top {
        let state_i = eigenpair(&p.family, i)?;
        let m = mode_from_states(&p.state, &state_i)?;
        mode_docs.push(serde_json::json!({
            "n": spec.level,
            "i": i,
            "lambda": m.rate(),
            "admissible_domains": m
                .admissible_domains()
                .iter()
                .map(interval_to_json)
                .collect::<Vec<_>>(),
        }));
    }
    let modes_doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "family": { "name": p.family.name(), "params": p.family.params() },
        "level": spec.level,
        "offset": spec.offset,
        "modes": mode_docs,
    });
    let modes_path = out.join("modes.json");
    std::fs::write(&modes_path, serde_json::to_string_pretty(&modes_doc)?)?;

    for path in [&potential_path, &steady_path, &modes_path] {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

fn cmd_evolve(spec: &ProblemSpec, out: &Path) -> Result<ExitCode> {
    std::fs::create_dir_all(out)?;
    let p = assemble(spec)?;
    let domain = p.domains[0];
    let (dp, _) = domain_grid(spec, &p.drift, domain, spec.grid.n, Bc::NoFlux)?;
    let base = discrete_steady(&p.drift, &dp)?;

    let top = p
        .family
        .bound_state_count()
        .map(|c| c - 1)
        .unwrap_or(spec.run.imax)
        .min(spec.run.imax);
    let mut perturb = None;
    for i in 0..=top {
        let state_i = eigenpair(&p.family, i)?;
        let m = mode_from_states(&p.state, &state_i)?;
        if m.rate() > 0.0 && admissible_on(&m, domain) {
            perturb = Some(m);
            break;
        }
    }
    let m = perturb.ok_or_else(|| {
        FpError::InvalidConfig("no admissible decaying mode below imax".into())
    })?;
    let profile = m.profile();
    let f0: Vec<f64> = (0..dp.points())
        .map(|j| base[j] + 0.1 * profile.eval(dp.x(j)))
        .collect();
    let run = evolve_fp(&p.drift, &f0, &dp, spec.run.dt, spec.run.horizon)?;

    // thin snapshots for the csv
    let keep = 32.min(run.times.len());
    let stride = run.times.len().div_ceil(keep);
    let mut rows = Vec::new();
    for (k, t) in run.times.iter().enumerate() {
        if k % stride != 0 && k != run.times.len() - 1 {
            continue;
        }
        for j in 0..dp.points() {
            rows.push(vec![*t, dp.x(j), run.snapshots[k][j]]);
        }
    }
    let path = out.join("snapshots.csv");
    write_csv(&path, "t,x,f", &rows)?;

    let dist = |snap: &[f64]| -> f64 {
        (dp.h()
            * snap
                .iter()
                .zip(&base)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>())
        .sqrt()
    };
    println!("{}", path.display());
    println!(
        "mode (n={}, i={}) rate {:.6}; |f-f_s| first {:.3e} last {:.3e}; mass drift {:.2e}",
        m.level(),
        m.index(),
        m.rate(),
        dist(&run.snapshots[0]),
        dist(run.snapshots.last().unwrap()),
        (run.mass_history.last().unwrap() - run.mass_history[0]).abs()
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

fn cmd_sample(
    spec: &ProblemSpec,
    out: &Path,
    steps: usize,
    burn_in: usize,
    bins: usize,
) -> Result<ExitCode> {
    if steps <= burn_in {
        return Err(FpError::InvalidConfig(format!(
            "steps ({steps}) must exceed burn_in ({burn_in})"
        )));
    }
    std::fs::create_dir_all(out)?;
    let p = assemble(spec)?;
    let domain = p.domains[0];
    let (dp, steady) = domain_grid(spec, &p.drift, domain, spec.grid.n, Bc::NoFlux)?;
    let stats = run_sampler(spec, &p.drift, &dp, &steady, steps, burn_in, bins)?;
    let n: u64 = stats.histogram.counts.iter().sum();
    let mut rows = Vec::new();
    for (j, count) in stats.histogram.counts.iter().enumerate() {
        let center = 0.5 * (stats.histogram.edges[j] + stats.histogram.edges[j + 1]);
        rows.push(vec![
            center,
            *count as f64,
            stats.expected[j] * n as f64,
        ]);
    }
    let path = out.join("histogram.csv");
    write_csv(&path, "bin_center,count,expected", &rows)?;
    println!("{}", path.display());
    println!(
        "tv_distance {:.4}  n_effective {:.0}",
        stats.tv_distance, stats.n_effective
    );
    Ok(ExitCode::SUCCESS)
}
