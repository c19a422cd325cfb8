//! Acceptance gate: every release-blocking property of the construction,
//! one test per criterion, each printing a single pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use fpsolve::catalog::{eigenpair, make_family, Eigenstate, SolvableFamily};
use fpsolve::error::FpError;
use fpsolve::field::{Affine, Constant, Interval, ScalarField};
use fpsolve::langevin::{histogram_tv, simulate, SamplerConfig};
use fpsolve::oracle::{
    build_grid, discrete_steady, eigensolve_schrodinger, evolve_fp, fit_decay_rate,
    fp_residual, Bc,
};
use fpsolve::solutions::{mode, steady_state};
use fpsolve::susy::{
    drift_from_state, factorization_check, quantum_potential, riccati_residual_on,
    superpotential_of_state, DriftPotential,
};

fn family(name: &str, params: &[(&str, f64)]) -> SolvableFamily {
    let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make_family(name, &map).unwrap()
}

fn all_families() -> Vec<SolvableFamily> {
    vec![
        family("harmonic", &[("omega", 1.0)]),
        family("infinite_well", &[("length", std::f64::consts::PI)]),
        family("poschl_teller", &[("lambda", 5.0)]),
        family("morse", &[("depth", 12.5), ("width", 1.0)]),
    ]
}

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn state_window(state: &Eigenstate) -> Interval {
    state
        .support_window(1e-12)
        .intersect(&state.family().domain())
        .unwrap()
}

#[test]
fn criterion_1_riccati_identity() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut states = 0;
    for f in all_families() {
        let v = f.potential();
        for n in 0..f.bound_state_count().unwrap_or(5).min(5) {
            let state = eigenpair(&f, n).unwrap();
            let w = superpotential_of_state(&state);
            let rep =
                riccati_residual_on(&w, &v, state.energy(), state_window(&state), 2001, 1e-3)
                    .unwrap();
            worst = worst.max(rep.residual_sup);
            states += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "1 (riccati identity)",
        worst <= 1e-8 && elapsed < 1.0,
        &format!("max residual {worst:.3e} over {states} states in {elapsed:.2} s (tol 1e-8, budget 1 s)"),
    );
}

#[test]
fn criterion_2_quantum_potential_consistency() {
    let mut worst: f64 = 0.0;
    for f in all_families() {
        let v = f.potential();
        for n in 0..f.bound_state_count().unwrap_or(5).min(5) {
            let state = eigenpair(&f, n).unwrap();
            let u = drift_from_state(&state, 0.0);
            let vq = quantum_potential(&u);
            let window = state_window(&state);
            for j in 0..=2000 {
                let x = window.lo + 1e-3 + (window.len() - 2e-3) * j as f64 / 2000.0;
                if state.nodes().iter().any(|s| (x - s).abs() < 1e-3) {
                    continue;
                }
                let diff = (vq.field.eval(x) - (v.eval(x) - state.energy())).abs();
                assert!(diff.is_finite(), "{} n={n}: V_q non-finite at x={x}", f.name());
                worst = worst.max(diff);
            }
        }
    }
    verdict(
        "2 (quantum potential consistency)",
        worst <= 1e-9,
        &format!("max |V_q(U_n) - (V_s - E_n)| = {worst:.3e} (tol 1e-9)"),
    );
}

#[test]
fn criterion_3_factorization_zero_mode() {
    // harmonic and Poschl-Teller ground-state drifts at N = 4000,
    // with the O(h^2) order confirmed by halving
    let harmonic = eigenpair(&family("harmonic", &[("omega", 1.0)]), 0).unwrap();
    let pt = eigenpair(&family("poschl_teller", &[("lambda", 1.0)]), 0).unwrap();
    let cases = [
        (drift_from_state(&harmonic, 0.0), -8.0, 8.0, "harmonic"),
        (drift_from_state(&pt, 0.0), -10.0, 10.0, "poschl_teller"),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (u, lo, hi, label) in &cases {
        let grid = build_grid(
            Interval::new(*lo, *hi),
            4000,
            &Constant::everywhere(1.0),
            1e-12,
            Bc::Dirichlet,
        )
        .unwrap();
        let coarse = factorization_check(u, &grid).unwrap();
        let fine = factorization_check(u, &grid.refined()).unwrap();
        let ratio = coarse / fine;
        let ok = coarse <= 1e-5 && (3.4..=4.6).contains(&ratio);
        pass &= ok;
        details.push(format!("{label}: defect {coarse:.2e}, halving ratio {ratio:.2}"));
    }
    verdict(
        "3 (factorization zero mode)",
        pass,
        &format!("{} (tol 1e-5, ratio 4 +- 15%)", details.join("; ")),
    );
}

#[test]
fn criterion_4_main_result_modes() {
    // pointwise L_FP(psi_n psi_i) = -(E_i - E_n) psi_n psi_i on admissible
    // domains; Morse stays out of the gate per the catalog's extended status
    let gate_families = [
        family("harmonic", &[("omega", 1.0)]),
        family("infinite_well", &[("length", std::f64::consts::PI)]),
        family("poschl_teller", &[("lambda", 4.0)]),
    ];
    let mut worst: f64 = 0.0;
    let mut modes_checked = 0;
    for f in &gate_families {
        let top_n = f.bound_state_count().unwrap_or(4).min(4);
        let top_i = f.bound_state_count().unwrap_or(7).min(7);
        for n in 0..top_n {
            let state = eigenpair(f, n).unwrap();
            let u = drift_from_state(&state, 0.0);
            for i in 0..top_i {
                let m = mode(f, n, i).unwrap();
                for d in m.admissible_domains() {
                    let steady = steady_state(&u, *d).unwrap();
                    let dp =
                        build_grid(*d, 1000, &steady.density(), 1e-12, Bc::NoFlux).unwrap();
                    worst = worst.max(fp_residual(&u, &m, &dp).unwrap());
                    modes_checked += 1;
                }
            }
        }
    }
    verdict(
        "4 (main-result modes)",
        worst <= 1e-6,
        &format!("max FP residual {worst:.3e} over {modes_checked} admissible (mode, domain) pairs (tol 1e-6)"),
    );
}

#[test]
fn criterion_5_dynamical_rates() {
    let mut pass = true;
    let mut details = Vec::new();
    for (f, expected, label) in [
        (family("harmonic", &[("omega", 1.0)]), 1.0, "harmonic"),
        (
            family("infinite_well", &[("length", std::f64::consts::PI)]),
            1.5,
            "well",
        ),
    ] {
        let start = Instant::now();
        let state = eigenpair(&f, 0).unwrap();
        let u = drift_from_state(&state, 0.0);
        let steady = steady_state(&u, f.domain()).unwrap();
        let dp = build_grid(f.domain(), 2000, &steady.density(), 1e-12, Bc::NoFlux).unwrap();
        let base = discrete_steady(&u, &dp).unwrap();
        let m = mode(&f, 0, 1).unwrap();
        let profile = m.profile();
        let f0: Vec<f64> = (0..dp.points())
            .map(|j| base[j] + 0.1 * profile.eval(dp.x(j)))
            .collect();
        let run = evolve_fp(&u, &f0, &dp, 1e-3, 8.0).unwrap();
        let (rate, r2) = fit_decay_rate(&run, &base).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let ok =
            (rate - expected).abs() <= 0.01 * expected && r2 >= 0.999 && elapsed < 10.0;
        pass &= ok;
        details.push(format!(
            "{label}: rate {rate:.5} (expect {expected}), r2 {r2:.6}, {elapsed:.1} s"
        ));
    }
    verdict(
        "5 (dynamical rates)",
        pass,
        &format!("{} (tol 1%, r2 >= 0.999, budget 10 s each)", details.join("; ")),
    );
}

#[test]
fn criterion_6_steady_state_two_ways() {
    let start = Instant::now();
    let f = family("harmonic", &[("omega", 1.0)]);
    let state = eigenpair(&f, 0).unwrap();
    let u = drift_from_state(&state, 0.0);
    let steady = steady_state(&u, f.domain()).unwrap();
    let dp = build_grid(f.domain(), 2000, &steady.density(), 1e-12, Bc::NoFlux).unwrap();

    // long-time evolution from a generic positive start, T = 20/gap, gap = 1
    let mut f0: Vec<f64> = (0..dp.points())
        .map(|j| {
            let x = dp.x(j);
            (-(x - 1.5) * (x - 1.5) * 4.0).exp() + 0.01
        })
        .collect();
    let mass: f64 = dp.h() * f0.iter().sum::<f64>();
    f0.iter_mut().for_each(|v| *v /= mass);
    let run = evolve_fp(&u, &f0, &dp, 2e-3, 20.0).unwrap();
    let last = run.snapshots.last().unwrap();
    let density = steady.density();
    let l1: f64 = dp.h()
        * (0..dp.points())
            .map(|j| (last[j] - density.eval(dp.x(j))).abs())
            .sum::<f64>();

    // Langevin histogram at 1e6 kept samples, 100 bins, fixed seed
    let cfg = SamplerConfig {
        dt: 1e-3,
        steps: 130_000,
        burn_in: 5_000,
        seed: 42,
        chains: 8,
        reflection_bounds: Interval::new(dp.lo(), dp.hi()),
    };
    let samples = simulate(&u, &cfg).unwrap();
    let kept = samples.positions.len();
    let stats = histogram_tv(&samples, &steady, 100).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = l1 <= 1e-3 && stats.tv_distance <= 0.05 && kept == 1_000_000 && elapsed < 30.0;
    verdict(
        "6 (steady state, PDE and sampler)",
        pass,
        &format!(
            "L1 after T=20: {l1:.2e} (tol 1e-3); TV at 1e6 samples: {:.4} (tol 0.05); {elapsed:.1} s",
            stats.tv_distance
        ),
    );
}

#[test]
fn criterion_7_excited_generator_structure() {
    // harmonic n=1 on the right nodal domain: Dirichlet oracle spectrum is
    // {E_i - E_1 : odd i}, nothing below -1e-6, admissibility picks odd i
    let f = family("harmonic", &[("omega", 1.0)]);
    let state = eigenpair(&f, 1).unwrap();
    let u = drift_from_state(&state, 0.0);
    let right = Interval::new(0.0, f64::INFINITY);
    let steady = steady_state(&u, right).unwrap();
    let dp = build_grid(right, 4000, &steady.density(), 1e-12, Bc::Dirichlet).unwrap();
    let v = f.potential();
    let energy = state.energy();
    let shifted = fpsolve::field::ClosureField::new(f.domain(), move |x, k| {
        let raw = v.deriv(x, k);
        if k == 0 {
            raw - energy
        } else {
            raw
        }
    });
    let spectrum = eigensolve_schrodinger(&shifted, &dp, 4).unwrap();
    let expected = [0.0, 2.0, 4.0, 6.0]; // E_{1,3,5,7} - E_1
    let mut spec_ok = spectrum[0].0 >= -1e-6;
    let mut spec_detail = Vec::new();
    for (k, want) in expected.iter().enumerate() {
        let got = spectrum[k].0;
        spec_ok &= (got - want).abs() <= 1e-3;
        spec_detail.push(format!("{got:.5}"));
    }
    let mut admissible_ok = true;
    for i in 0..=8usize {
        let m = mode(&f, 1, i).unwrap();
        let on_right = m
            .admissible_domains()
            .iter()
            .any(|d| d.approx_eq(&right, 1e-9));
        admissible_ok &= on_right == (i % 2 == 1);
    }
    verdict(
        "7 (excited-generator structure)",
        spec_ok && admissible_ok,
        &format!(
            "oracle spectrum [{}] vs {{0,2,4,6}} (tol 1e-3, floor -1e-6); odd-i admissibility {}",
            spec_detail.join(", "),
            if admissible_ok { "exact" } else { "broken" }
        ),
    );
}

#[test]
fn criterion_8_sign_correction_regression() {
    // the implemented U_n = U_0 - log|psi_n| normalizes for every catalog
    // state; the printed "+" variant must fail for harmonic n=0
    let mut normalizable = 0;
    let mut pass = true;
    for f in all_families() {
        for n in 0..f.bound_state_count().unwrap_or(5).min(5) {
            let state = eigenpair(&f, n).unwrap();
            let u = drift_from_state(&state, 0.0);
            for d in fpsolve::solutions::nodal_domains(&u) {
                match steady_state(&u, d) {
                    Ok(_) => normalizable += 1,
                    Err(e) => {
                        pass = false;
                        println!("  unexpected failure {} n={n} on {d:?}: {e}", f.name());
                    }
                }
            }
        }
    }
    // flipped sign: U_plus = 2 U_0 - U_minus = U_0 + log|psi_0|
    let h0 = eigenpair(&family("harmonic", &[("omega", 1.0)]), 0).unwrap();
    let u_minus = drift_from_state(&h0, 0.0);
    let u_plus = DriftPotential::from_field(
        Arc::new(Affine::new(u_minus.field(), -1.0, 0.0)),
        vec![],
    );
    let flipped = steady_state(&u_plus, Interval::whole_line());
    let flipped_rejected = matches!(flipped, Err(FpError::NonNormalizable(_)));
    pass &= flipped_rejected;
    verdict(
        "8 (sign-correction regression)",
        pass,
        &format!(
            "{normalizable} nodal-domain steady states normalized; printed '+' sign rejected: {flipped_rejected}"
        ),
    );
}
