//! Cross-module checks of the evolution oracle against the closed forms:
//! stationarity, mass conservation, decay-rate fits, residuals, and the
//! Dirichlet spectra of nodal domains.

use std::collections::BTreeMap;

use fpsolve::catalog::{eigenpair, make_family, SolvableFamily};
use fpsolve::error::FpError;
use fpsolve::field::{ClosureField, Interval, ScalarField};
use fpsolve::oracle::{
    build_grid, discrete_steady, eigensolve_schrodinger, evolve_fp, fit_decay_rate,
    fp_residual, Bc, EvolutionResult,
};
use fpsolve::solutions::{mode, nodal_domains, steady_state};
use fpsolve::susy::drift_from_state;

fn family(name: &str, params: &[(&str, f64)]) -> SolvableFamily {
    let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make_family(name, &map).unwrap()
}

fn ou_setup() -> (
    fpsolve::susy::DriftPotential,
    fpsolve::oracle::DiscreteProblem,
    fpsolve::solutions::SteadyState,
) {
    let f = family("harmonic", &[("omega", 1.0)]);
    let state = eigenpair(&f, 0).unwrap();
    let u = drift_from_state(&state, 0.0);
    let steady = steady_state(&u, Interval::whole_line()).unwrap();
    let dp = build_grid(
        Interval::whole_line(),
        2000,
        &steady.density(),
        1e-12,
        Bc::NoFlux,
    )
    .unwrap();
    (u, dp, steady)
}

#[test]
fn ou_steady_density_is_stationary() {
    let (u, dp, steady) = ou_setup();
    let density = steady.density();
    let f0: Vec<f64> = (0..dp.points()).map(|j| density.eval(dp.x(j))).collect();
    let run = evolve_fp(&u, &f0, &dp, 1e-3, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    for snap in &run.snapshots {
        for (a, b) in snap.iter().zip(&f0) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-8, "stationarity defect {worst}");
}

#[test]
fn ou_perturbation_decays_at_the_level_spacing() {
    let (u, dp, _) = ou_setup();
    let f = family("harmonic", &[("omega", 1.0)]);
    let m = mode(&f, 0, 1).unwrap();
    let base = discrete_steady(&u, &dp).unwrap();
    let profile = m.profile();
    let f0: Vec<f64> = (0..dp.points())
        .map(|j| base[j] + 0.1 * profile.eval(dp.x(j)))
        .collect();
    let run = evolve_fp(&u, &f0, &dp, 1e-3, 8.0).unwrap();
    let (rate, r2) = fit_decay_rate(&run, &base).unwrap();
    assert!((rate - 1.0).abs() <= 0.01, "rate {rate}");
    assert!(r2 >= 0.999, "r2 {r2}");
}

#[test]
fn mass_is_conserved_under_no_flux() {
    let (u, dp, _) = ou_setup();
    let mut f0: Vec<f64> = (0..dp.points())
        .map(|j| {
            let x = dp.x(j);
            (-(x - 0.8) * (x - 0.8) * 14.0).exp()
        })
        .collect();
    let mass: f64 = dp.h() * f0.iter().sum::<f64>();
    f0.iter_mut().for_each(|v| *v /= mass);
    let run = evolve_fp(&u, &f0, &dp, 1e-3, 3.0).unwrap();
    for m in &run.mass_history {
        assert!(
            (m - run.mass_history[0]).abs() <= 1e-10 * run.mass_history[0].abs(),
            "mass drifted to {m}"
        );
    }
}

#[test]
fn crank_nicolson_stays_finite_at_ten_h() {
    let (u, dp, steady) = ou_setup();
    let density = steady.density();
    let f0: Vec<f64> = (0..dp.points())
        .map(|j| density.eval(dp.x(j)) + 0.3 * (-dp.x(j).powi(2)).exp())
        .collect();
    let dt = 10.0 * dp.h();
    let run = evolve_fp(&u, &f0, &dp, dt, 200.0 * dt).unwrap();
    for snap in &run.snapshots {
        assert!(snap.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn discrete_steady_matches_analytic_for_quadratic_drift() {
    let (u, dp, steady) = ou_setup();
    let base = discrete_steady(&u, &dp).unwrap();
    let density = steady.density();
    let mut worst: f64 = 0.0;
    for j in 0..dp.points() {
        worst = worst.max((base[j] - density.eval(dp.x(j))).abs());
    }
    // midpoint face drifts are exact for a quadratic potential; only the
    // grid-mass vs integral normalization separates the two
    assert!(worst <= 1e-10, "discrete steady defect {worst}");
}

#[test]
fn fp_residual_spec_examples() {
    let f = family("harmonic", &[("omega", 1.0)]);
    let state0 = eigenpair(&f, 0).unwrap();
    let u0 = drift_from_state(&state0, 0.0);
    let m01 = mode(&f, 0, 1).unwrap();
    let dp = build_grid(
        Interval::new(-6.0, 6.0),
        2000,
        &fpsolve::field::Constant::everywhere(1.0),
        1e-12,
        Bc::NoFlux,
    )
    .unwrap();
    let r = fp_residual(&u0, &m01, &dp).unwrap();
    assert!(r <= 1e-9, "harmonic n=0 i=1 residual {r}");

    // excited generator on its right nodal domain
    let state1 = eigenpair(&f, 1).unwrap();
    let u1 = drift_from_state(&state1, 0.0);
    let m13 = mode(&f, 1, 3).unwrap();
    let dph = build_grid(
        Interval::new(0.0, 6.6),
        2000,
        &fpsolve::field::Constant::everywhere(1.0),
        1e-12,
        Bc::NoFlux,
    )
    .unwrap();
    let r13 = fp_residual(&u1, &m13, &dph).unwrap();
    assert!(r13 <= 1e-9, "harmonic n=1 i=3 residual {r13}");

    // negative control: a 10% rate offset shows up at the 10% level
    let wrong = mode(&f, 0, 1).unwrap().with_rate(1.1);
    let rw = fp_residual(&u0, &wrong, &dp).unwrap();
    assert!((0.05..0.2).contains(&rw), "control residual {rw}");

    // interior singularity is refused
    let bad = build_grid(
        Interval::new(-6.0, 6.0),
        500,
        &fpsolve::field::Constant::everywhere(1.0),
        1e-12,
        Bc::NoFlux,
    )
    .unwrap();
    assert!(matches!(
        fp_residual(&u1, &m13, &bad),
        Err(FpError::SingularityInsideGrid(_))
    ));
}

#[test]
fn fp_identity_across_catalog_levels() {
    // pointwise FP identity for every admissible (n <= 3, i <= 6) mode
    for (f, label) in [
        (family("harmonic", &[("omega", 1.0)]), "harmonic"),
        (
            family("infinite_well", &[("length", std::f64::consts::PI)]),
            "well",
        ),
        (family("poschl_teller", &[("lambda", 4.0)]), "pt"),
        (family("morse", &[("depth", 24.5), ("width", 1.0)]), "morse"),
    ] {
        let top_n = f.bound_state_count().unwrap_or(4).min(4);
        for n in 0..top_n {
            let state = eigenpair(&f, n).unwrap();
            let u = drift_from_state(&state, 0.0);
            let top_i = f.bound_state_count().unwrap_or(7).min(7);
            for i in 0..top_i {
                let m = mode(&f, n, i).unwrap();
                for d in m.admissible_domains() {
                    let steady = steady_state(&u, *d).unwrap();
                    let dp =
                        build_grid(*d, 1000, &steady.density(), 1e-12, Bc::NoFlux).unwrap();
                    let r = fp_residual(&u, &m, &dp).unwrap();
                    assert!(r <= 1e-6, "{label} n={n} i={i} domain {d:?}: residual {r}");
                }
            }
        }
    }
}

#[test]
fn fit_decay_rate_error_paths() {
    let (u, dp, _) = ou_setup();
    // steady start: nothing decays
    let base = discrete_steady(&u, &dp).unwrap();
    let run = evolve_fp(&u, &base, &dp, 1e-3, 1.0).unwrap();
    assert!(matches!(
        fit_decay_rate(&run, &base),
        Err(FpError::FitWindowEmpty)
    ));

    // synthetic exact exponential recovers its rate
    let n = 64;
    let shape: Vec<f64> = (0..n).map(|j| ((j as f64) * 0.1).sin()).collect();
    let times: Vec<f64> = (0..80).map(|k| 0.2 * k as f64).collect();
    let snapshots: Vec<Vec<f64>> = times
        .iter()
        .map(|t| shape.iter().map(|s| s * (-1.7 * t).exp()).collect())
        .collect();
    let synth = EvolutionResult {
        times: times.clone(),
        snapshots,
        mass_history: vec![0.0; times.len()],
        h: 0.1,
    };
    let (rate, r2) = fit_decay_rate(&synth, &vec![0.0; n]).unwrap();
    assert!((rate - 1.7).abs() < 1e-9, "rate {rate}");
    assert!(r2 > 0.999999);

    // a distance that dips then grows past its start is not a decay
    let bad_norms = [1.0, 0.005, 0.004, 2.0];
    let snapshots: Vec<Vec<f64>> = bad_norms
        .iter()
        .map(|a| shape.iter().map(|s| s * a).collect())
        .collect();
    let bad = EvolutionResult {
        times: (0..4).map(|k| k as f64).collect(),
        snapshots: snapshots
            .into_iter()
            .cycle()
            .take(12)
            .collect::<Vec<_>>(),
        mass_history: vec![0.0; 12],
        h: 0.1,
    };
    assert!(matches!(
        fit_decay_rate(&bad, &vec![0.0; n]),
        Err(FpError::NonMonotoneDecay)
    ));
}

#[test]
fn nodal_domain_dirichlet_spectra_match_admissible_rates() {
    // for each catalog family and n <= 2: the Dirichlet oracle on a nodal
    // domain reproduces every admissible rate and shows no negative level
    for (f, label) in [
        (family("harmonic", &[("omega", 1.0)]), "harmonic"),
        (
            family("infinite_well", &[("length", std::f64::consts::PI)]),
            "well",
        ),
        (family("poschl_teller", &[("lambda", 3.0)]), "pt"),
        (family("morse", &[("depth", 12.5), ("width", 1.0)]), "morse"),
    ] {
        let top_n = f.bound_state_count().unwrap_or(3).min(3);
        for n in 0..top_n {
            let state = eigenpair(&f, n).unwrap();
            let u = drift_from_state(&state, 0.0);
            let domains = nodal_domains(&u);
            let d = domains[0];
            let top_i = f.bound_state_count().unwrap_or(6).min(6);

            // the window must hold the shallowest state involved, not just
            // the generator's density
            let mut window = state.support_window(1e-12);
            for i in 0..top_i {
                let w = eigenpair(&f, i).unwrap().support_window(1e-12);
                window = Interval::new(window.lo.min(w.lo), window.hi.max(w.hi));
            }
            let grid_iv = window
                .intersect(&d)
                .expect("support always meets the nodal domain");
            let dp = build_grid(
                grid_iv,
                4000,
                &fpsolve::field::Constant::everywhere(1.0),
                1e-12,
                Bc::Dirichlet,
            )
            .unwrap();
            let mut admissible: Vec<f64> = Vec::new();
            for i in 0..top_i {
                let m = mode(&f, n, i).unwrap();
                let on_d = m
                    .admissible_domains()
                    .iter()
                    .any(|a| a.approx_eq(&d, 1e-9));
                if on_d {
                    admissible.push(m.rate());
                }
            }
            assert!(!admissible.is_empty(), "{label} n={n}: no admissible modes");

            let v = f.potential();
            let energy = state.energy();
            let shifted = ClosureField::new(f.domain(), move |x, k| {
                let raw = v.deriv(x, k);
                if k == 0 {
                    raw - energy
                } else {
                    raw
                }
            });
            let k = (admissible.len() + 3).min(dp.points() / 4);
            let spectrum = eigensolve_schrodinger(&shifted, &dp, k).unwrap();
            // h-extrapolate the bottom level to strip the O(h^2) bias before
            // testing the no-growing-mode bound
            let fine = eigensolve_schrodinger(&shifted, &dp.refined(), 1).unwrap();
            let bottom = (4.0 * fine[0].0 - spectrum[0].0) / 3.0;
            assert!(
                bottom >= -1e-6,
                "{label} n={n}: negative level {bottom} (grid {}, refined {})",
                spectrum[0].0,
                fine[0].0
            );
            for lam in &admissible {
                let hit = spectrum
                    .iter()
                    .map(|(e, _)| (e - lam).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    hit <= 1e-3,
                    "{label} n={n}: admissible rate {lam} missing (closest {hit})"
                );
            }
        }
    }
}

#[test]
fn closed_form_energies_match_the_eigensolver() {
    // first five levels per family, 1e-4 absolute
    let cases = [
        ("harmonic", vec![("omega", 1.0)], -10.0, 10.0, 3000),
        ("infinite_well", vec![("length", std::f64::consts::PI)], 0.0, std::f64::consts::PI, 2000),
        ("poschl_teller", vec![("lambda", 5.0)], -12.0, 12.0, 6000),
        ("morse", vec![("depth", 12.5), ("width", 1.0)], -3.0, 33.0, 12000),
    ];
    for (name, params, lo, hi, n) in cases {
        let f = family(name, &params);
        let dp = build_grid(
            Interval::new(lo, hi),
            n,
            &fpsolve::field::Constant::everywhere(1.0),
            1e-12,
            Bc::Dirichlet,
        )
        .unwrap();
        let pairs = eigensolve_schrodinger(&f.potential(), &dp, 5).unwrap();
        for i in 0..5 {
            let exact = f.energy(i).unwrap();
            assert!(
                (pairs[i].0 - exact).abs() <= 1e-4,
                "{name} level {i}: {} vs {exact}",
                pairs[i].0
            );
        }
    }
}

#[test]
fn long_time_evolution_reaches_the_steady_density() {
    let (u, dp, steady) = ou_setup();
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
    assert!(l1 <= 1e-3, "L1 distance {l1}");
}
