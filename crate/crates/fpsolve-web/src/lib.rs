//! Browser demo bindings: a thin JSON layer over the solvable Fokker-Planck
//! construction, compiled to wasm for the static page in `www/`.
//!
//! Every exported function returns a JSON string so the page stays free of
//! bindgen-generated classes; the `*_payload` functions hold the actual
//! logic and are unit-tested on the host target.

use std::collections::BTreeMap;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fpsolve::catalog::{eigenpair, family_infos, make_family, SolvableFamily};
use fpsolve::field::{Interval, ScalarField};
use fpsolve::langevin::{histogram_tv, simulate, SamplerConfig};
use fpsolve::solutions::{mode, nodal_domains, steady_state};
use fpsolve::susy::{drift_from_state, quantum_potential};

const PLOT_EPS: f64 = 1e-7;

#[derive(Serialize)]
struct CatalogDoc {
    families: Vec<FamilyDoc>,
}

#[derive(Serialize)]
struct FamilyDoc {
    name: String,
    domain: String,
    bound_states: String,
    params: Vec<ParamDoc>,
    defaults: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct ParamDoc {
    name: String,
    range: String,
}

#[derive(Serialize)]
struct ProblemDoc {
    x: Vec<f64>,
    u: Vec<Option<f64>>,
    vq: Vec<Option<f64>>,
    density: Vec<Option<f64>>,
    window: (f64, f64),
    singularities: Vec<f64>,
    level: usize,
    modes: Vec<ModeRow>,
}

#[derive(Serialize)]
struct ModeRow {
    i: usize,
    lambda: f64,
    admissible: bool,
}

#[derive(Serialize)]
struct ModeDoc {
    x: Vec<f64>,
    profile: Vec<f64>,
    lambda: f64,
    admissible: bool,
    window: (f64, f64),
}

#[derive(Serialize)]
struct HistogramDoc {
    centers: Vec<f64>,
    observed: Vec<f64>,
    expected: Vec<f64>,
    tv: f64,
    samples: usize,
}

fn parse_family(name: &str, params_json: &str) -> Result<SolvableFamily, String> {
    let params: BTreeMap<String, f64> =
        serde_json::from_str(params_json).map_err(|e| format!("bad params: {e}"))?;
    make_family(name, &params).map_err(|e| e.to_string())
}

fn defaults_for(name: &str) -> BTreeMap<String, f64> {
    match name {
        "harmonic" => [("omega".to_string(), 1.0)].into(),
        "infinite_well" => [("length".to_string(), std::f64::consts::PI)].into(),
        "poschl_teller" => [("lambda".to_string(), 3.0)].into(),
        "morse" => [("depth".to_string(), 12.5), ("width".to_string(), 1.0)].into(),
        _ => BTreeMap::new(),
    }
}

pub fn catalog_payload() -> String {
    let families = family_infos()
        .into_iter()
        .map(|f| FamilyDoc {
            name: f.name.to_string(),
            domain: f.domain.to_string(),
            bound_states: f.bound_states.to_string(),
            params: f
                .params
                .iter()
                .map(|p| ParamDoc {
                    name: p.name.to_string(),
                    range: p.range.to_string(),
                })
                .collect(),
            defaults: defaults_for(f.name),
        })
        .collect();
    serde_json::to_string(&CatalogDoc { families }).expect("serialization")
}

fn plot_window(family: &SolvableFamily, level: usize, top_i: usize) -> Result<Interval, String> {
    let mut window = eigenpair(family, level)
        .map_err(|e| e.to_string())?
        .support_window(PLOT_EPS);
    let cap = family.bound_state_count().map(|c| c - 1).unwrap_or(top_i);
    for i in 0..=top_i.min(cap) {
        let w = eigenpair(family, i)
            .map_err(|e| e.to_string())?
            .support_window(PLOT_EPS);
        window = Interval::new(window.lo.min(w.lo), window.hi.max(w.hi));
    }
    window
        .intersect(&family.domain())
        .ok_or_else(|| "empty plot window".to_string())
}

pub fn problem_payload(
    name: &str,
    params_json: &str,
    level: usize,
    points: usize,
) -> Result<String, String> {
    let family = parse_family(name, params_json)?;
    let state = eigenpair(&family, level).map_err(|e| e.to_string())?;
    let drift = drift_from_state(&state, 0.0);
    let vq = quantum_potential(&drift);
    let imax = family.bound_state_count().map(|c| c - 1).unwrap_or(8).min(8);
    let window = plot_window(&family, level, imax)?;
    let points = points.clamp(64, 4096);

    let domains = nodal_domains(&drift);
    let steadies: Vec<_> = domains
        .iter()
        .map(|d| steady_state(&drift, *d).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;

    let mut xs = Vec::with_capacity(points);
    let mut us = Vec::with_capacity(points);
    let mut vqs = Vec::with_capacity(points);
    let mut dens = Vec::with_capacity(points);
    for j in 0..points {
        let x = window.lo + window.len() * j as f64 / (points - 1) as f64;
        xs.push(x);
        let near_pole = state.nodes().iter().any(|s| (x - s).abs() < 1e-3);
        if near_pole {
            us.push(None);
            vqs.push(None);
        } else {
            let u = drift.eval(x);
            let q = vq.field.eval(x);
            us.push(u.is_finite().then_some(u));
            vqs.push(q.is_finite().then_some(q));
        }
        let rho = domains
            .iter()
            .zip(&steadies)
            .find(|(d, _)| d.contains(x))
            .map(|(_, s)| s.density().eval(x));
        dens.push(rho.filter(|v| v.is_finite()));
    }

    let mut modes = Vec::new();
    for i in 0..=imax {
        let m = mode(&family, level, i).map_err(|e| e.to_string())?;
        modes.push(ModeRow {
            i,
            lambda: m.rate(),
            admissible: m.is_admissible_somewhere(),
        });
    }

    serde_json::to_string(&ProblemDoc {
        x: xs,
        u: us,
        vq: vqs,
        density: dens,
        window: (window.lo, window.hi),
        singularities: state.nodes().to_vec(),
        level,
        modes,
    })
    .map_err(|e| e.to_string())
}

pub fn mode_payload(
    name: &str,
    params_json: &str,
    level: usize,
    index: usize,
    points: usize,
) -> Result<String, String> {
    let family = parse_family(name, params_json)?;
    let m = mode(&family, level, index).map_err(|e| e.to_string())?;
    let window = plot_window(&family, level, index.max(level))?;
    let points = points.clamp(64, 4096);
    let profile = m.profile();
    let mut xs = Vec::with_capacity(points);
    let mut ps = Vec::with_capacity(points);
    for j in 0..points {
        let x = window.lo + window.len() * j as f64 / (points - 1) as f64;
        xs.push(x);
        ps.push(profile.eval(x));
    }
    serde_json::to_string(&ModeDoc {
        x: xs,
        profile: ps,
        lambda: m.rate(),
        admissible: m.is_admissible_somewhere(),
        window: (window.lo, window.hi),
    })
    .map_err(|e| e.to_string())
}

pub fn histogram_payload(
    name: &str,
    params_json: &str,
    level: usize,
    seed: u64,
    steps: usize,
    bins: usize,
) -> Result<String, String> {
    let family = parse_family(name, params_json)?;
    let state = eigenpair(&family, level).map_err(|e| e.to_string())?;
    let drift = drift_from_state(&state, 0.0);
    let domain = nodal_domains(&drift)[0];
    let steady = steady_state(&drift, domain).map_err(|e| e.to_string())?;
    let dp = fpsolve::oracle::build_grid(
        domain,
        400,
        &steady.density(),
        1e-12,
        fpsolve::oracle::Bc::NoFlux,
    )
    .map_err(|e| e.to_string())?;
    let dt = 1e-3;
    let near = |x: f64| drift.singularities().iter().any(|s| (x - s).abs() < 1e-9);
    let lo = if near(dp.lo()) { dp.lo() + 4.0 * dt } else { dp.lo() };
    let hi = if near(dp.hi()) { dp.hi() - 4.0 * dt } else { dp.hi() };
    let steps = steps.clamp(120_000, 2_000_000);
    let cfg = SamplerConfig {
        dt,
        steps,
        burn_in: steps / 20,
        seed,
        chains: 2,
        reflection_bounds: Interval::new(lo, hi),
    };
    let samples = simulate(&drift, &cfg).map_err(|e| e.to_string())?;
    let n = samples.positions.len();
    let stats =
        histogram_tv(&samples, &steady, bins.clamp(20, 400)).map_err(|e| e.to_string())?;
    let width = (hi - lo) / stats.histogram.counts.len() as f64;
    let centers: Vec<f64> = (0..stats.histogram.counts.len())
        .map(|j| 0.5 * (stats.histogram.edges[j] + stats.histogram.edges[j + 1]))
        .collect();
    let observed: Vec<f64> = stats
        .histogram
        .counts
        .iter()
        .map(|c| *c as f64 / (n as f64 * width))
        .collect();
    let expected: Vec<f64> = stats.expected.iter().map(|p| p / width).collect();
    serde_json::to_string(&HistogramDoc {
        centers,
        observed,
        expected,
        tv: stats.tv_distance,
        samples: n,
    })
    .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// wasm exports
// ---------------------------------------------------------------------------

#[wasm_bindgen]
pub fn catalog() -> String {
    catalog_payload()
}

#[wasm_bindgen]
pub fn problem(
    name: &str,
    params_json: &str,
    level: usize,
    points: usize,
) -> Result<String, JsValue> {
    problem_payload(name, params_json, level, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mode_profile(
    name: &str,
    params_json: &str,
    level: usize,
    index: usize,
    points: usize,
) -> Result<String, JsValue> {
    mode_payload(name, params_json, level, index, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn langevin_histogram(
    name: &str,
    params_json: &str,
    level: usize,
    seed: u64,
    steps: usize,
    bins: usize,
) -> Result<String, JsValue> {
    histogram_payload(name, params_json, level, seed, steps, bins)
        .map_err(|e| JsValue::from_str(&e))
}
