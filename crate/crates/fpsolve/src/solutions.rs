//! Closed-form solutions of the generated Fokker-Planck problems: steady
//! states, relaxation modes with their decay rates, and the nodal-domain
//! bookkeeping needed when the generating state is excited.
//!
//! A level-n generator with eigenvalues E_i yields modes
//! f_i(x, t) = psi_n(x) psi_i(x) e^{-(E_i - E_n) t}; the i = n member is the
//! steady state e^{-2U}/Z restricted to a nodal domain.

use std::sync::Arc;

use crate::catalog::{eigenpair, Eigenstate, SolvableFamily};
use crate::error::{FpError, Result};
use crate::field::{Affine, FieldRef, Interval, Product, ScalarField};
use crate::quad;
use crate::susy::DriftPotential;

/// Tolerance of the admissibility test |psi_i(node)| <= ADMISSIBLE_TOL.
pub const ADMISSIBLE_TOL: f64 = 1e-9;

/// Normalized steady density e^{-2U}/Z on one domain.
pub struct SteadyState {
    density: FieldRef,
    log_z: f64,
    domain: Interval,
}

impl SteadyState {
    pub fn density(&self) -> FieldRef {
        self.density.clone()
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }
}

/// One relaxation mode of a generated problem.
pub struct FpMode {
    level: usize,
    index: usize,
    rate: f64,
    profile: FieldRef,
    admissible_domains: Vec<Interval>,
}

impl FpMode {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Decay rate E_i - E_n. Negative only for i < n, where no admissible
    /// domain exists (the mode is constructed but flagged inadmissible).
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Spatial profile psi_n psi_i, normalized to unit sup.
    pub fn profile(&self) -> FieldRef {
        self.profile.clone()
    }

    pub fn admissible_domains(&self) -> &[Interval] {
        &self.admissible_domains
    }

    pub fn is_admissible_somewhere(&self) -> bool {
        !self.admissible_domains.is_empty()
    }

    /// Same profile with a deliberately offset rate; negative-control hook
    /// for residual tests.
    #[doc(hidden)]
    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }
}

/// Steady state of a drift potential on the given domain.
pub fn steady_state(u: &DriftPotential, domain: Interval) -> Result<SteadyState> {
    if domain.lo < u.domain().lo - 1e-12 || domain.hi > u.domain().hi + 1e-12 {
        return Err(FpError::DomainMismatch(format!(
            "steady domain {domain:?} exceeds drift domain {:?}",
            u.domain()
        )));
    }
    for &s in u.singularities() {
        if s > domain.lo + 1e-9 && s < domain.hi - 1e-9 {
            return Err(FpError::DomainMismatch(format!(
                "drift singularity at {s} lies inside the steady domain"
            )));
        }
    }
    let field = u.field();
    let z = quad::integrate(|x| (-2.0 * field.eval(x)).exp(), domain, 1e-10)
        .map_err(|e| FpError::NonNormalizable(e.to_string()))?;
    if !z.is_finite() || z <= 0.0 || z > 1e100 {
        return Err(FpError::NonNormalizable(format!(
            "normalization integral {z} is not a sane mass"
        )));
    }
    Ok(SteadyState {
        density: Arc::new(DensityField {
            u: u.field(),
            log_z: z.ln(),
            domain,
        }),
        log_z: z.ln(),
        domain,
    })
}

struct DensityField {
    u: FieldRef,
    log_z: f64,
    domain: Interval,
}

impl ScalarField for DensityField {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        let rho = (-2.0 * self.u.eval(x) - self.log_z).exp();
        match order {
            0 => rho,
            1 => -2.0 * self.u.d1(x) * rho,
            2 => (4.0 * self.u.d1(x).powi(2) - 2.0 * self.u.d2(x)) * rho,
            k => panic!("density derivatives supported through order 2, got {k}"),
        }
    }
}

/// Maximal open subintervals of the drift's domain between singularities.
pub fn nodal_domains(u: &DriftPotential) -> Vec<Interval> {
    split_at(u.domain(), u.singularities())
}

fn split_at(domain: Interval, cuts: &[f64]) -> Vec<Interval> {
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = domain.lo;
    for &s in cuts {
        out.push(Interval::new(lo, s));
        lo = s;
    }
    out.push(Interval::new(lo, domain.hi));
    out
}

/// Build the (n, i) relaxation mode of a family.
pub fn mode(family: &SolvableFamily, n: usize, i: usize) -> Result<FpMode> {
    let state_n = eigenpair(family, n)?;
    let state_i = eigenpair(family, i)?;
    mode_from_states(&state_n, &state_i)
}

pub fn mode_from_states(state_n: &Eigenstate, state_i: &Eigenstate) -> Result<FpMode> {
    let rate = state_i.energy() - state_n.energy();
    let raw: FieldRef = Arc::new(Product::new(
        state_n.wavefunction(),
        state_i.wavefunction(),
    ));
    let window = state_n
        .support_window(1e-12)
        .intersect(&state_i.support_window(1e-12))
        .and_then(|w| w.intersect(&state_n.family().domain()))
        .ok_or_else(|| FpError::DomainMismatch("states share no support".into()))?;
    let sup = scan_sup(&raw, window);
    if sup == 0.0 || !sup.is_finite() {
        return Err(FpError::NonFiniteValue(window.anchor()));
    }
    let profile: FieldRef = Arc::new(Affine::new(raw, 1.0 / sup, 0.0));
    let domains = split_at(state_n.family().domain(), state_n.nodes());
    let psi_i = state_i.wavefunction();
    let admissible_domains = domains
        .into_iter()
        .filter(|d| {
            state_n
                .nodes()
                .iter()
                .filter(|&&s| (s - d.lo).abs() < 1e-12 || (s - d.hi).abs() < 1e-12)
                .all(|&s| psi_i.eval(s).abs() <= ADMISSIBLE_TOL)
        })
        .collect();
    Ok(FpMode {
        level: state_n.index(),
        index: state_i.index(),
        rate,
        profile,
        admissible_domains,
    })
}

/// Deterministic sup estimate: dense scan plus a parabolic peak refinement.
fn scan_sup(field: &FieldRef, window: Interval) -> f64 {
    const POINTS: usize = 16384;
    let at = |j: usize| window.lo + window.len() * j as f64 / POINTS as f64;
    let mut best = 0usize;
    let mut sup: f64 = 0.0;
    for j in 0..=POINTS {
        let v = field.eval(at(j)).abs();
        if v > sup {
            sup = v;
            best = j;
        }
    }
    if best > 0 && best < POINTS {
        let (a, b, c) = (
            field.eval(at(best - 1)).abs(),
            sup,
            field.eval(at(best + 1)).abs(),
        );
        let curvature = 2.0 * b - a - c;
        if curvature > 0.0 {
            sup = b + (c - a) * (c - a) / (8.0 * curvature);
        }
    }
    sup
}

/// Full time-dependent mode value profile(x) e^{-rate t}.
pub fn evaluate_solution(mode: &FpMode, x: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(FpError::InvalidConfig(format!(
            "time must be non-negative, got {t}"
        )));
    }
    if !mode.admissible_domains.iter().any(|d| d.contains(x)) {
        return Err(FpError::EvalOutsideDomain(x));
    }
    Ok(mode.profile.eval(x) * (-mode.rate * t).exp())
}

/// Expansion coefficients c_i = integral of f0 psi_i / psi_n over `domain`,
/// for the admissible i <= i_max. Reconstruction: sum of c_i psi_n psi_i.
pub fn spectral_expand(
    f0: &dyn ScalarField,
    family: &SolvableFamily,
    n: usize,
    domain: Interval,
    i_max: usize,
) -> Result<Vec<(usize, f64)>> {
    let state_n = eigenpair(family, n)?;
    check_bounded_ratio(f0, &state_n, domain)?;
    let top = family
        .bound_state_count()
        .map(|c| c - 1)
        .unwrap_or(i_max)
        .min(i_max);
    let barrier_nodes: Vec<f64> = state_n
        .nodes()
        .iter()
        .copied()
        .filter(|&s| s >= domain.lo - 1e-12 && s <= domain.hi + 1e-12)
        .collect();
    let mut out = Vec::new();
    for i in 0..=top {
        let state_i = eigenpair(family, i)?;
        let psi_i = state_i.wavefunction();
        let admissible = barrier_nodes
            .iter()
            .all(|&s| psi_i.eval(s).abs() <= ADMISSIBLE_TOL);
        if !admissible {
            continue;
        }
        let psi_n = state_n.wavefunction();
        let coeff = quad::integrate(
            |x| {
                let f = f0.eval(x);
                if f == 0.0 {
                    0.0
                } else {
                    f * psi_i.eval(x) / psi_n.eval(x)
                }
            },
            domain,
            1e-10,
        )?;
        out.push((i, coeff));
    }
    Ok(out)
}

fn check_bounded_ratio(
    f0: &dyn ScalarField,
    state_n: &Eigenstate,
    domain: Interval,
) -> Result<()> {
    const RATIO_CAP: f64 = 1e8;
    let psi = state_n.wavefunction();
    let scale = domain
        .len()
        .min(state_n.support_window(1e-12).len())
        .min(20.0)
        / 10.0;
    let mut probes: Vec<f64> = Vec::new();
    for endpoint in [domain.lo, domain.hi] {
        if endpoint.is_finite() {
            let inward = if endpoint == domain.lo { 1.0 } else { -1.0 };
            for k in 2..=10 {
                probes.push(endpoint + inward * scale * 10f64.powi(-k));
            }
        } else {
            // probe outward along the tail
            let edge = if endpoint.is_sign_positive() {
                state_n.support_window(1e-10).hi
            } else {
                state_n.support_window(1e-10).lo
            };
            for factor in [1.0, 1.05, 1.15] {
                probes.push(edge * factor);
            }
        }
    }
    for &s in state_n.nodes() {
        if domain.contains(s) {
            for k in 3..=10 {
                probes.push(s + scale * 10f64.powi(-k));
                probes.push(s - scale * 10f64.powi(-k));
            }
        }
    }
    for x in probes {
        if !domain.contains(x) {
            continue;
        }
        let f = f0.eval(x);
        if f == 0.0 {
            continue;
        }
        let p = psi.eval(x);
        let ratio = if p == 0.0 {
            f64::INFINITY
        } else {
            (f / p).abs()
        };
        if !ratio.is_finite() || ratio > RATIO_CAP {
            return Err(FpError::UnboundedRatio(x));
        }
    }
    Ok(())
}
