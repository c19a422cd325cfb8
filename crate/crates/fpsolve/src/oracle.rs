//! Independent numerical verification: finite-difference eigensolver,
//! conservative Crank-Nicolson evolution, residual evaluation, decay-rate
//! fitting, and grid quadrature.
//!
//! Face fluxes use exponential fitting (Scharfetter-Gummel), which keeps the
//! scheme in flux form with exact discrete mass conservation under no-flux
//! boundaries and stays well behaved next to the log-singular walls of
//! excited-generator drifts.

use crate::error::{FpError, Result};
use crate::field::{Interval, ScalarField};
use crate::solutions::FpMode;
use crate::susy::DriftPotential;
use crate::tridiag;

/// Boundary condition kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Dirichlet,
    NoFlux,
}

/// Uniform grid over a finite window (possibly a truncation of an infinite
/// domain), with N intervals and N+1 points.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    lo: f64,
    hi: f64,
    intervals: usize,
    pub bc: Bc,
    pub truncation_epsilon: f64,
}

impl DiscreteProblem {
    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn points(&self) -> usize {
        self.intervals + 1
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / self.intervals as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.lo + j as f64 * self.h()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..=self.intervals).map(|j| self.x(j)).collect()
    }

    pub fn window(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    /// Resample with twice as many intervals (order checks).
    pub fn refined(&self) -> DiscreteProblem {
        DiscreteProblem {
            lo: self.lo,
            hi: self.hi,
            intervals: self.intervals * 2,
            bc: self.bc,
            truncation_epsilon: self.truncation_epsilon,
        }
    }
}

/// Crank-Nicolson run record.
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
    pub mass_history: Vec<f64>,
    pub h: f64,
}

const SCAN_STEP: f64 = 0.05;
const SCAN_LIMIT: f64 = 1000.0;
const SCAN_GAP: f64 = 20.0;
const MAX_SNAPSHOTS: usize = 256;

/// Build a uniform grid: finite endpoints are kept; each infinite endpoint is
/// replaced by the outermost point where `reference_density >= eps`, pushed a
/// further 20% outward from the anchor.
pub fn build_grid(
    domain: Interval,
    n: usize,
    reference_density: &dyn ScalarField,
    eps: f64,
    bc: Bc,
) -> Result<DiscreteProblem> {
    if n < 100 {
        return Err(FpError::InvalidConfig(format!(
            "grid needs at least 100 intervals, got {n}"
        )));
    }
    if !eps.is_finite() || eps <= 0.0 {
        return Err(FpError::InvalidConfig("eps must be positive".into()));
    }
    let anchor = if domain.lo.is_finite() {
        domain.lo
    } else if domain.hi.is_finite() {
        domain.hi
    } else {
        0.0
    };
    let lo = if domain.lo.is_finite() {
        domain.lo
    } else {
        let root = outermost_crossing(reference_density, anchor, -1.0, eps)?;
        anchor + 1.2 * (root - anchor)
    };
    let hi = if domain.hi.is_finite() {
        domain.hi
    } else {
        let root = outermost_crossing(reference_density, anchor, 1.0, eps)?;
        anchor + 1.2 * (root - anchor)
    };
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(FpError::NoDecay);
    }
    Ok(DiscreteProblem {
        lo,
        hi,
        intervals: n,
        bc,
        truncation_epsilon: eps,
    })
}

fn outermost_crossing(
    density: &dyn ScalarField,
    anchor: f64,
    direction: f64,
    eps: f64,
) -> Result<f64> {
    let mut last_hit: Option<f64> = None;
    let mut dist = 0.0;
    while dist <= SCAN_LIMIT {
        let x = anchor + direction * dist;
        if density.eval(x) >= eps {
            last_hit = Some(x);
        } else if let Some(hit) = last_hit {
            if (x - hit).abs() > SCAN_GAP {
                break;
            }
        }
        dist += SCAN_STEP;
    }
    let hit = last_hit.ok_or(FpError::NoDecay)?;
    if (hit - anchor).abs() >= SCAN_LIMIT - SCAN_STEP {
        return Err(FpError::NoDecay);
    }
    // refine the crossing between hit (>= eps) and hit + step (< eps)
    let mut a = hit;
    let mut b = hit + direction * SCAN_STEP;
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if density.eval(mid) >= eps {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Lowest k eigenpairs of H = -1/2 d^2/dx^2 + V on the grid, Dirichlet walls.
///
/// Vectors are returned on the full grid (zero at both walls), normalized in
/// the grid inner product h * sum v^2 = 1, with the sign fixed positive just
/// right of the left wall.
pub fn eigensolve_schrodinger(
    v: &dyn ScalarField,
    dp: &DiscreteProblem,
    k: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if dp.bc != Bc::Dirichlet {
        return Err(FpError::InvalidConfig(
            "eigensolve requires dirichlet boundaries".into(),
        ));
    }
    if k == 0 || 4 * k > dp.points() {
        return Err(FpError::InvalidConfig(format!(
            "k must satisfy 1 <= k <= N/4, got {k}"
        )));
    }
    let n = dp.intervals();
    let h = dp.h();
    let m = n - 1;
    let mut diag = Vec::with_capacity(m);
    for j in 1..n {
        let vx = v.eval(dp.x(j));
        if !vx.is_finite() {
            return Err(FpError::NonFiniteValue(dp.x(j)));
        }
        diag.push(1.0 / (h * h) + vx);
    }
    let off = vec![-0.5 / (h * h); m - 1];
    let evals = tridiag::ql_eigenvalues(&diag, &off)?;
    let mut out = Vec::with_capacity(k);
    let mut previous: Vec<Vec<f64>> = Vec::new();
    for target in evals.iter().take(k) {
        let vec = tridiag::inverse_iteration(&diag, &off, *target, &previous)?;
        previous.push(vec.clone());
        let mut full = vec![0.0; dp.points()];
        full[1..n].copy_from_slice(&vec);
        let norm = (h * full.iter().map(|x| x * x).sum::<f64>()).sqrt();
        full.iter_mut().for_each(|x| *x /= norm);
        let sup = full.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if let Some(first) = full.iter().find(|x| x.abs() > 1e-3 * sup) {
            if *first < 0.0 {
                full.iter_mut().for_each(|x| *x = -*x);
            }
        }
        out.push((*target, full));
    }
    Ok(out)
}

/// B(z) = z / (e^z - 1), the Bernoulli factor of exponentially fitted fluxes.
fn bernoulli(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 - 0.5 * z + z * z / 12.0
    } else {
        z / (z.exp() - 1.0)
    }
}

struct FluxOperator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

/// Assemble the flux-form generator L with faces at midpoints:
/// (L f)_j = (J_{j+1/2} - J_{j-1/2}) / h,
/// J_{j+1/2} = [B(-z) f_{j+1} - B(z) f_j] / (2h),  z = 2 h U'(midpoint).
fn assemble_flux_operator(u: &DriftPotential, dp: &DiscreteProblem) -> Result<FluxOperator> {
    let n = dp.intervals();
    let h = dp.h();
    let mut bp = Vec::with_capacity(n);
    let mut bm = Vec::with_capacity(n);
    for j in 0..n {
        let mid = dp.x(j) + 0.5 * h;
        let z = 2.0 * h * u.d1(mid);
        if !z.is_finite() {
            return Err(FpError::NonFiniteValue(mid));
        }
        let b = bernoulli(z);
        bp.push(b); // B(z)
        bm.push(z + b); // B(-z) = z + B(z)
    }
    let scale = 1.0 / (2.0 * h * h);
    let pts = dp.points();
    let mut lower = vec![0.0; pts];
    let mut diag = vec![0.0; pts];
    let mut upper = vec![0.0; pts];
    for j in 0..pts {
        let mut d = 0.0;
        if j < n {
            // outgoing through face j+1/2
            d -= bp[j] * scale;
            upper[j] = bm[j] * scale;
        }
        if j > 0 {
            d -= bm[j - 1] * scale;
            lower[j] = bp[j - 1] * scale;
        }
        diag[j] = d;
    }
    if dp.bc == Bc::Dirichlet {
        // pinned walls: zero rows keep f_0 = f_N = 0 under I +- dt/2 L
        lower[0] = 0.0;
        diag[0] = 0.0;
        upper[0] = 0.0;
        let last = pts - 1;
        lower[last] = 0.0;
        diag[last] = 0.0;
        upper[last] = 0.0;
    }
    Ok(FluxOperator { lower, diag, upper })
}

fn check_no_interior_singularity(u: &DriftPotential, dp: &DiscreteProblem) -> Result<()> {
    for &s in u.singularities() {
        if s > dp.lo() + 1e-12 && s < dp.hi() - 1e-12 {
            return Err(FpError::SingularityInsideGrid(s));
        }
    }
    Ok(())
}

/// Crank-Nicolson evolution of the Fokker-Planck equation in flux form.
pub fn evolve_fp(
    u: &DriftPotential,
    f0: &[f64],
    dp: &DiscreteProblem,
    dt: f64,
    t_final: f64,
) -> Result<EvolutionResult> {
    if f0.len() != dp.points() {
        return Err(FpError::InvalidConfig(format!(
            "initial vector has {} entries, grid has {}",
            f0.len(),
            dp.points()
        )));
    }
    if !dt.is_finite() || dt <= 0.0 || t_final.is_nan() || t_final < dt {
        return Err(FpError::InvalidConfig(
            "need dt > 0 and T >= dt".into(),
        ));
    }
    check_no_interior_singularity(u, dp)?;
    let op = assemble_flux_operator(u, dp)?;
    let pts = dp.points();
    let h = dp.h();
    let steps = (t_final / dt).round().max(1.0) as usize;
    let stride = steps.div_ceil(MAX_SNAPSHOTS).max(1);

    // A = I - dt/2 L (solve side), B = I + dt/2 L (apply side)
    let half = 0.5 * dt;
    let a_low: Vec<f64> = op.lower.iter().map(|v| -half * v).collect();
    let a_diag: Vec<f64> = op.diag.iter().map(|v| 1.0 - half * v).collect();
    let a_up: Vec<f64> = op.upper.iter().map(|v| -half * v).collect();

    let mut f: Vec<f64> = f0.to_vec();
    if dp.bc == Bc::Dirichlet {
        f[0] = 0.0;
        f[pts - 1] = 0.0;
    }
    let mut times = vec![0.0];
    let mut mass_history = vec![h * f.iter().sum::<f64>()];
    let mut snapshots = vec![f.clone()];
    let mut rhs = vec![0.0; pts];

    for step in 1..=steps {
        for j in 0..pts {
            let mut acc = f[j] + half * op.diag[j] * f[j];
            if j > 0 {
                acc += half * op.lower[j] * f[j - 1];
            }
            if j + 1 < pts {
                acc += half * op.upper[j] * f[j + 1];
            }
            rhs[j] = acc;
        }
        f = tridiag::thomas_solve(&a_low, &a_diag, &a_up, &rhs);
        if step % stride == 0 || step == steps {
            let t = step as f64 * dt;
            if f.iter().any(|v| !v.is_finite()) {
                return Err(FpError::NonFiniteState(t));
            }
            times.push(t);
            mass_history.push(h * f.iter().sum::<f64>());
            snapshots.push(f.clone());
        }
    }
    Ok(EvolutionResult {
        times,
        snapshots,
        mass_history,
        h,
    })
}

/// Exact stationary vector of the discrete no-flux operator: zero flux through
/// every face gives f_{j+1}/f_j = e^{-z_j}; normalized to unit grid mass.
pub fn discrete_steady(u: &DriftPotential, dp: &DiscreteProblem) -> Result<Vec<f64>> {
    check_no_interior_singularity(u, dp)?;
    let n = dp.intervals();
    let h = dp.h();
    let mut logs = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    logs.push(0.0);
    for j in 0..n {
        let mid = dp.x(j) + 0.5 * h;
        let z = 2.0 * h * u.d1(mid);
        if !z.is_finite() {
            return Err(FpError::NonFiniteValue(mid));
        }
        acc -= z;
        logs.push(acc);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut f: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let mass = h * f.iter().sum::<f64>();
    f.iter_mut().for_each(|v| *v /= mass);
    Ok(f)
}

/// Sup-norm of (1/2) f'' + (f U')' + lambda f over interior grid points,
/// normalized by the sup of |f|; derivatives in closed form.
pub fn fp_residual(u: &DriftPotential, mode: &FpMode, dp: &DiscreteProblem) -> Result<f64> {
    check_no_interior_singularity(u, dp)?;
    let profile = mode.profile();
    let lambda = mode.rate();
    let mut sup_f: f64 = 0.0;
    let mut sup_r: f64 = 0.0;
    for j in 1..dp.intervals() {
        let x = dp.x(j);
        let f = profile.eval(x);
        let r = 0.5 * profile.d2(x)
            + profile.d1(x) * u.d1(x)
            + f * u.d2(x)
            + lambda * f;
        if !r.is_finite() {
            return Err(FpError::NonFiniteValue(x));
        }
        sup_f = sup_f.max(f.abs());
        sup_r = sup_r.max(r.abs());
    }
    if sup_f == 0.0 {
        return Err(FpError::NonFiniteValue(dp.lo()));
    }
    Ok(sup_r / sup_f)
}

/// Least-squares decay rate of log ||f(t) - reference||_2 over the window
/// where the norm sits in [1e-8, 1e-2] of its initial value.
pub fn fit_decay_rate(res: &EvolutionResult, reference: &[f64]) -> Result<(f64, f64)> {
    if res.snapshots.len() < 10 {
        return Err(FpError::InvalidConfig(
            "need at least 10 snapshots to fit a rate".into(),
        ));
    }
    if reference.len() != res.snapshots[0].len() {
        return Err(FpError::InvalidConfig(
            "reference vector does not match the grid".into(),
        ));
    }
    let norms: Vec<f64> = res
        .snapshots
        .iter()
        .map(|snap| {
            let ss: f64 = snap
                .iter()
                .zip(reference)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (res.h * ss).sqrt()
        })
        .collect();
    let initial = norms[0];
    if initial == 0.0 {
        return Err(FpError::FitWindowEmpty);
    }
    let window: Vec<usize> = (0..norms.len())
        .filter(|&k| norms[k] > 0.0 && norms[k] >= 1e-8 * initial && norms[k] <= 1e-2 * initial)
        .collect();
    if window.is_empty() {
        return Err(FpError::FitWindowEmpty);
    }
    if norms[norms.len() - 1] >= initial {
        return Err(FpError::NonMonotoneDecay);
    }
    let ts: Vec<f64> = window.iter().map(|&k| res.times[k]).collect();
    let ys: Vec<f64> = window.iter().map(|&k| norms[k].ln()).collect();
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    if sxx == 0.0 {
        return Err(FpError::FitWindowEmpty);
    }
    let slope = sxy / sxx;
    let ss_tot: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    let ss_res: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| {
            let pred = ym + slope * (t - tm);
            (y - pred) * (y - pred)
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((-slope, r2))
}

/// Composite Simpson integral of a field sampled on the grid.
pub fn quadrature(field: &dyn ScalarField, dp: &DiscreteProblem) -> Result<f64> {
    let n = dp.intervals();
    let h = dp.h();
    let values: Vec<f64> = (0..=n).map(|j| field.eval(dp.x(j))).collect();
    for (j, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(FpError::NonFiniteValue(dp.x(j)));
        }
    }
    Ok(simpson(&values, h))
}

/// Simpson on uniform samples; odd interval counts finish with a 3/8 panel.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    assert!(n >= 3, "simpson needs at least 3 intervals");
    let (even_part, rest) = if n.is_multiple_of(2) {
        (n, 0)
    } else {
        (n - 3, 3)
    };
    let mut total = 0.0;
    if even_part > 0 {
        let mut acc = values[0] + values[even_part];
        for (j, v) in values.iter().enumerate().take(even_part).skip(1) {
            acc += v * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += acc * h / 3.0;
    }
    if rest == 3 {
        let j = even_part;
        total += 3.0 * h / 8.0
            * (values[j] + 3.0 * values[j + 1] + 3.0 * values[j + 2] + values[j + 3]);
    }
    total
}
