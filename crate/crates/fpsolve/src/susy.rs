//! Transforms between drift potentials, superpotentials, quantum potentials
//! and bound states.
//!
//! Conventions (hbar = m = 1, D = 1/2):
//!   W = U',   V_q = U'^2/2 - U''/2,   Riccati: W' - W^2 = -2 (V_s - E_shift).
//!
//! A generating state psi_n produces the drift U_n = U_0 - log|psi_n|, so
//! that U_n' = -psi_n'/psi_n = W and the steady density e^{-2U} = C psi_n^2
//! is normalizable. (The source formula with "+ log" flips the steady state
//! into C/psi_n^2, which has no finite mass; the minus sign is what makes the
//! whole construction consistent and is used throughout.)

use std::sync::Arc;

use crate::catalog::Eigenstate;
use crate::error::{FpError, Result};
use crate::field::{FieldRef, Interval, ScalarField};
use crate::oracle::DiscreteProblem;

/// Margin around a singularity inside which checked evaluation errors out.
pub const SINGULARITY_MARGIN: f64 = 1e-12;

/// Residual grids avoid singularities by this distance (configurable via
/// [`riccati_residual_on`]).
pub const RESIDUAL_GRID_MARGIN: f64 = 1e-3;

/// Number of points in the default residual grid.
pub const RESIDUAL_GRID_POINTS: usize = 2001;

/// Finite span used when a residual window must truncate an infinite domain
/// and no better information is available.
pub const DEFAULT_SPAN: f64 = 8.0;

/// Where the generating state came from.
#[derive(Clone)]
pub struct Provenance {
    pub state: Eigenstate,
    pub offset: f64,
}

/// Diffusion potential U(x) with its singular points (log poles).
#[derive(Clone)]
pub struct DriftPotential {
    field: FieldRef,
    domain: Interval,
    singularities: Vec<f64>,
    provenance: Option<Provenance>,
}

impl DriftPotential {
    /// Wrap a free-form field; `singularities` must be sorted and interior.
    pub fn from_field(field: FieldRef, singularities: Vec<f64>) -> Self {
        let domain = field.domain();
        debug_assert!(singularities.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(singularities.iter().all(|s| domain.contains(*s)));
        DriftPotential {
            field,
            domain,
            singularities,
            provenance: None,
        }
    }

    pub fn field(&self) -> FieldRef {
        self.field.clone()
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn singularities(&self) -> &[f64] {
        &self.singularities
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Evaluation refusing points too close to a singularity.
    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        check_singularities(x, &self.singularities)?;
        Ok(self.field.eval(x))
    }

    pub fn nearest_singularity(&self, x: f64) -> Option<f64> {
        self.singularities
            .iter()
            .copied()
            .min_by(|a, b| (a - x).abs().partial_cmp(&(b - x).abs()).unwrap())
    }
}

impl ScalarField for DriftPotential {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        self.field.deriv(x, order)
    }
}

fn check_singularities(x: f64, singularities: &[f64]) -> Result<()> {
    for &s in singularities {
        if (x - s).abs() < SINGULARITY_MARGIN {
            return Err(FpError::EvalAtSingularity { x, singularity: s });
        }
    }
    Ok(())
}

/// A field together with the points where it blows up.
pub struct SingularField {
    pub field: FieldRef,
    pub singularities: Vec<f64>,
}

impl SingularField {
    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        check_singularities(x, &self.singularities)?;
        Ok(self.field.eval(x))
    }
}

impl ScalarField for SingularField {
    fn domain(&self) -> Interval {
        self.field.domain()
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        self.field.deriv(x, order)
    }
}

// ---------------------------------------------------------------------------
// Drift from a generating state
// ---------------------------------------------------------------------------

/// U_n(x) = U_0 - log|psi_n(x)|, singular at the nodes of psi_n.
pub fn drift_from_state(state: &Eigenstate, offset: f64) -> DriftPotential {
    let field: FieldRef = Arc::new(StateDrift {
        state: state.clone(),
        offset,
        potential: state.family().potential(),
    });
    DriftPotential {
        field,
        domain: state.family().domain(),
        singularities: state.nodes().to_vec(),
        provenance: Some(Provenance {
            state: state.clone(),
            offset,
        }),
    }
}

struct StateDrift {
    state: Eigenstate,
    offset: f64,
    potential: FieldRef,
}

impl StateDrift {
    /// psi''/psi from the independent closed-form second derivative where the
    /// wavefunction is representable; deep in the tails (underflowed psi) the
    /// eigenvalue equation supplies the same ratio from V and E alone.
    fn r2(&self, x: f64) -> f64 {
        let psi = self.state.wavefunction().eval(x);
        if psi != 0.0 && psi.is_finite() {
            self.state.wavefunction().d2(x) / psi
        } else {
            2.0 * (self.potential.eval(x) - self.state.energy())
        }
    }
}

impl ScalarField for StateDrift {
    fn domain(&self) -> Interval {
        self.state.family().domain()
    }

    fn deriv(&self, x: f64, order: u32) -> f64 {
        let r1 = || self.state.log_deriv(x);
        match order {
            0 => self.offset - self.state.log_abs(x),
            1 => -r1(),
            2 => {
                let r1 = r1();
                r1 * r1 - self.r2(x)
            }
            3 => {
                // -(ln psi)''' with psi'''/psi from the eigenvalue equation
                let r1 = r1();
                let v = self.potential.eval(x);
                let e = self.state.energy();
                let r2 = 2.0 * (v - e);
                let r3 = 2.0 * self.potential.d1(x) + r2 * r1;
                -(r3 - 3.0 * r1 * r2 + 2.0 * r1.powi(3))
            }
            4 => {
                let r1 = r1();
                let v = self.potential.eval(x);
                let e = self.state.energy();
                let r2 = 2.0 * (v - e);
                let r3 = 2.0 * self.potential.d1(x) + r2 * r1;
                let r4 = 2.0 * self.potential.d2(x) + 4.0 * self.potential.d1(x) * r1 + r2 * r2;
                -(r4 - 4.0 * r1 * r3 - 3.0 * r2 * r2 + 12.0 * r1 * r1 * r2
                    - 6.0 * r1.powi(4))
            }
            k => panic!("drift potential derivatives supported through order 4, got {k}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// V_q = U'^2/2 - U''/2 as a field; singular where U is.
pub fn quantum_potential(u: &DriftPotential) -> SingularField {
    SingularField {
        field: Arc::new(QuantumPotentialField {
            u: u.field.clone(),
        }),
        singularities: u.singularities.clone(),
    }
}

struct QuantumPotentialField {
    u: FieldRef,
}

impl ScalarField for QuantumPotentialField {
    fn domain(&self) -> Interval {
        self.u.domain()
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        let u1 = self.u.deriv(x, 1);
        let u2 = self.u.deriv(x, 2);
        match order {
            0 => 0.5 * u1 * u1 - 0.5 * u2,
            1 => u1 * u2 - 0.5 * self.u.deriv(x, 3),
            2 => u2 * u2 + u1 * self.u.deriv(x, 3) - 0.5 * self.u.deriv(x, 4),
            k => panic!("quantum potential derivatives supported through order 2, got {k}"),
        }
    }
}

/// W = -psi'/psi, with simple poles at the nodes of psi.
pub fn superpotential_of_state(state: &Eigenstate) -> SingularField {
    let drift = drift_from_state(state, 0.0);
    SingularField {
        field: Arc::new(DerivField {
            inner: drift.field.clone(),
            max_order: 3,
        }),
        singularities: state.nodes().to_vec(),
    }
}

/// Derivative of another field, shifted by one order.
struct DerivField {
    inner: FieldRef,
    max_order: u32,
}

impl ScalarField for DerivField {
    fn domain(&self) -> Interval {
        self.inner.domain()
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        assert!(
            order < self.max_order + 1,
            "derivative field supports orders through {}",
            self.max_order
        );
        self.inner.deriv(x, order + 1)
    }
}

/// Report of the Riccati identity W' - W^2 + 2(V_s - E_shift) = 0.
pub struct RiccatiReport {
    pub residual_sup: f64,
    pub residual_field: SingularField,
    pub energy_shift: f64,
}

/// Check the Riccati identity on a default 2001-point grid.
pub fn riccati_residual(
    w: &SingularField,
    v_s: &FieldRef,
    energy_shift: f64,
) -> Result<RiccatiReport> {
    let window = default_window(&w.field.domain(), &v_s.domain())?;
    riccati_residual_on(
        w,
        v_s,
        energy_shift,
        window,
        RESIDUAL_GRID_POINTS,
        RESIDUAL_GRID_MARGIN,
    )
}

/// Same check on an explicit window, point count and singularity margin.
pub fn riccati_residual_on(
    w: &SingularField,
    v_s: &FieldRef,
    energy_shift: f64,
    window: Interval,
    points: usize,
    margin: f64,
) -> Result<RiccatiReport> {
    let residual = SingularField {
        field: Arc::new(RiccatiField {
            w: w.field.clone(),
            v: v_s.clone(),
            energy_shift,
        }),
        singularities: w.singularities.clone(),
    };
    let mut sup: f64 = 0.0;
    let mut used = 0usize;
    // finite walls (where psi may vanish) get the same margin as interior poles
    let lo = window.lo + margin;
    let hi = window.hi - margin;
    if lo >= hi {
        return Err(FpError::DomainMismatch(
            "window too narrow for the singularity margin".into(),
        ));
    }
    let step = (hi - lo) / (points - 1) as f64;
    for j in 0..points {
        let x = lo + j as f64 * step;
        if residual
            .singularities
            .iter()
            .any(|s| (x - s).abs() < margin)
        {
            continue;
        }
        let r = residual.field.eval(x);
        if !r.is_finite() {
            return Err(FpError::NonFiniteValue(x));
        }
        sup = sup.max(r.abs());
        used += 1;
    }
    if used == 0 {
        return Err(FpError::DomainMismatch(
            "residual window left no usable grid points".into(),
        ));
    }
    Ok(RiccatiReport {
        residual_sup: sup,
        residual_field: residual,
        energy_shift,
    })
}

struct RiccatiField {
    w: FieldRef,
    v: FieldRef,
    energy_shift: f64,
}

impl ScalarField for RiccatiField {
    fn domain(&self) -> Interval {
        self.w
            .domain()
            .intersect(&self.v.domain())
            .expect("checked at construction")
    }
    fn deriv(&self, x: f64, order: u32) -> f64 {
        let w = self.w.eval(x);
        let w1 = self.w.d1(x);
        match order {
            0 => w1 - w * w + 2.0 * (self.v.eval(x) - self.energy_shift),
            1 => self.w.d2(x) - 2.0 * w * w1 + 2.0 * self.v.d1(x),
            2 => {
                self.w.deriv(x, 3) - 2.0 * w1 * w1 - 2.0 * w * self.w.d2(x)
                    + 2.0 * self.v.d2(x)
            }
            k => panic!("riccati residual derivatives supported through order 2, got {k}"),
        }
    }
}

fn default_window(a: &Interval, b: &Interval) -> Result<Interval> {
    let joint = a
        .intersect(b)
        .ok_or_else(|| FpError::DomainMismatch("fields share no domain".into()))?;
    let lo = if joint.lo.is_finite() {
        joint.lo
    } else {
        -DEFAULT_SPAN
    };
    let hi = if joint.hi.is_finite() {
        joint.hi
    } else {
        DEFAULT_SPAN
    };
    if lo >= hi {
        return Err(FpError::DomainMismatch(
            "domains do not overlap a finite window".into(),
        ));
    }
    Ok(Interval::new(lo, hi))
}

/// Sup-norm of the discrete H_- applied to e^{-U} over interior grid points,
/// with e^{-U} normalized to unit sup. O(h^2) for a genuine zero mode.
pub fn factorization_check(u: &DriftPotential, grid: &DiscreteProblem) -> Result<f64> {
    for &s in &u.singularities {
        if s > grid.lo() && s < grid.hi() {
            return Err(FpError::SingularityInsideGrid(s));
        }
    }
    let n = grid.intervals();
    let h = grid.h();
    let vq = quantum_potential(u);
    // e^{-U} via the log-stable evaluation, normalized to sup 1
    let mut psi: Vec<f64> = (0..=n).map(|j| (-u.field.eval(grid.x(j))).exp()).collect();
    let sup = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 || !sup.is_finite() {
        return Err(FpError::NonFiniteValue(grid.lo()));
    }
    psi.iter_mut().for_each(|v| *v /= sup);
    let mut worst: f64 = 0.0;
    for j in 1..n {
        let lap = (psi[j + 1] - 2.0 * psi[j] + psi[j - 1]) / (h * h);
        let r = -0.5 * lap + vq.field.eval(grid.x(j)) * psi[j];
        if !r.is_finite() {
            return Err(FpError::NonFiniteValue(grid.x(j)));
        }
        worst = worst.max(r.abs());
    }
    Ok(worst)
}
