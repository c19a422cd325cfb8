//! Closed-form library of exactly solvable 1D quantum potentials.
//!
//! Convention throughout: hbar = 1, m = 1, so H = -1/2 d^2/dx^2 + V(x).
//! Wavefunctions are real, normalized, and fixed positive just right of the
//! left domain boundary.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{FpError, Result};
use crate::field::{FieldRef, Interval, ScalarField};
use crate::poly;

/// Hard cap on Morse levels; keeps the Laguerre recurrences well inside f64.
const MAX_MORSE_LEVELS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    Harmonic { omega: f64 },
    InfiniteWell { length: f64 },
    PoschlTeller { lambda: u32 },
    Morse { depth: f64, width: f64 },
}

/// A solvable potential family with validated parameters.
#[derive(Clone, Debug)]
pub struct SolvableFamily {
    kind: FamilyKind,
    domain: Interval,
}

/// One bound state: index, energy, normalized wavefunction, node locations.
#[derive(Clone)]
pub struct Eigenstate {
    family: SolvableFamily,
    index: usize,
    energy: f64,
    wave: Arc<WaveForm>,
    nodes: Vec<f64>,
}

/// Parameter documentation row for the CLI catalog listing.
pub struct ParamInfo {
    pub name: &'static str,
    pub symbol: &'static str,
    pub range: &'static str,
}

pub struct FamilyInfo {
    pub name: &'static str,
    pub params: Vec<ParamInfo>,
    pub domain: &'static str,
    pub bound_states: &'static str,
}

pub fn family_infos() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "harmonic",
            params: vec![ParamInfo { name: "omega", symbol: "omega", range: "> 0" }],
            domain: "(-inf, inf)",
            bound_states: "infinite",
        },
        FamilyInfo {
            name: "infinite_well",
            params: vec![ParamInfo { name: "length", symbol: "L", range: "> 0" }],
            domain: "(0, L)",
            bound_states: "infinite",
        },
        FamilyInfo {
            name: "poschl_teller",
            params: vec![ParamInfo { name: "lambda", symbol: "lambda", range: "integer >= 1" }],
            domain: "(-inf, inf)",
            bound_states: "lambda",
        },
        FamilyInfo {
            name: "morse",
            params: vec![
                ParamInfo { name: "depth", symbol: "D", range: "> 0" },
                ParamInfo { name: "width", symbol: "w", range: "> 0, with w*sqrt(2D) > 1/2" },
            ],
            domain: "(-inf, inf)",
            bound_states: "floor(w*sqrt(2D) + 1/2)",
        },
    ]
}

fn param(params: &BTreeMap<String, f64>, name: &'static str) -> Result<f64> {
    params.get(name).copied().ok_or_else(|| FpError::ParamOutOfRange {
        name: name.to_string(),
        reason: "missing required parameter".into(),
    })
}

fn reject_extra(params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(FpError::ParamOutOfRange {
                name: key.clone(),
                reason: "unknown parameter for this family".into(),
            });
        }
    }
    Ok(())
}

/// Build a family from its name and named parameters.
pub fn make_family(name: &str, params: &BTreeMap<String, f64>) -> Result<SolvableFamily> {
    let kind = match name {
        "harmonic" => {
            reject_extra(params, &["omega"])?;
            let omega = param(params, "omega")?;
            if !omega.is_finite() || omega <= 0.0 {
                return Err(FpError::ParamOutOfRange {
                    name: "omega".into(),
                    reason: format!("must be positive and finite, got {omega}"),
                });
            }
            FamilyKind::Harmonic { omega }
        }
        "infinite_well" => {
            reject_extra(params, &["length"])?;
            let length = param(params, "length")?;
            if !length.is_finite() || length <= 0.0 {
                return Err(FpError::ParamOutOfRange {
                    name: "length".into(),
                    reason: format!("must be positive and finite, got {length}"),
                });
            }
            FamilyKind::InfiniteWell { length }
        }
        "poschl_teller" => {
            reject_extra(params, &["lambda"])?;
            let lambda = param(params, "lambda")?;
            let rounded = lambda.round();
            if !lambda.is_finite() || lambda < 1.0 || (lambda - rounded).abs() > 1e-9 || rounded > 64.0 {
                return Err(FpError::ParamOutOfRange {
                    name: "lambda".into(),
                    reason: format!("must be an integer in [1, 64], got {lambda}"),
                });
            }
            FamilyKind::PoschlTeller { lambda: rounded as u32 }
        }
        "morse" => {
            reject_extra(params, &["depth", "width"])?;
            let depth = param(params, "depth")?;
            let width = param(params, "width")?;
            if !depth.is_finite() || depth <= 0.0 {
                return Err(FpError::ParamOutOfRange {
                    name: "depth".into(),
                    reason: format!("must be positive and finite, got {depth}"),
                });
            }
            if !width.is_finite() || width <= 0.0 {
                return Err(FpError::ParamOutOfRange {
                    name: "width".into(),
                    reason: format!("must be positive and finite, got {width}"),
                });
            }
            let lambda_m = width * (2.0 * depth).sqrt();
            if lambda_m <= 0.5 {
                return Err(FpError::ParamOutOfRange {
                    name: "depth".into(),
                    reason: format!(
                        "well too shallow: w*sqrt(2D) = {lambda_m:.4} supports no bound state"
                    ),
                });
            }
            if lambda_m > MAX_MORSE_LEVELS as f64 {
                return Err(FpError::ParamOutOfRange {
                    name: "depth".into(),
                    reason: format!(
                        "w*sqrt(2D) = {lambda_m:.1} exceeds the supported level cap"
                    ),
                });
            }
            FamilyKind::Morse { depth, width }
        }
        other => return Err(FpError::UnknownFamily(other.to_string())),
    };
    Ok(SolvableFamily::from_kind(kind))
}

impl SolvableFamily {
    pub fn from_kind(kind: FamilyKind) -> Self {
        let domain = match kind {
            FamilyKind::InfiniteWell { length } => Interval::new(0.0, length),
            _ => Interval::whole_line(),
        };
        SolvableFamily { kind, domain }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Harmonic { .. } => "harmonic",
            FamilyKind::InfiniteWell { .. } => "infinite_well",
            FamilyKind::PoschlTeller { .. } => "poschl_teller",
            FamilyKind::Morse { .. } => "morse",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut map = BTreeMap::new();
        match self.kind {
            FamilyKind::Harmonic { omega } => {
                map.insert("omega".into(), omega);
            }
            FamilyKind::InfiniteWell { length } => {
                map.insert("length".into(), length);
            }
            FamilyKind::PoschlTeller { lambda } => {
                map.insert("lambda".into(), lambda as f64);
            }
            FamilyKind::Morse { depth, width } => {
                map.insert("depth".into(), depth);
                map.insert("width".into(), width);
            }
        }
        map
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Number of bound states; `None` means infinitely many.
    pub fn bound_state_count(&self) -> Option<usize> {
        match self.kind {
            FamilyKind::Harmonic { .. } | FamilyKind::InfiniteWell { .. } => None,
            FamilyKind::PoschlTeller { lambda } => Some(lambda as usize),
            FamilyKind::Morse { depth, width } => {
                let lambda_m = width * (2.0 * depth).sqrt();
                // states with lambda_m - n - 1/2 > 0
                Some((lambda_m - 0.5).ceil().max(0.0) as usize)
            }
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if let Some(count) = self.bound_state_count() {
            if i >= count {
                return Err(FpError::IndexAboveSpectrum { index: i, count });
            }
        }
        Ok(())
    }

    /// The potential V_s as a field (derivatives of any order).
    pub fn potential(&self) -> FieldRef {
        Arc::new(PotentialField { kind: self.kind, domain: self.domain })
    }

    /// Closed-form eigenvalue.
    pub fn energy(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(match self.kind {
            FamilyKind::Harmonic { omega } => omega * (i as f64 + 0.5),
            FamilyKind::InfiniteWell { length } => {
                let k = (i as f64 + 1.0) * std::f64::consts::PI / length;
                0.5 * k * k
            }
            FamilyKind::PoschlTeller { lambda } => {
                let mu = (lambda as f64) - i as f64;
                -0.5 * mu * mu
            }
            FamilyKind::Morse { depth, width } => {
                let a = 1.0 / width;
                let lambda_m = width * (2.0 * depth).sqrt();
                let s = lambda_m - i as f64 - 0.5;
                -0.5 * a * a * s * s
            }
        })
    }
}

/// Construct the i-th eigenstate of a family.
pub fn eigenpair(family: &SolvableFamily, i: usize) -> Result<Eigenstate> {
    family.check_index(i)?;
    let energy = family.energy(i)?;
    let wave = Arc::new(WaveForm::new(family.kind, i));
    let nodes = locate_nodes(&wave, family, i);
    debug_assert_eq!(nodes.len(), i, "Sturm oscillation: state {i} must have {i} nodes");
    Ok(Eigenstate { family: family.clone(), index: i, energy, wave, nodes })
}

/// Interior zeros of the state's wavefunction, refined by bisection.
pub fn node_locations(state: &Eigenstate) -> Vec<f64> {
    state.nodes.clone()
}

impl Eigenstate {
    pub fn family(&self) -> &SolvableFamily {
        &self.family
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// The normalized wavefunction as a shareable field.
    pub fn wavefunction(&self) -> FieldRef {
        Arc::new(WaveField { wave: self.wave.clone(), domain: self.family.domain() })
    }

    /// ln |psi(x)|, computed without forming psi (stable far into the tails).
    pub fn log_abs(&self, x: f64) -> f64 {
        self.wave.log_abs(x)
    }

    /// psi'(x)/psi(x), with the exponential factors cancelled analytically.
    pub fn log_deriv(&self, x: f64) -> f64 {
        self.wave.log_deriv(x)
    }

    /// A window outside of which |psi|^2 < eps (used for grids and scans).
    pub fn support_window(&self, eps: f64) -> Interval {
        self.wave.support_window(eps, &self.family)
    }
}

// ---------------------------------------------------------------------------
// Potential fields
// ---------------------------------------------------------------------------

struct PotentialField {
    kind: FamilyKind,
    domain: Interval,
}

impl ScalarField for PotentialField {
    fn domain(&self) -> Interval {
        self.domain
    }

    fn deriv(&self, x: f64, order: u32) -> f64 {
        match self.kind {
            FamilyKind::Harmonic { omega } => {
                let w2 = omega * omega;
                match order {
                    0 => 0.5 * w2 * x * x,
                    1 => w2 * x,
                    2 => w2,
                    _ => 0.0,
                }
            }
            FamilyKind::InfiniteWell { .. } => 0.0,
            FamilyKind::PoschlTeller { lambda } => {
                let c = -0.5 * (lambda as f64) * (lambda as f64 + 1.0);
                c * sech2_deriv(x, order)
            }
            FamilyKind::Morse { depth, width } => {
                let a = 1.0 / width;
                let e1 = (-a * x).exp();
                let e2 = (-2.0 * a * x).exp();
                depth * ((-2.0 * a).powi(order as i32) * e2 - 2.0 * (-a).powi(order as i32) * e1)
            }
        }
    }
}

/// n-th derivative of sech^2 x, via the closure of monomials in
/// (s, t) = (sech^2 x, tanh x) under d/dx: s' = -2st, t' = s.
fn sech2_deriv(x: f64, order: u32) -> f64 {
    // terms: (pow_s, pow_t, coeff)
    let mut terms: Vec<(u32, u32, f64)> = vec![(1, 0, 1.0)];
    for _ in 0..order {
        let mut next: Vec<(u32, u32, f64)> = Vec::with_capacity(terms.len() * 2);
        for &(a, b, c) in &terms {
            // d(s^a t^b) = -2a s^a t^{b+1} + b s^{a+1} t^{b-1}
            push_term(&mut next, a, b + 1, -2.0 * a as f64 * c);
            if b > 0 {
                push_term(&mut next, a + 1, b - 1, b as f64 * c);
            }
        }
        terms = next;
    }
    let s = {
        let c = x.cosh();
        1.0 / (c * c)
    };
    let t = x.tanh();
    terms
        .iter()
        .map(|&(a, b, c)| c * s.powi(a as i32) * t.powi(b as i32))
        .sum()
}

fn push_term(terms: &mut Vec<(u32, u32, f64)>, a: u32, b: u32, c: f64) {
    if c == 0.0 {
        return;
    }
    if let Some(entry) = terms.iter_mut().find(|e| e.0 == a && e.1 == b) {
        entry.2 += c;
    } else {
        terms.push((a, b, c));
    }
}

// ---------------------------------------------------------------------------
// Wavefunctions
// ---------------------------------------------------------------------------

/// Closed-form data for one bound state.
///
/// Value, first and second derivatives are independent closed forms; orders
/// three and above come from differentiating the eigenvalue equation
/// psi'' = 2 (V - E) psi, which only needs derivatives of V.
struct WaveForm {
    kind: FamilyKind,
    index: usize,
    energy: f64,
    sign: f64,
}

impl WaveForm {
    fn new(kind: FamilyKind, index: usize) -> Self {
        let family = SolvableFamily::from_kind(kind);
        let energy = family.energy(index).expect("index validated by caller");
        let sign = match kind {
            FamilyKind::Harmonic { .. } => if index.is_multiple_of(2) { 1.0 } else { -1.0 },
            FamilyKind::InfiniteWell { .. } => 1.0,
            FamilyKind::PoschlTeller { lambda } => if lambda % 2 == 0 { 1.0 } else { -1.0 },
            FamilyKind::Morse { .. } => if index.is_multiple_of(2) { 1.0 } else { -1.0 },
        };
        WaveForm { kind, index, energy, sign }
    }

    fn value(&self, x: f64) -> f64 {
        self.sign
            * match self.kind {
                FamilyKind::Harmonic { omega } => {
                    let u = omega.sqrt() * x;
                    let c = (omega / std::f64::consts::PI).powf(0.25);
                    let (h, _) = poly::hermite_normalized(self.index, u);
                    c * h * (-0.5 * u * u).exp()
                }
                FamilyKind::InfiniteWell { length } => {
                    if x <= 0.0 || x >= length {
                        return 0.0;
                    }
                    let k = (self.index as f64 + 1.0) * std::f64::consts::PI / length;
                    (2.0 / length).sqrt() * (k * x).sin()
                }
                FamilyKind::PoschlTeller { lambda } => {
                    let (l, mu) = self.pt_orders(lambda);
                    let t = x.tanh();
                    let (r, _, _) = poly::assoc_legendre_reduced(l, mu, t);
                    self.pt_norm(lambda) * sech_pow(x, mu) * r
                }
                FamilyKind::Morse { .. } => {
                    let m = self.morse_data();
                    let z = m.z(x);
                    let lag = poly::laguerre(self.index, 2.0 * m.s, z);
                    if lag == 0.0 {
                        return 0.0;
                    }
                    lag.signum() * (m.ln_prefactor(z) + lag.abs().ln()).exp()
                }
            }
    }

    fn dvalue(&self, x: f64) -> f64 {
        self.sign
            * match self.kind {
                FamilyKind::Harmonic { omega } => {
                    let sw = omega.sqrt();
                    let u = sw * x;
                    let c = (omega / std::f64::consts::PI).powf(0.25);
                    let (h, hm1) = poly::hermite_normalized(self.index, u);
                    let dh = (2.0 * self.index as f64).sqrt() * hm1;
                    c * sw * (dh - u * h) * (-0.5 * u * u).exp()
                }
                FamilyKind::InfiniteWell { length } => {
                    if x <= 0.0 || x >= length {
                        return 0.0;
                    }
                    let k = (self.index as f64 + 1.0) * std::f64::consts::PI / length;
                    (2.0 / length).sqrt() * k * (k * x).cos()
                }
                FamilyKind::PoschlTeller { lambda } => {
                    let (l, mu) = self.pt_orders(lambda);
                    let t = x.tanh();
                    let (rl, rlm1, _) = poly::assoc_legendre_reduced(l, mu, t);
                    let lf = l as f64;
                    self.pt_norm(lambda)
                        * sech_pow(x, mu)
                        * (-lf * t * rl + (lf + mu as f64) * rlm1)
                }
                FamilyKind::Morse { .. } => {
                    let m = self.morse_data();
                    let z = m.z(x);
                    let alpha = 2.0 * m.s;
                    let lag = poly::laguerre(self.index, alpha, z);
                    let dlag = if self.index == 0 {
                        0.0
                    } else {
                        -poly::laguerre(self.index - 1, alpha + 1.0, z)
                    };
                    // dpsi/dx = -a z * d/dz [z^s e^{-z/2} L]
                    let inner = (m.s / z - 0.5) * lag + dlag;
                    -m.a * z * m.ln_prefactor(z).exp() * inner
                }
            }
    }

    fn d2value(&self, x: f64) -> f64 {
        self.sign
            * match self.kind {
                FamilyKind::Harmonic { omega } => {
                    let sw = omega.sqrt();
                    let u = sw * x;
                    let c = (omega / std::f64::consts::PI).powf(0.25);
                    let n = self.index;
                    let (h, hm1) = poly::hermite_normalized(n, u);
                    let dh = (2.0 * n as f64).sqrt() * hm1;
                    let d2h = if n >= 2 {
                        let (hm2, _) = poly::hermite_normalized(n - 2, u);
                        (2.0 * n as f64).sqrt() * (2.0 * (n as f64 - 1.0)).sqrt() * hm2
                    } else {
                        0.0
                    };
                    c * omega * (d2h - 2.0 * u * dh + (u * u - 1.0) * h) * (-0.5 * u * u).exp()
                }
                FamilyKind::InfiniteWell { length } => {
                    if x <= 0.0 || x >= length {
                        return 0.0;
                    }
                    let k = (self.index as f64 + 1.0) * std::f64::consts::PI / length;
                    -(2.0 / length).sqrt() * k * k * (k * x).sin()
                }
                FamilyKind::PoschlTeller { lambda } => {
                    let (l, mu) = self.pt_orders(lambda);
                    let t = x.tanh();
                    let s2 = 1.0 - t * t; // sech^2
                    let (rl, rlm1, rlm2) = poly::assoc_legendre_reduced(l, mu, t);
                    let lf = l as f64;
                    let muf = mu as f64;
                    // d/dx of sech^mu * (-l t R_l + (l+mu) R_{l-1}), using
                    // d/dx [sech^mu R_k] = sech^mu (-k t R_k + (k+mu) R_{k-1})
                    let term1 = -lf * s2 * rl;
                    let term2 = -lf * t * (-lf * t * rl + (lf + muf) * rlm1);
                    let term3 = (lf + muf)
                        * (-(lf - 1.0) * t * rlm1 + (lf - 1.0 + muf) * rlm2);
                    self.pt_norm(lambda) * sech_pow(x, mu) * (term1 + term2 + term3)
                }
                FamilyKind::Morse { .. } => {
                    let m = self.morse_data();
                    let z = m.z(x);
                    let alpha = 2.0 * m.s;
                    let n = self.index;
                    let lag = poly::laguerre(n, alpha, z);
                    let dlag = if n == 0 {
                        0.0
                    } else {
                        -poly::laguerre(n - 1, alpha + 1.0, z)
                    };
                    let d2lag = if n <= 1 {
                        0.0
                    } else {
                        poly::laguerre(n - 2, alpha + 2.0, z)
                    };
                    let f1 = (m.s / z - 0.5) * lag + dlag;
                    let f2 = ((m.s / z - 0.5).powi(2) - m.s / (z * z)) * lag
                        + 2.0 * (m.s / z - 0.5) * dlag
                        + d2lag;
                    // psi'' = a^2 z (z F'' + F') with F(z) = z^s e^{-z/2} L(z)
                    m.a * m.a * z * m.ln_prefactor(z).exp() * (z * f2 + f1)
                }
            }
    }

    /// ln |psi|; -inf at nodes and beyond representable tails.
    fn log_abs(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Harmonic { omega } => {
                let u = omega.sqrt() * x;
                let c = 0.25 * (omega / std::f64::consts::PI).ln();
                let (h, _) = poly::hermite_normalized(self.index, u);
                c + h.abs().ln() - 0.5 * u * u
            }
            FamilyKind::InfiniteWell { length } => {
                if x <= 0.0 || x >= length {
                    return f64::NEG_INFINITY;
                }
                let k = (self.index as f64 + 1.0) * std::f64::consts::PI / length;
                0.5 * (2.0 / length).ln() + (k * x).sin().abs().ln()
            }
            FamilyKind::PoschlTeller { lambda } => {
                let (l, mu) = self.pt_orders(lambda);
                let t = x.tanh();
                let (r, _, _) = poly::assoc_legendre_reduced(l, mu, t);
                self.pt_norm(lambda).ln() - mu as f64 * ln_cosh(x) + r.abs().ln()
            }
            FamilyKind::Morse { .. } => {
                let m = self.morse_data();
                let z = m.z(x);
                let lag = poly::laguerre(self.index, 2.0 * m.s, z);
                m.ln_prefactor(z) + lag.abs().ln()
            }
        }
    }

    /// psi'/psi with common factors cancelled; has poles exactly at nodes.
    fn log_deriv(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Harmonic { omega } => {
                let sw = omega.sqrt();
                let u = sw * x;
                let (h, hm1) = poly::hermite_normalized(self.index, u);
                sw * ((2.0 * self.index as f64).sqrt() * hm1 / h - u)
            }
            FamilyKind::InfiniteWell { length } => {
                let k = (self.index as f64 + 1.0) * std::f64::consts::PI / length;
                k * (k * x).cos() / (k * x).sin()
            }
            FamilyKind::PoschlTeller { lambda } => {
                let (l, mu) = self.pt_orders(lambda);
                let t = x.tanh();
                let (rl, rlm1, _) = poly::assoc_legendre_reduced(l, mu, t);
                let lf = l as f64;
                -lf * t + (lf + mu as f64) * rlm1 / rl
            }
            FamilyKind::Morse { .. } => {
                let m = self.morse_data();
                let z = m.z(x);
                let alpha = 2.0 * m.s;
                let lag = poly::laguerre(self.index, alpha, z);
                let dlag = if self.index == 0 {
                    0.0
                } else {
                    -poly::laguerre(self.index - 1, alpha + 1.0, z)
                };
                -m.a * (m.s - 0.5 * z + z * dlag / lag)
            }
        }
    }

    fn pt_orders(&self, lambda: u32) -> (u32, u32) {
        (lambda, lambda - self.index as u32)
    }

    fn pt_norm(&self, lambda: u32) -> f64 {
        let mu = lambda - self.index as u32;
        // integral of [P_l^mu(tanh x)]^2 dx = (l+mu)! / (mu (l-mu)!)
        (0.5
            * ((mu as f64).ln() + poly::ln_factorial((lambda - mu) as usize)
                - poly::ln_factorial((lambda + mu) as usize)))
        .exp()
    }

    fn morse_data(&self) -> MorseData {
        let FamilyKind::Morse { depth, width } = self.kind else {
            unreachable!()
        };
        let a = 1.0 / width;
        let lambda_m = width * (2.0 * depth).sqrt();
        let s = lambda_m - self.index as f64 - 0.5;
        let ln_norm = 0.5
            * (a.ln() + poly::ln_factorial(self.index) + (2.0 * s).ln()
                - poly::ln_gamma_fn(2.0 * lambda_m - self.index as f64));
        MorseData { a, lambda_m, s, ln_norm }
    }

    /// Window with |psi|^2 < eps outside; conservative closed-form bounds.
    fn support_window(&self, eps: f64, family: &SolvableFamily) -> Interval {
        let ln_eps = eps.ln();
        match self.kind {
            FamilyKind::Harmonic { omega } => {
                // |psi|^2 ~ e^{-omega x^2}; add the turning-point scale
                let tail = (-ln_eps / omega).sqrt();
                let turning = ((2.0 * self.index as f64 + 1.0) / omega).sqrt();
                let r = tail + turning + 1.0;
                Interval::new(-r, r)
            }
            FamilyKind::InfiniteWell { .. } => family.domain(),
            FamilyKind::PoschlTeller { lambda } => {
                // |psi|^2 ~ e^{-2 mu |x|}
                let mu = (lambda - self.index as u32) as f64;
                let r = -ln_eps / (2.0 * mu) + (lambda as f64) + 2.0;
                Interval::new(-r, r)
            }
            FamilyKind::Morse { .. } => {
                let m = self.morse_data();
                // right tail: |psi|^2 ~ (2 lambda_m)^{2s} e^{-2 a s x}
                let right = (-ln_eps + 2.0 * m.s * (2.0 * m.lambda_m).ln().max(0.0))
                    / (2.0 * m.a * m.s)
                    + 4.0 / m.a;
                // left tail: dominated by e^{-z}, z = 2 lambda_m e^{-a x};
                // solve z/2 - s ln z = -ln_eps/2 roughly via z ~ -ln_eps + pad
                let z_big = -ln_eps + 2.0 * m.s * (-ln_eps).max(2.0).ln() + 10.0;
                let left = -(z_big / (2.0 * m.lambda_m)).ln() / m.a - 1.0;
                Interval::new(left.min(-1.0), right.max(1.0))
            }
        }
    }
}

struct MorseData {
    a: f64,
    lambda_m: f64,
    s: f64,
    ln_norm: f64,
}

impl MorseData {
    fn z(&self, x: f64) -> f64 {
        2.0 * self.lambda_m * (-self.a * x).exp()
    }

    fn ln_prefactor(&self, z: f64) -> f64 {
        self.ln_norm + self.s * z.ln() - 0.5 * z
    }
}

fn sech_pow(x: f64, mu: u32) -> f64 {
    (-(mu as f64) * ln_cosh(x)).exp()
}

fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (1.0 + (-2.0 * ax).exp()).ln() - std::f64::consts::LN_2
}

/// Field wrapper exposing the wavefunction with derivatives of any order.
struct WaveField {
    wave: Arc<WaveForm>,
    domain: Interval,
}

impl ScalarField for WaveField {
    fn domain(&self) -> Interval {
        self.domain
    }

    fn deriv(&self, x: f64, order: u32) -> f64 {
        match order {
            0 => self.wave.value(x),
            1 => self.wave.dvalue(x),
            2 => self.wave.d2value(x),
            k => {
                // psi^{(k)} = 2 sum_j C(k-2, j) V^{(j)} psi^{(k-2-j)} - 2E psi^{(k-2)}
                let pot = SolvableFamily::from_kind(self.wave.kind).potential();
                let m = k - 2;
                let mut acc = -2.0 * self.wave.energy * self.deriv(x, m);
                let mut binom = 1.0;
                for j in 0..=m {
                    if j > 0 {
                        binom = binom * (m - j + 1) as f64 / j as f64;
                    }
                    acc += 2.0 * binom * pot.deriv(x, j) * self.deriv(x, m - j);
                }
                acc
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Node finding
// ---------------------------------------------------------------------------

fn locate_nodes(wave: &WaveForm, family: &SolvableFamily, i: usize) -> Vec<f64> {
    if i == 0 {
        return Vec::new();
    }
    let window = wave.support_window(1e-14, family);
    let scan = Interval::new(
        window.lo.max(family.domain().lo),
        window.hi.min(family.domain().hi),
    );
    let points = 2048 * (i + 1);
    let h = scan.len() / points as f64;
    // stay strictly inside: the well wavefunction vanishes at the walls
    // without those being nodes
    let mut nodes = Vec::with_capacity(i);
    let mut prev_x = scan.lo + 0.5 * h;
    let mut prev_v = wave.value(prev_x);
    for j in 1..points {
        let x = scan.lo + (0.5 + j as f64) * h;
        let v = wave.value(x);
        if prev_v != 0.0 && v != 0.0 && prev_v.signum() != v.signum() {
            nodes.push(bisect_node(wave, prev_x, x));
        } else if v == 0.0 && x > scan.lo && x < scan.hi {
            nodes.push(x);
        }
        prev_x = x;
        prev_v = v;
    }
    nodes
}

fn bisect_node(wave: &WaveForm, mut a: f64, mut b: f64) -> f64 {
    let mut fa = wave.value(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = wave.value(mid);
        if fm.abs() < 1e-13 || (b - a) < f64::EPSILON * mid.abs().max(1.0) {
            return mid;
        }
        if fa.signum() == fm.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
