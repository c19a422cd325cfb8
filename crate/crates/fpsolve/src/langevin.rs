//! Stochastic check of the steady state: overdamped Langevin sampling of
//! dX = -U'(X) dt + dB with unit noise (D = 1/2), compared against e^{-2U}
//! through a histogram total-variation distance.
//!
//! Chains draw from per-chain ChaCha substreams of one seed, so a config
//! reproduces its sample stream bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{FpError, Result};
use crate::field::{Interval, ScalarField};
use crate::quad;
use crate::solutions::SteadyState;
use crate::susy::DriftPotential;

/// Euler-Maruyama configuration. `steps` counts all steps per chain,
/// including the discarded `burn_in` prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub dt: f64,
    pub steps: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub chains: usize,
    pub reflection_bounds: Interval,
}

/// Post-burn-in positions of every chain, in chain order.
pub struct Samples {
    pub positions: Vec<f64>,
    pub bounds: Interval,
    pub config: SamplerConfig,
}

pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

pub struct SampleStats {
    pub histogram: Histogram,
    pub expected: Vec<f64>,
    pub tv_distance: f64,
    pub n_effective: f64,
}

const STABILITY_SCAN_POINTS: usize = 512;
const STABILITY_LIMIT: f64 = 0.5;

fn validate(u: &DriftPotential, cfg: &SamplerConfig) -> Result<()> {
    if !cfg.dt.is_finite() || cfg.dt <= 0.0 {
        return Err(FpError::InvalidConfig("dt must be positive".into()));
    }
    if cfg.steps <= cfg.burn_in {
        return Err(FpError::InvalidConfig(format!(
            "steps ({}) must exceed burn_in ({})",
            cfg.steps, cfg.burn_in
        )));
    }
    if cfg.chains == 0 {
        return Err(FpError::InvalidConfig("need at least one chain".into()));
    }
    if !cfg.reflection_bounds.is_finite() {
        return Err(FpError::InvalidConfig(
            "reflection bounds must be finite".into(),
        ));
    }
    for &s in u.singularities() {
        if s > cfg.reflection_bounds.lo + 1e-12 && s < cfg.reflection_bounds.hi - 1e-12 {
            return Err(FpError::InvalidConfig(format!(
                "reflection bounds must stay inside one nodal domain; singularity at {s}"
            )));
        }
    }
    // dt * max |U'| <= 1/2 over an interior scan of the bounds
    let b = cfg.reflection_bounds;
    let mut max_drift: f64 = 0.0;
    for j in 0..STABILITY_SCAN_POINTS {
        let x = b.lo + b.len() * (j as f64 + 0.5) / STABILITY_SCAN_POINTS as f64;
        let d = u.d1(x).abs();
        if d.is_finite() {
            max_drift = max_drift.max(d);
        }
    }
    if cfg.dt * max_drift > STABILITY_LIMIT {
        return Err(FpError::InvalidConfig(format!(
            "dt * max|U'| = {:.3} exceeds the stability heuristic {STABILITY_LIMIT}",
            cfg.dt * max_drift
        )));
    }
    Ok(())
}

/// Run the Euler-Maruyama chains. Proposals that would cross a drift
/// singularity are rejected (the position is retained); excursions past the
/// reflection bounds fold back inside.
pub fn simulate(u: &DriftPotential, cfg: &SamplerConfig) -> Result<Samples> {
    validate(u, cfg)?;
    let bounds = cfg.reflection_bounds;
    let x0 = bounds.anchor();
    if u.singularities().iter().any(|s| (x0 - s).abs() < 1e-12) {
        return Err(FpError::SingularStart(x0));
    }
    let kept = cfg.steps - cfg.burn_in;
    let mut positions = Vec::with_capacity(kept * cfg.chains);
    let sqrt_dt = cfg.dt.sqrt();
    for chain in 0..cfg.chains {
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(chain as u64);
        let mut x = x0;
        for step in 0..cfg.steps {
            let noise: f64 = StandardNormal.sample(&mut rng);
            let mut proposal = x - u.d1(x) * cfg.dt + sqrt_dt * noise;
            if !proposal.is_finite() {
                return Err(FpError::UnstableStep(step));
            }
            let crosses = u.singularities().iter().any(|&s| {
                (x - s) * (proposal - s) <= 0.0 || (proposal - s).abs() < 1e-12
            });
            if !crosses {
                let mut folds = 0;
                while !bounds.contains(proposal) {
                    if proposal <= bounds.lo {
                        proposal = 2.0 * bounds.lo - proposal;
                    } else if proposal >= bounds.hi {
                        proposal = 2.0 * bounds.hi - proposal;
                    }
                    folds += 1;
                    if folds > 100 {
                        return Err(FpError::UnstableStep(step));
                    }
                }
                x = proposal;
            }
            if step >= cfg.burn_in {
                positions.push(x);
            }
        }
    }
    Ok(Samples {
        positions,
        bounds,
        config: cfg.clone(),
    })
}

/// Histogram the samples over their bounds and compare with the steady
/// density: tv = (1/2) sum |observed_b - expected_b|.
pub fn histogram_tv(samples: &Samples, steady: &SteadyState, bins: usize) -> Result<SampleStats> {
    let n = samples.positions.len();
    if n < 100_000 {
        return Err(FpError::InvalidConfig(format!(
            "histogram needs at least 1e5 samples, got {n}"
        )));
    }
    if bins == 0 || bins > n / 100 {
        return Err(FpError::EmptyBins { bins, samples: n });
    }
    let b = samples.bounds;
    let width = b.len() / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|j| b.lo + width * j as f64).collect();
    let mut counts = vec![0u64; bins];
    for &x in &samples.positions {
        let mut idx = ((x - b.lo) / width) as usize;
        if idx >= bins {
            idx = bins - 1;
        }
        counts[idx] += 1;
    }
    let density = steady.density();
    let mut expected = Vec::with_capacity(bins);
    for j in 0..bins {
        let lo = edges[j];
        let hi = edges[j + 1];
        let mass = quad::integrate(|x| density.eval(x), Interval::new(lo, hi), 1e-12)?;
        expected.push(mass);
    }
    let tv = 0.5
        * counts
            .iter()
            .zip(&expected)
            .map(|(c, p)| (*c as f64 / n as f64 - p).abs())
            .sum::<f64>();
    let n_eff = effective_sample_size(&samples.positions);
    Ok(SampleStats {
        histogram: Histogram { edges, counts },
        expected,
        tv_distance: tv,
        n_effective: n_eff,
    })
}

/// Batch-means estimate of the effective sample size.
fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    let batches = ((n as f64).sqrt() as usize).clamp(10, 1000);
    let b = n / batches;
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return n as f64;
    }
    let mut var_means = 0.0;
    for k in 0..batches {
        let seg = &xs[k * b..(k + 1) * b];
        let m = seg.iter().sum::<f64>() / b as f64;
        var_means += (m - mean) * (m - mean);
    }
    var_means /= batches as f64;
    let tau = (b as f64 * var_means / var).max(1.0);
    n as f64 / tau
}
