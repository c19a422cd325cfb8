//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, FpError>;

#[derive(Debug, Error)]
pub enum FpError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("parameter `{name}` out of range: {reason}")]
    ParamOutOfRange { name: String, reason: String },
    #[error("state index {index} is at or above the bound spectrum (count {count})")]
    IndexAboveSpectrum { index: usize, count: usize },
    #[error("evaluation at x = {x} hits a singularity at {singularity}")]
    EvalAtSingularity { x: f64, singularity: f64 },
    #[error("evaluation outside every admissible domain: x = {0}")]
    EvalOutsideDomain(f64),
    #[error("incompatible domains: {0}")]
    DomainMismatch(String),
    #[error("grid contains a drift singularity at {0} in its interior")]
    SingularityInsideGrid(f64),
    #[error("steady-state normalization diverges: {0}")]
    NonNormalizable(String),
    #[error("f0/psi_n ratio unbounded near {0}")]
    UnboundedRatio(f64),
    #[error("reference density does not decay below eps within the scan limit")]
    NoDecay,
    #[error("eigenvalue iteration failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("state vector became non-finite at t = {0}")]
    NonFiniteState(f64),
    #[error("non-finite field value at x = {0}")]
    NonFiniteValue(f64),
    #[error("no snapshots fall inside the decay-fit window")]
    FitWindowEmpty,
    #[error("distance to reference does not decrease over the run")]
    NonMonotoneDecay,
    #[error("chain position became non-finite at step {0}")]
    UnstableStep(usize),
    #[error("chain start point {0} coincides with a drift singularity")]
    SingularStart(f64),
    #[error("histogram bin count {bins} unsupported for {samples} samples")]
    EmptyBins { bins: usize, samples: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("quadrature did not reach tolerance {tol} (estimate {estimate}, error {error})")]
    QuadratureFailure { tol: f64, estimate: f64, error: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
