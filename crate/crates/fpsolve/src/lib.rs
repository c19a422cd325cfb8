//! Exactly solvable one-dimensional Fokker-Planck problems, generated from
//! solvable quantum potentials through the superpotential correspondence.
//!
//! Units: hbar = 1, m = 1, diffusion constant D = 1/2. Under this choice a
//! drift potential U(x) has steady density proportional to exp(-2U), and the
//! relaxation rates of the generated problem are quantum level spacings.
//!
//! Modules:
//! - [`catalog`]: solvable quantum families (harmonic, infinite well,
//!   Poschl-Teller, Morse) with closed-form eigenstates.
//! - [`susy`]: drift <-> superpotential <-> quantum-potential transforms.
//! - [`solutions`]: closed-form steady states and relaxation modes.
//! - [`oracle`]: finite-difference eigensolver, Crank-Nicolson evolution,
//!   residual checks, decay-rate fits — the independent numerical checks.
//! - [`langevin`]: seeded Euler-Maruyama sampler, the stochastic check.
//! - [`io`]: problem specs, reports, CSV/JSON export.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod field;
pub mod io;
pub mod langevin;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod solutions;
pub mod susy;
mod tridiag;

pub use error::{FpError, Result};
pub use field::{Interval, ScalarField};
