//! Transfer-matrix machinery for matrix-valued one-dimensional Schrödinger
//! operators with cell-wise random potentials.
//!
//! The crate is organized around four pieces:
//!
//! * [`symplectic`]: the symplectic group `Sp(2N)`, its Lie algebra `sp_N`,
//!   block closed-form matrix exponentials, exterior powers, and
//!   bracket-closure computations.
//! * [`model`]: the model configuration (channel count, cell length,
//!   couplings, single-site law), per-cell disorder sampling, site and
//!   transfer matrices, and the admissible energy window.
//! * [`lyapunov`]: QR-reorthonormalized cocycle iteration for the full
//!   Lyapunov spectrum, exterior-power cocycles, and Monte Carlo probes
//!   (Furstenberg integral, large deviations, negative moments).
//! * [`spectral`]: finite boxes with Dirichlet ends; a finite-difference
//!   backend (banded inertia counting) and a shooting backend (exact
//!   per-cell propagation, Wronskian root location), integrated density of
//!   states, Wegner-type and good-box probes, eigenfunction decay fits, and
//!   solution-bound checks.
//!
//! All rates (Lyapunov exponents, decay rates, probe exponents) are reported
//! per unit length; per-step values appear only as metadata.

pub mod error;
pub mod lyapunov;
pub mod model;
pub mod report;
pub mod spectral;
pub mod symplectic;
pub mod tolerances;
pub mod util;

pub use error::CoreError;
pub use model::{DisorderRealization, EnergyWindow, ModelConfig};
pub use report::ProbeReport;
pub use symplectic::{HamiltonianMatrix, LieBasis, SymplecticMatrix, WedgeMatrix};

/// Crate result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
