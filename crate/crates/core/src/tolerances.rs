//! Numerical tolerances used across the crate.
//!
//! These are part of the crate contract: tests and downstream tools compare
//! against the same constants instead of re-inventing thresholds.

/// Symplectic residual bound `||t(M) J M - J||` for accepted group elements.
pub const TOL_SYMP: f64 = 1e-10;

/// Relative tolerance for eigenvalue bisection and eigenvalue identity tests.
pub const TOL_EIG: f64 = 1e-8;

/// Relative rank tolerance for span / closure decisions.
pub const TOL_RANK: f64 = 1e-9;

/// Relative slack applied to the admissibility inequality `l * ||X|| <= d`
/// so window endpoints computed in floating point stay admissible.
pub const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// Default fraction of cocycle steps discarded before stationary averages.
pub const DEFAULT_BURN_IN: f64 = 0.1;

/// Default mesh points per potential cell (h = l / POINTS_PER_CELL).
pub const DEFAULT_POINTS_PER_CELL: usize = 16;

/// Number of batches used for batch-mean standard errors.
pub const BATCHES: usize = 32;

/// Channel-count guard for `{0,1}^N` enumerations.
pub const MAX_ENUM_CHANNELS: usize = 20;
