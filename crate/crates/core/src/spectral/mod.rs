//! Finite-box restrictions of the operator: banded finite-difference
//! spectra, matrix-valued shooting, and the box-level probes (integrated
//! density of states, level spacing, resolvent decay, eigenfunction
//! decay, solution bounds).

pub mod banded;
pub mod box_op;
pub mod fd;
pub mod ids;
pub mod probes;
pub mod shooting;

pub use banded::{BandedLu, SymBanded};
pub use box_op::BoxOperator;
pub use fd::{box_eigenvalues_fd, count_below, eigenpair_near, eigenvalues_in_window};
pub use ids::{holder_fit, ids_estimate, HolderFit, IDSCurve};
pub use probes::{
    bound_constants, eigenfunction_decay, good_box_probe, gronwall_exponent,
    masked_resolvent_norm, solution_bound_check, wegner_probe, BoundCheckReport, BoundConstants,
    DecayFit,
};
pub use shooting::{
    box_eigenvalues_shooting, green_kernel, integrate_matrix_solution, propagate_from_left,
    shooting_block, wronskian, wronskian_drift, GreenKernel, MatrixSolution, Side,
};
