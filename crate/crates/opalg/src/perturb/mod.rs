//! Constructive multiplication-perturbation rigidity: the Hochschild
//! complex over a block algebra, the coboundary least-squares solver, the
//! quadratic correction iteration, and the end-to-end pipeline recovering a
//! *-isomorphism from an almost completely isometric map.

mod correct;
mod hochschild;
mod pipeline;

pub use correct::{
    correct_multiplication, IterationTrace, Multiplication, TraceStep, DEFECT_HYPOTHESIS,
};
pub use hochschild::{
    coboundary_1, coboundary_1_matrix, coboundary_2, solve_coboundary, solver_for,
    CoboundarySolver, TrilinearDefect,
};
pub use pipeline::{
    induced_multiplication, quotient_inverse_norm, recover_isomorphism, stability_surjectivity,
    RecoverOptions, RecoveryReport, SurjectivityBound,
};
