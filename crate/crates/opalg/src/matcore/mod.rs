//! Complex block-matrix algebra: elements of `⊕ᵢ M_{nᵢ}`, norms,
//! factorizations, spectral projections, and the invertibility/unitary
//! distance primitives used by the perturbation machinery.

mod algebra;
pub(crate) mod linalg;
mod condition;
mod factor;
pub mod random;

pub use algebra::{AlgElement, BlockAlgebra, CMat, CVec, ElementJson};
pub use condition::{check_condition_c, column_norm_sq, find_violating_projection, row_norm_sq};
pub use factor::{
    hermitian_eigenvalues, nearest_unitary_distance_formula, polar, spectral_projection,
    PolarResult,
};
