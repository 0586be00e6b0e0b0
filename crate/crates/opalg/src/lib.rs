//! Finite-dimensional operator-algebra numerics.
//!
//! This crate works at desk scale with algebras `⊕ᵢ M_{nᵢ}` and provides:
//!
//! * [`matcore`]: block-matrix elements, norms, polar decomposition,
//!   spectral projections, and the column/row invertibility condition;
//! * [`opspace`]: completely bounded (amplified) norm estimation for linear
//!   and bilinear maps, cb-distance upper bounds, and Kadison–Kastler
//!   distance estimates at a fixed representation;
//! * [`defect`]: multiplicativity and selfadjointness defects of a linear
//!   map, unitization and symmetrization, and verification of the
//!   quantitative defect bounds;
//! * [`perturb`]: the Hochschild complex over a block algebra, a coboundary
//!   least-squares solver, the quadratic correction iteration that turns an
//!   almost-multiplication into a genuine one, and the end-to-end recovery
//!   of a *-isomorphism from an almost completely isometric map;
//! * [`certify`]: outward-rounded interval arithmetic replaying the
//!   explicit constant chains behind the defect and recovery bounds, with a
//!   machine-checked verdict per constant;
//! * [`harness`]: instance generators and batch campaigns backing the
//!   `opalg` command-line tool.

pub mod certify;
pub mod defect;
pub mod error;
pub mod harness;
pub mod matcore;
pub mod opspace;
pub mod perturb;
pub mod tol;

pub use error::{Error, Result};
