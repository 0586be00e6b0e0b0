//! Polar decomposition and spectral projections.

use super::algebra::AlgElement;
use super::linalg;
use crate::error::{Error, Result};

/// Result of the polar decomposition `x = u|x|` of an invertible element.
#[derive(Clone, Debug)]
pub struct PolarResult {
    /// The unitary factor `u`.
    pub unitary_part: AlgElement,
    /// The positive factor `|x| = (x*x)^{1/2}`.
    pub positive_part: AlgElement,
    /// `‖x − u‖`; for invertible `x` this is the distance from `x` to the
    /// unitary group and equals `max{‖x‖ − 1, 1 − 1/‖x⁻¹‖}`.
    pub distance_to_unitary: f64,
}

/// Polar decomposition of an invertible element. The unitary factor comes
/// from the scaled Newton iteration; `|x| = u* x` (Hermitian-symmetrized).
pub fn polar(x: &AlgElement) -> Result<PolarResult> {
    if !x.is_invertible() {
        return Err(Error::NotInvertible(
            "polar decomposition needs an invertible element for a unitary factor".into(),
        ));
    }
    let mut unitary_blocks = Vec::with_capacity(x.blocks().len());
    let mut positive_blocks = Vec::with_capacity(x.blocks().len());
    for m in x.blocks() {
        let u = linalg::polar_unitary(m);
        let p = u.adjoint() * m;
        positive_blocks.push((&p + p.adjoint()) * num_complex::Complex64::new(0.5, 0.0));
        unitary_blocks.push(u);
    }
    let unitary_part = AlgElement::from_blocks(x.algebra().clone(), unitary_blocks)?;
    let positive_part = AlgElement::from_blocks(x.algebra().clone(), positive_blocks)?;
    let distance_to_unitary = x.sub(&unitary_part)?.op_norm();
    Ok(PolarResult {
        unitary_part,
        positive_part,
        distance_to_unitary,
    })
}

/// The closed form `max{‖x‖ − 1, 1 − 1/‖x⁻¹‖}` for the distance from an
/// invertible element to the unitary group.
pub fn nearest_unitary_distance_formula(x: &AlgElement) -> Result<f64> {
    if !x.is_invertible() {
        return Err(Error::NotInvertible("distance formula needs invertible input".into()));
    }
    let smax = x.op_norm();
    let smin = x.smallest_singular_value();
    Ok((smax - 1.0).max(1.0 - smin))
}

/// Spectral projection `χ_{[0,λ]}(h)` of a Hermitian element, computed via
/// blockwise eigendecomposition. Eigenvalues within `eig_slack` below zero
/// are treated as zero so that positive-semidefinite inputs with rounding
/// noise are handled; `λ < 0` returns the zero projection.
pub fn spectral_projection(h: &AlgElement, lambda: f64) -> Result<AlgElement> {
    let scale = h.op_norm().max(1.0);
    let herm_tol = 1e-9 * scale;
    if h.hermitian_residual() > herm_tol {
        return Err(Error::Structural(format!(
            "spectral_projection needs a Hermitian input (residual {:.3e})",
            h.hermitian_residual()
        )));
    }
    if lambda < 0.0 {
        return Ok(h.algebra().zero());
    }
    let eig_slack = 1e-12 * scale;
    let blocks = h
        .blocks()
        .iter()
        .map(|m| linalg::hermitian_spectral_projector(m, -eig_slack, lambda + eig_slack))
        .collect();
    AlgElement::from_blocks(h.algebra().clone(), blocks)
}

/// Eigenvalues of a Hermitian element over all blocks, ascending.
pub fn hermitian_eigenvalues(h: &AlgElement) -> Vec<f64> {
    let mut evs: Vec<f64> = h
        .blocks()
        .iter()
        .flat_map(linalg::hermitian_eigenvalues)
        .collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evs
}
