//! The column/row norm condition characterizing invertibility of a
//! contraction inside a finite-dimensional von Neumann algebra.
//!
//! For `‖x‖ ≤ 1` the condition at level `α` against a test element `y` reads
//!
//! ```text
//! ‖[x; y]‖² ≥ α + ‖y‖²   and   ‖[x  y]‖² ≥ α + ‖y‖²      (C)
//! ```
//!
//! where `‖[x; y]‖² = ‖x*x + y*y‖` and `‖[x y]‖² = ‖xx* + yy*‖`. An
//! invertible `x` satisfies (C) for every `y` with `α = ‖x⁻¹‖⁻²`, and that
//! `α` is maximal: any inflation is witnessed by a spectral projection of
//! `x*x` or `xx*`.

use super::algebra::AlgElement;
use super::factor::{hermitian_eigenvalues, spectral_projection};
use crate::error::Result;

/// `‖[x; y]‖² = ‖x*x + y*y‖`.
pub fn column_norm_sq(x: &AlgElement, y: &AlgElement) -> Result<f64> {
    let xs = x.adjoint().mul(x)?;
    let ys = y.adjoint().mul(y)?;
    Ok(xs.add(&ys)?.op_norm())
}

/// `‖[x  y]‖² = ‖xx* + yy*‖`.
pub fn row_norm_sq(x: &AlgElement, y: &AlgElement) -> Result<f64> {
    let xs = x.mul(&x.adjoint())?;
    let ys = y.mul(&y.adjoint())?;
    Ok(xs.add(&ys)?.op_norm())
}

/// Check condition (C) for one test element; callers are expected to pass a
/// contraction `x` (`‖x‖ ≤ 1` up to tolerance).
pub fn check_condition_c(x: &AlgElement, alpha: f64, y: &AlgElement, tol: f64) -> Result<bool> {
    let rhs = alpha + y.op_norm().powi(2) - tol;
    Ok(column_norm_sq(x, y)? >= rhs && row_norm_sq(x, y)? >= rhs)
}

/// Scan the spectral projections of `x*x` and `xx*` for a nonzero projection
/// violating (C) at level `alpha`. Spectral projections suffice: if any
/// projection violates (C), one of these does.
pub fn find_violating_projection(
    x: &AlgElement,
    alpha: f64,
    tol: f64,
) -> Result<Option<AlgElement>> {
    let candidates = [x.adjoint().mul(x)?, x.mul(&x.adjoint())?];
    for h in &candidates {
        for lambda in hermitian_eigenvalues(h) {
            let p = spectral_projection(h, lambda.max(0.0))?;
            if p.op_norm() < 0.5 {
                continue; // zero projection
            }
            if !check_condition_c(x, alpha, &p, tol)? {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::algebra::{AlgElement, BlockAlgebra, CMat, CVec};
    use crate::matcore::random;
    use num_complex::Complex64;

    fn diag2(a: f64, b: f64) -> AlgElement {
        let alg = BlockAlgebra::full(2).unwrap();
        AlgElement::from_blocks(
            alg,
            vec![CMat::from_diagonal(&CVec::from_vec(vec![
                Complex64::new(a, 0.0),
                Complex64::new(b, 0.0),
            ]))],
        )
        .unwrap()
    }

    #[test]
    fn unitary_satisfies_c_at_one() {
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let mut rng = random::rng_from_seed(1);
        let u = random::random_unitary(&alg, &mut rng);
        for _ in 0..25 {
            let p = random::random_projection(&alg, &mut rng);
            assert!(check_condition_c(&u, 1.0, &p, 1e-9).unwrap());
        }
    }

    #[test]
    fn diagonal_counterexample() {
        // x = diag(1,0), y = diag(0,1): column norm² = 1 < 0.5 + 1.
        let x = diag2(1.0, 0.0);
        let y = diag2(0.0, 1.0);
        assert!((column_norm_sq(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!(!check_condition_c(&x, 0.5, &y, 1e-9).unwrap());
    }

    #[test]
    fn invertible_alpha_against_random_tests() {
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let mut rng = random::rng_from_seed(17);
        for _ in 0..10 {
            let x = random::random_invertible(&alg, &mut rng, 0.05);
            let alpha = x.smallest_singular_value().powi(2);
            for _ in 0..100 {
                let p = random::random_projection(&alg, &mut rng);
                assert!(check_condition_c(&x, alpha, &p, 1e-9).unwrap());
                let y = random::random_contraction(&alg, &mut rng);
                assert!(check_condition_c(&x, alpha, &y, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn unitary_has_no_violation_at_one() {
        let alg = BlockAlgebra::full(3).unwrap();
        let u = random::random_unitary_from_seed(&alg, 3);
        assert!(find_violating_projection(&u, 1.0, 1e-9).unwrap().is_none());
    }

    #[test]
    fn rank_deficient_yields_kernel_projection() {
        let x = diag2(1.0, 0.0);
        let p = find_violating_projection(&x, 0.25, 1e-9).unwrap().expect("violation");
        assert!(p.distance_to(&diag2(0.0, 1.0)).unwrap() < 1e-10);
    }

    #[test]
    fn inflated_alpha_is_witnessed() {
        let alg = BlockAlgebra::full(4).unwrap();
        let mut rng = random::rng_from_seed(23);
        for _ in 0..10 {
            let x = random::random_invertible(&alg, &mut rng, 0.1);
            let alpha = x.smallest_singular_value().powi(2);
            assert!(find_violating_projection(&x, alpha * 0.999, 1e-9).unwrap().is_none());
            let witness = find_violating_projection(&x, alpha * 1.01, 1e-9).unwrap();
            let p = witness.expect("inflated alpha must be violated");
            assert!(!check_condition_c(&x, alpha * 1.01, &p, 1e-9).unwrap());
        }
    }
}
