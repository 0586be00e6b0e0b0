//! End-to-end recovery of a *-isomorphism from an almost completely
//! isometric map, and the quotient-inverse stability bound.
//!
//! The pipeline: unitize `L` to `S = L(1)⁻¹L`, symmetrize to
//! `T = ½(S + S⋆)`, pull the multiplication back through `T` as
//! `m(x,y) = T⁻¹(T(x)T(y))`, correct `m` to the native multiplication with
//! a transport `Φ`, and return `π = T∘Φ⁻¹`, which is multiplicative and
//! *-preserving up to the iteration tolerance.

use serde::{Deserialize, Serialize};

use super::correct::{correct_multiplication, IterationTrace, Multiplication};
use crate::defect::{symmetrize, unitize, DefectOptions};
use crate::error::{Error, Result};
use crate::matcore::random;
use crate::opspace::{cb_norm, BilMap, LinMap, NormEstimate};
use crate::tol;

/// `m(x,y) = T⁻¹(T(x)T(y))`; associative by construction and *-symmetric
/// when `T` is *-preserving.
pub fn induced_multiplication(map: &LinMap) -> Result<Multiplication> {
    if map.domain().coord_dim() != map.codomain().coord_dim() {
        return Err(Error::ShapeMismatch(
            "induced multiplication needs an invertible map".into(),
        ));
    }
    let inv = map.try_inverse()?;
    let alg = map.domain().clone();
    let bil = BilMap::from_action(&alg, &alg, |x, y| {
        inv.apply(&map.apply(x)?.mul(&map.apply(y)?)?)
    })?;
    Multiplication::new(bil, tol::ASSOCIATIVITY)
}

/// Options for the recovery pipeline.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RecoverOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Target defect norm for the correction iteration.
    pub tol: f64,
    pub max_iter: usize,
    /// Sample count for the pointwise residual measurements.
    pub residual_samples: usize,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        RecoverOptions {
            restarts: 8,
            seed: 0,
            tol: 1e-11,
            max_iter: 25,
            residual_samples: 50,
        }
    }
}

/// Measurements from a recovery run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// `‖L‖_cb‖L⁻¹‖_cb − 1` from the unitization estimates.
    pub measured_excess: f64,
    pub l1_inverse_norm: f64,
    pub l1_certificate_bound: f64,
    /// Initial defect norm of the pulled-back multiplication.
    pub defect_norm: f64,
    pub trace: IterationTrace,
    /// Max `‖π(xy) − π(x)π(y)‖` over random contraction pairs.
    pub mult_residual: f64,
    /// cb estimate of `‖π − π⋆‖`.
    pub sa_residual: f64,
    /// Max `‖π(u)*π(u) − 1‖` over random unitaries.
    pub unitary_residual: f64,
    /// cb estimate of `‖π − L‖`.
    pub distance_to_input: NormEstimate,
}

/// Recover a *-isomorphism close to `L`. Stage failures carry the stage
/// name; each stage checks its own quantitative hypothesis.
pub fn recover_isomorphism(l: &LinMap, opts: &RecoverOptions) -> Result<(LinMap, RecoveryReport)> {
    let defect_opts = DefectOptions {
        restarts: opts.restarts,
        seed: opts.seed,
        level: None,
        tol: 1e-9,
    };
    let unitized = unitize(l, &defect_opts).map_err(|e| e.in_stage("unitize"))?;
    let measured_excess = unitized.cb_l.value * unitized.cb_l_inv.value - 1.0;

    let t = symmetrize(&unitized.map);
    if !t.is_invertible() {
        return Err(Error::NotInvertible("symmetrized map is singular".into()).in_stage("symmetrize"));
    }

    let m = induced_multiplication(&t).map_err(|e| e.in_stage("induced-multiplication"))?;
    let defect_norm = m.defect_coord_norm();

    let (phi, trace) =
        correct_multiplication(&m, opts.tol, opts.max_iter).map_err(|e| e.in_stage("correct-multiplication"))?;
    let phi_inv = phi
        .try_inverse()
        .map_err(|e| e.in_stage("correct-multiplication"))?;
    let pi = t.compose(&phi_inv).map_err(|e| e.in_stage("assemble"))?;

    // residual measurements
    let alg = l.domain().clone();
    let mut mult_residual = 0.0f64;
    let mut unitary_residual = 0.0f64;
    for idx in 0..opts.residual_samples {
        let mut rng = random::rng_for_substream(opts.seed.wrapping_add(0xf00d), idx as u64);
        let x = random::random_contraction(&alg, &mut rng);
        let y = random::random_contraction(&alg, &mut rng);
        let lhs = pi.apply(&x.mul(&y)?)?;
        let rhs = pi.apply(&x)?.mul(&pi.apply(&y)?)?;
        mult_residual = mult_residual.max(lhs.sub(&rhs)?.op_norm());

        let u = random::random_unitary(&alg, &mut rng);
        let img = pi.apply(&u)?;
        let resid = img
            .adjoint()
            .mul(&img)?
            .sub(&pi.codomain().unit())?
            .op_norm();
        unitary_residual = unitary_residual.max(resid);
    }
    let sa = pi.sub(&pi.star())?;
    let sa_residual = cb_norm(&sa, opts.restarts, opts.seed.wrapping_add(0xdead))?.value;
    let distance_to_input = cb_norm(&pi.sub(l)?, opts.restarts, opts.seed.wrapping_add(0xbeef))?;

    Ok((
        pi,
        RecoveryReport {
            measured_excess,
            l1_inverse_norm: unitized.l1_inverse_norm,
            l1_certificate_bound: unitized.certificate_bound,
            defect_norm,
            trace,
            mult_residual,
            sa_residual,
            unitary_residual,
            distance_to_input,
        },
    ))
}

/// Quotient-inverse stability: if `T̃` inverts with bound `K` and
/// `‖T − S‖ < 1/K`, then `S̃` inverts with bound `K/(1 − K‖T−S‖)`.
/// Norms here are exact coordinate 2-norms (a faithful finite-dimensional
/// instance of the statement), and the measured quotient-inverse norm is
/// `1/σ_r(S)` with `r` the codomain dimension.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurjectivityBound {
    pub bound: f64,
    pub measured_inverse_norm: f64,
    pub surjective: bool,
    pub satisfied: bool,
    pub map_distance: f64,
}

pub fn stability_surjectivity(t: &LinMap, s: &LinMap, k: f64) -> Result<SurjectivityBound> {
    if k <= 0.0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let diff = t.sub(s)?.coord_norm();
    if diff >= 1.0 / k {
        return Err(Error::HypothesisNotMet {
            what: "‖T − S‖ < 1/K".into(),
            product: diff,
            limit: 1.0 / k,
        });
    }
    let bound = k / (1.0 - k * diff);
    let sv = s.singular_values();
    let db = s.codomain().coord_dim();
    let surjective = sv.len() >= db && sv[db - 1] > tol::INVERTIBILITY * sv[0];
    let measured_inverse_norm = if surjective { 1.0 / sv[db - 1] } else { f64::INFINITY };
    Ok(SurjectivityBound {
        bound,
        measured_inverse_norm,
        surjective,
        satisfied: surjective && measured_inverse_norm <= bound + tol::OPTIMIZATION,
        map_distance: diff,
    })
}

/// Measured quotient-inverse norm `1/σ_r(T)` of a surjective map.
pub fn quotient_inverse_norm(t: &LinMap) -> Result<f64> {
    let sv = t.singular_values();
    let db = t.codomain().coord_dim();
    if sv.len() < db || sv[db - 1] <= tol::INVERTIBILITY * sv[0] {
        return Err(Error::NotInvertible("map is not numerically surjective".into()));
    }
    Ok(1.0 / sv[db - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{AlgElement, BlockAlgebra};

    fn planted_iso(dims: &[usize], seed: u64) -> LinMap {
        let alg = BlockAlgebra::new(dims.to_vec()).unwrap();
        let u = random::random_unitary_from_seed(&alg, seed);
        LinMap::conjugation(&u)
    }

    fn perturbed_iso(dims: &[usize], eps: f64, seed: u64) -> LinMap {
        let pi = planted_iso(dims, seed);
        let alg = pi.domain().clone();
        let mut rng = random::rng_from_seed(seed.wrapping_add(99));
        let g = {
            let el = random::random_element(&alg, &mut rng);
            let lm = LinMap::left_mul(&el);
            lm.scale(1.0 / lm.coord_norm())
        };
        let pert = LinMap::identity(&alg).add(&g.scale(eps)).unwrap();
        pert.compose(&pi).unwrap()
    }

    #[test]
    fn induced_multiplication_of_isomorphism_is_native() {
        let pi = planted_iso(&[2, 3], 3);
        let m = induced_multiplication(&pi).unwrap();
        assert!(m.defect_coord_norm() < 1e-12);
    }

    #[test]
    fn induced_multiplication_is_associative_and_star_symmetric() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let mut rng = random::rng_from_seed(5);
        let g = random::random_element(&alg, &mut rng).scale_re(1e-3);
        let t0 = LinMap::identity(&alg).add(&LinMap::left_mul(&g)).unwrap();
        let t = t0.add(&t0.star()).unwrap().scale(0.5);
        let m = induced_multiplication(&t).unwrap();
        assert!(m.associativity_residual(30, 1) < 1e-10);
        assert!(m.star_symmetry_residual(30, 2) < 1e-10);
        // defect obeys ‖m − m_𝓐‖ ≤ ‖T⁻¹‖·‖T∨‖ at the estimate level
        let est = m.h_distance(4, 3).unwrap();
        let tinv = t.try_inverse().unwrap();
        let cb_tinv = cb_norm(&tinv, 4, 4).unwrap();
        let tdef = crate::defect::mult_defect(&t).unwrap();
        let cb_tdef = crate::opspace::bilinear_h_norm_default_level(&tdef, 4, 5).unwrap();
        assert!(
            est.value <= cb_tinv.value * cb_tdef.value + 1e-6,
            "{} vs {}",
            est.value,
            cb_tinv.value * cb_tdef.value
        );
    }

    #[test]
    fn recover_fixes_star_isomorphisms() {
        let pi = planted_iso(&[2], 7);
        let opts = RecoverOptions {
            restarts: 4,
            seed: 1,
            ..Default::default()
        };
        let (recovered, report) = recover_isomorphism(&pi, &opts).unwrap();
        assert!(recovered.sub(&pi).unwrap().coord_norm() < 1e-9);
        assert!(report.mult_residual < 1e-10);
        assert!(report.sa_residual < 1e-9);
        assert!(report.unitary_residual < 1e-10);
        assert!(report.distance_to_input.value < 1e-9);
    }

    #[test]
    fn recover_from_perturbed_isomorphism() {
        let l = perturbed_iso(&[2, 3], 1e-3, 11);
        let opts = RecoverOptions {
            restarts: 4,
            seed: 2,
            ..Default::default()
        };
        let (pi, report) = recover_isomorphism(&l, &opts).unwrap();
        assert!(report.mult_residual < 1e-9, "mult {}", report.mult_residual);
        assert!(report.sa_residual < 1e-9, "sa {}", report.sa_residual);
        assert!(report.unitary_residual < 1e-9, "uni {}", report.unitary_residual);
        // π stays close to L
        assert!(report.distance_to_input.value < 0.1);
        assert!(report.measured_excess > 0.0);
        // π maps the unit to (numerically) the unit
        let one = l.domain().unit();
        let img = pi.apply(&one).unwrap();
        assert!(img.distance_to(&one).unwrap() < 1e-8);
    }

    #[test]
    fn recovery_error_carries_stage_tag() {
        // a singular map fails at the unitize stage
        let alg = BlockAlgebra::full(2).unwrap();
        let zero = LinMap::identity(&alg).scale(0.0);
        let err = recover_isomorphism(&zero, &RecoverOptions::default()).unwrap_err();
        match err {
            Error::Stage { stage, .. } => assert_eq!(stage, "unitize"),
            other => panic!("expected stage error, got {other}"),
        }
    }

    #[test]
    fn stability_bound_formula() {
        let alg = BlockAlgebra::full(2).unwrap();
        let t = LinMap::identity(&alg);
        // S = T: bound = K
        let b = stability_surjectivity(&t, &t, 2.0).unwrap();
        assert!((b.bound - 2.0).abs() < 1e-12);
        assert!(b.satisfied);
        // ‖T−S‖ = 1/(2K): bound = 2K
        let s = t.scale(1.0 - 1.0 / 4.0);
        let b = stability_surjectivity(&t, &s, 2.0).unwrap();
        assert!((b.map_distance - 0.25).abs() < 1e-12);
        assert!((b.bound - 4.0).abs() < 1e-12);
    }

    #[test]
    fn stability_hypothesis_violation() {
        let alg = BlockAlgebra::full(2).unwrap();
        let t = LinMap::identity(&alg);
        let s = t.scale(0.0);
        assert!(matches!(
            stability_surjectivity(&t, &s, 2.0),
            Err(Error::HypothesisNotMet { .. })
        ));
    }

    #[test]
    fn measured_quotient_norm_respects_bound() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let mut rng = random::rng_from_seed(13);
        for trial in 0..10 {
            let g = random::random_element(&alg, &mut rng);
            let t = LinMap::left_mul(&g.add(&alg.unit().scale_re(3.0)).unwrap());
            let k = quotient_inverse_norm(&t).unwrap();
            let noise = LinMap::left_mul(&random::random_element(&alg, &mut rng));
            let s = t.add(&noise.scale(0.01 / (k * noise.coord_norm()))).unwrap();
            let b = stability_surjectivity(&t, &s, k).unwrap();
            assert!(b.surjective, "trial {trial}");
            assert!(
                b.measured_inverse_norm <= b.bound + 1e-6,
                "trial {trial}: measured {} bound {}",
                b.measured_inverse_norm,
                b.bound
            );
        }
    }

    #[test]
    fn block2x2_unitary_assembly_norm() {
        // ‖[[u, uv], [−1, v]]‖ = √2 for unitaries u, v
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut rng = random::rng_from_seed(17);
        for _ in 0..10 {
            let u = random::random_unitary(&alg, &mut rng);
            let v = random::random_unitary(&alg, &mut rng);
            let uv = u.mul(&v).unwrap();
            let minus_one = alg.unit().scale_re(-1.0);
            let m = AlgElement::block2x2(&u, &uv, &minus_one, &v).unwrap();
            assert!((m.op_norm() - std::f64::consts::SQRT_2).abs() < 1e-10);
        }
    }
}
