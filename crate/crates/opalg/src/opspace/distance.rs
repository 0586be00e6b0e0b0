//! Distance estimates between represented algebras.
//!
//! `cb_distance_upper` multiplies the cb-norm estimates of a linear
//! isomorphism and its inverse. `kk_distance_estimate` brackets the
//! Hausdorff distance between the unit balls of two subalgebras of a common
//! ambient algebra at the given (fixed) representation:
//!
//! * the lower bound is certified: for a witness `a` in one unit ball,
//!   `dist(a, Ball(B)) ≥ ‖a − P_B(a)‖_F / √N` where `P_B` is the Frobenius
//!   projection onto the span and `N` the ambient dimension;
//! * the upper естimate solves the convex nearest-point problem
//!   `min { ‖a − b‖ : b ∈ span(B), ‖b‖ ≤ 1 }` by cyclic projections
//!   (Dykstra) nested in a bisection on the distance, and evaluates the
//!   resulting feasible point exactly.

use super::estimate::cb_norm;
use super::linmap::LinMap;
use crate::error::{Error, Result};
use crate::matcore::{random, AlgElement, BlockAlgebra, CVec};

/// `cb_norm(T).value · cb_norm(T⁻¹).value`, an upper bound on the cb-distance
/// between domain and codomain realized by `T`.
pub fn cb_distance_upper(map: &LinMap, restarts: usize, seed: u64) -> Result<f64> {
    let inv = map.try_inverse()?;
    let a = cb_norm(map, restarts, seed)?;
    let b = cb_norm(&inv, restarts, seed.wrapping_add(0x9e37_79b9))?;
    Ok(a.value * b.value)
}

// ---------------------------------------------------------------------------
// Hausdorff distance between unit balls at a fixed representation
// ---------------------------------------------------------------------------

/// Frobenius-orthogonal projector onto the span of a family of elements.
struct SpanProjector {
    basis: Vec<CVec>, // orthonormal coordinate vectors
    algebra: BlockAlgebra,
}

impl SpanProjector {
    fn new(elements: &[AlgElement]) -> Result<SpanProjector> {
        let algebra = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?
            .algebra()
            .clone();
        let mut basis: Vec<CVec> = Vec::new();
        for el in elements {
            if el.algebra() != &algebra {
                return Err(Error::ShapeMismatch(
                    "basis elements live in different ambient algebras".into(),
                ));
            }
            // modified Gram-Schmidt with a second reorthogonalization pass
            let mut v = el.to_coords();
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dotc(&v);
                    v -= q * c;
                }
            }
            let n = v.norm();
            if n > 1e-12 {
                basis.push(v / num_complex::Complex64::new(n, 0.0));
            }
        }
        if basis.is_empty() {
            return Err(Error::InvalidArgument("basis spans only the zero space".into()));
        }
        Ok(SpanProjector { basis, algebra })
    }

    fn project_coords(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(v.len());
        for q in &self.basis {
            let c = q.dotc(v);
            out += q * c;
        }
        out
    }

    fn project(&self, x: &AlgElement) -> AlgElement {
        AlgElement::from_coords(&self.algebra, &self.project_coords(&x.to_coords())).expect("shape")
    }

    /// `‖x − P(x)‖_F`.
    fn complement_frobenius(&self, x: &AlgElement) -> f64 {
        let v = x.to_coords();
        (&v - self.project_coords(&v)).norm()
    }
}

/// Clip the singular values of `x − center` at `radius` and add `center`
/// back: the Frobenius projection onto the operator-norm ball.
fn project_ball(x: &AlgElement, center: Option<&AlgElement>, radius: f64) -> AlgElement {
    let shifted = match center {
        Some(c) => x.sub(c).expect("same algebra"),
        None => x.clone(),
    };
    let clipped = if shifted.op_norm() <= radius {
        shifted
    } else {
        shifted.scale_re(1.0 / radius).clip_to_unit_ball().scale_re(radius)
    };
    match center {
        Some(c) => clipped.add(c).expect("same algebra"),
        None => clipped,
    }
}

/// Distance from `a` (assumed `‖a‖ ≤ 1`) to `span ∩ unit ball`:
/// `(certified_lower, upper_from_feasible_point)`.
fn distance_to_ball(a: &AlgElement, span: &SpanProjector, total_dim: f64) -> (f64, f64) {
    let lower = span.complement_frobenius(a) / total_dim.sqrt();

    // Initial feasible candidate: Frobenius projection scaled into the ball.
    let p0 = span.project(a);
    let n0 = p0.op_norm();
    let b0 = if n0 > 1.0 { p0.scale_re(1.0 / n0) } else { p0 };
    let mut upper = a.sub(&b0).expect("same algebra").op_norm();

    // Bisect on t; feasibility of {b ∈ span, ‖b‖ ≤ 1, ‖a − b‖ ≤ t} via
    // Dykstra's cyclic projections.
    let mut lo = lower;
    let mut hi = upper;
    let mut x = b0.clone();
    for _ in 0..30 {
        if hi - lo <= 1e-9 {
            break;
        }
        let t = 0.5 * (lo + hi);
        let mut y = x.clone();
        let zero = y.algebra().zero();
        let mut p1 = zero.clone();
        let mut p2 = zero.clone();
        let mut p3 = zero;
        let mut feasible_point: Option<AlgElement> = None;
        for it in 0..240 {
            let y1 = span.project(&y.add(&p1).expect("alg"));
            p1 = y.add(&p1).expect("alg").sub(&y1).expect("alg");
            let y2 = project_ball(&y1.add(&p2).expect("alg"), None, 1.0);
            p2 = y1.add(&p2).expect("alg").sub(&y2).expect("alg");
            let y3 = project_ball(&y2.add(&p3).expect("alg"), Some(a), t);
            p3 = y2.add(&p3).expect("alg").sub(&y3).expect("alg");
            y = y3;
            if it % 16 == 15 {
                // candidate: back to span, then scaled into the ball
                let c = span.project(&y);
                let cn = c.op_norm();
                let c = if cn > 1.0 { c.scale_re(1.0 / cn) } else { c };
                let d = a.sub(&c).expect("alg").op_norm();
                if d <= t + 1e-9 {
                    feasible_point = Some(c);
                    break;
                }
            }
        }
        match feasible_point {
            Some(c) => {
                let d = a.sub(&c).expect("alg").op_norm();
                upper = upper.min(d);
                hi = d.min(t);
                x = c;
            }
            None => {
                lo = t;
            }
        }
    }
    (lower, upper.max(lower))
}

/// Ascend `‖(I − P_other)(w)‖_F` over the unit ball of `own` by conditional
/// gradient: the linear subproblem over a *-subalgebra ball is solved by the
/// unitary polar factor of the projected gradient.
fn optimize_witness(
    start: &AlgElement,
    own: &SpanProjector,
    other: &SpanProjector,
) -> AlgElement {
    let mut w = start.clone();
    let mut best = other.complement_frobenius(&w);
    let mut best_w = w.clone();
    for _ in 0..40 {
        let v = w.to_coords();
        let g_coords = &v - other.project_coords(&v);
        let g = AlgElement::from_coords(start.algebra(), &g_coords).expect("shape");
        let d = own.project(&g);
        let mut cand = d.polar_unitary_part();
        // keep the candidate inside span ∩ ball even when the polar factor
        // leaves the span (non-algebra spans)
        cand = own.project(&cand);
        let n = cand.op_norm();
        if n > 1.0 {
            cand = cand.scale_re(1.0 / n);
        }
        let val = other.complement_frobenius(&cand);
        if val > best + 1e-12 {
            best = val;
            best_w = cand.clone();
            w = cand;
        } else {
            break;
        }
    }
    best_w
}

/// Estimate the Hausdorff distance between the unit balls of two subalgebras
/// given by bases inside the same ambient algebra. Returns `(lower, upper)`
/// with `lower` certified by witnesses and `lower ≤ upper`.
pub fn kk_distance_estimate(
    a_basis: &[AlgElement],
    b_basis: &[AlgElement],
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let pa = SpanProjector::new(a_basis)?;
    let pb = SpanProjector::new(b_basis)?;
    if pa.algebra != pb.algebra {
        return Err(Error::ShapeMismatch(
            "the two bases live in different ambient algebras".into(),
        ));
    }
    let ambient = pa.algebra.clone();
    let total_dim: f64 = ambient.dims().iter().map(|&n| n as f64).sum();

    let mut lower = 0.0f64;
    let mut upper = 0.0f64;

    let mut witnesses_a: Vec<AlgElement> = Vec::new();
    let mut witnesses_b: Vec<AlgElement> = Vec::new();

    // structured witnesses: normalized basis elements and optimized starts
    for (own, other, bucket) in [
        (&pa, &pb, &mut witnesses_a),
        (&pb, &pa, &mut witnesses_b),
    ] {
        for q in &own.basis {
            let el = AlgElement::from_coords(&ambient, q).expect("shape");
            let n = el.op_norm();
            if n > 1e-12 {
                bucket.push(el.scale_re(1.0 / n));
            }
        }
        let starts: Vec<AlgElement> = bucket.clone();
        for s in &starts {
            bucket.push(optimize_witness(s, own, other));
        }
    }

    // random unit-ball samples of each span
    let per_side = samples.div_ceil(2);
    for idx in 0..per_side {
        let mut rng = random::rng_for_substream(seed, idx as u64);
        for (own, other, bucket) in [
            (&pa, &pb, &mut witnesses_a),
            (&pb, &pa, &mut witnesses_b),
        ] {
            let g = random::random_element(&ambient, &mut rng);
            let mut w = own.project(&g);
            let n = w.op_norm();
            if n > 1e-12 {
                w = w.scale_re(1.0 / n);
            }
            bucket.push(optimize_witness(&w, own, other));
            let _ = other;
        }
    }

    for (w, other) in witnesses_a
        .iter()
        .map(|w| (w, &pb))
        .chain(witnesses_b.iter().map(|w| (w, &pa)))
    {
        let (l, u) = distance_to_ball(w, other, total_dim);
        lower = lower.max(l);
        upper = upper.max(u);
    }

    Ok((lower, upper.max(lower)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random;

    fn m2() -> BlockAlgebra {
        BlockAlgebra::full(2).unwrap()
    }

    fn scalar_basis() -> Vec<AlgElement> {
        vec![m2().unit()]
    }

    fn diagonal_basis() -> Vec<AlgElement> {
        let alg = m2();
        vec![alg.basis_element(0), alg.basis_element(3)]
    }

    #[test]
    fn cb_distance_of_isomorphism_is_one() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let u = random::random_unitary_from_seed(&alg, 3);
        let pi = LinMap::conjugation(&u);
        let d = cb_distance_upper(&pi, 4, 5).unwrap();
        assert!((d - 1.0).abs() < 1e-5, "{d}");
    }

    #[test]
    fn cb_distance_scaling_cancels() {
        let alg = BlockAlgebra::full(2).unwrap();
        let u = random::random_unitary_from_seed(&alg, 7);
        let pi = LinMap::conjugation(&u).scale(1.25);
        let d = cb_distance_upper(&pi, 4, 5).unwrap();
        assert!((d - 1.0).abs() < 1e-5, "{d}");
    }

    #[test]
    fn cb_distance_perturbation_expansion() {
        // T = id + εG: the distance bound stays within 1 + 2ε·cb(G) + O(ε²)
        let alg = BlockAlgebra::full(2).unwrap();
        let mut rng = random::rng_from_seed(19);
        let g = LinMap::left_mul(&random::random_element(&alg, &mut rng));
        let eps = 1e-3;
        let t = LinMap::identity(&alg).add(&g.scale(eps)).unwrap();
        let d = cb_distance_upper(&t, 6, 21).unwrap();
        let cb_g = crate::opspace::cb_norm(&g, 6, 23).unwrap().value;
        let quadratic_slack = 10.0 * eps * eps * (1.0 + cb_g) * (1.0 + cb_g);
        assert!(
            d <= 1.0 + 2.0 * eps * cb_g + quadratic_slack,
            "{d} vs 1 + {}",
            2.0 * eps * cb_g
        );
    }

    #[test]
    fn cb_distance_rejects_singular() {
        let alg = BlockAlgebra::full(2).unwrap();
        let z = LinMap::identity(&alg).scale(0.0);
        assert!(matches!(
            cb_distance_upper(&z, 2, 1),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn identical_subalgebras_are_at_distance_zero() {
        let basis = diagonal_basis();
        let (lo, hi) = kk_distance_estimate(&basis, &basis, 8, 3).unwrap();
        assert!(lo.abs() < 1e-10);
        assert!(hi <= 1e-8, "{hi}");
    }

    #[test]
    fn scalars_vs_diagonals_certify_one() {
        // diag(1, −1) is at distance exactly 1 from the scalars.
        let (lo, hi) = kk_distance_estimate(&scalar_basis(), &diagonal_basis(), 16, 5).unwrap();
        assert!(lo >= 1.0 - 1e-9, "lower {lo}");
        assert!(hi >= lo && hi <= 1.0 + 1e-6, "upper {hi}");
    }

    #[test]
    fn conjugated_algebra_within_commutator_bound() {
        // B = uAu* with ‖u − 1‖ = ε: Hausdorff distance ≤ 2ε.
        let alg = m2();
        let eps = 1e-3;
        // u = exp(iεh) for a Hermitian h with ‖h‖ = 1 keeps ‖u − 1‖ ≈ ε.
        let mut rng = random::rng_from_seed(11);
        let h = random::random_hermitian(&alg, &mut rng);
        let h = h.scale_re(1.0 / h.op_norm());
        let u = AlgElement::from_blocks(
            alg.clone(),
            vec![crate::matcore::linalg::unitary_exp_ih(&h.blocks()[0], eps)],
        )
        .unwrap();
        let eps_measured = u.sub(&alg.unit()).unwrap().op_norm();
        assert!(eps_measured <= eps * 1.01);

        let a_basis = diagonal_basis();
        let b_basis: Vec<AlgElement> = a_basis
            .iter()
            .map(|x| u.mul(x).unwrap().mul(&u.adjoint()).unwrap())
            .collect();
        let (lo, hi) = kk_distance_estimate(&a_basis, &b_basis, 12, 7).unwrap();
        assert!(lo <= hi);
        assert!(hi <= 2.0 * eps_measured + 1e-6, "upper {hi} vs 2ε = {}", 2.0 * eps_measured);
    }
}
