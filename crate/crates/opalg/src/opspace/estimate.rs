//! Amplified-norm estimation by projected ascent.
//!
//! The level-`k` norm of a linear map `T` is
//! `‖id_{M_k} ⊗ T‖ = sup { ‖(id ⊗ T)(X)‖ : X ∈ M_k(𝓐), ‖X‖ ≤ 1 }`, and for
//! a bilinear map `B` the level-`k` (Haagerup-style) quantity is the same
//! supremum over `Z_{ij} = Σ_p B(X_{ip}, Y_{pj})` with two unit-ball
//! arguments. Both are maximized by alternating two exactly solvable
//! half-steps:
//!
//! 1. read off the top singular pair `(u, v)` of the current image, which
//!    linearizes the objective `X ↦ Re⟨u v*, image(X)⟩`;
//! 2. maximize that linear functional over the unit ball, whose solution is
//!    the unitary polar factor of the Frobenius gradient.
//!
//! Every intermediate iterate is a feasible point, so the reported `lower`
//! is a true lower bound with a stored witness; `value` is the best value
//! found over all restarts. The problem is nonconvex and restarts are the
//! honesty mechanism: `value` is an estimate, `lower` is certified.

use serde::{Deserialize, Serialize};

use super::bilmap::BilMap;
use super::linmap::LinMap;
use crate::error::{Error, Result};
use crate::matcore::{random, AlgElement, BlockAlgebra, CVec};
use crate::tol;

/// Iteration cap for a single ascent restart.
const MAX_ASCENT_ITER: usize = 500;

/// A certified lower bound plus best-found estimate for an amplified norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormEstimate {
    /// Value at the best witness; a true lower bound for the target norm.
    pub lower: f64,
    /// Best value found over all restarts (the reported estimate).
    pub value: f64,
    /// Amplification level the estimate was computed at.
    pub level: usize,
    /// Number of random restarts used.
    pub restarts: usize,
    /// Whether the winning restart stalled (stopped improving) rather than
    /// hitting the iteration cap.
    pub converged: bool,
    /// Amplified unit-ball element(s) achieving `lower`: one for a linear
    /// map, two (left and right) for a bilinear map.
    pub witness: Vec<AlgElement>,
}

impl NormEstimate {
    /// Re-evaluate a linear-map witness; returns the achieved norm.
    pub fn verify_linear(&self, map: &LinMap) -> Result<f64> {
        let w = self
            .witness
            .first()
            .ok_or_else(|| Error::InvalidArgument("estimate has no witness".into()))?;
        Ok(map.apply_amplified(w, self.level)?.op_norm())
    }

    /// Re-evaluate a bilinear-map witness pair; returns the achieved norm.
    pub fn verify_bilinear(&self, bil: &BilMap) -> Result<f64> {
        if self.witness.len() != 2 {
            return Err(Error::InvalidArgument("bilinear estimate needs two witnesses".into()));
        }
        Ok(bil
            .eval_amplified(&self.witness[0], &self.witness[1], self.level)?
            .op_norm())
    }
}

/// Top singular triple over the blocks of an element: `(σ, block, u, v)`
/// with `Y_block · v = σ·u`.
fn top_singular_triple(y: &AlgElement) -> (f64, usize, CVec, CVec) {
    let mut best: Option<(f64, usize, CVec, CVec)> = None;
    for (b, m) in y.blocks().iter().enumerate() {
        let (sigma, u, v) = crate::matcore::linalg::top_singular_triple(m);
        if best.as_ref().map(|t| sigma > t.0).unwrap_or(true) {
            best = Some((sigma, b, u, v));
        }
    }
    best.expect("nonempty block list")
}

/// `(id ⊗ T)†` applied to the rank-one `u v*` sitting in `block` of the
/// amplified codomain, expressed cellwise through the Frobenius adjoint of
/// the coordinate matrix.
fn linear_gradient(map: &LinMap, k: usize, block: usize, u: &CVec, v: &CVec) -> AlgElement {
    let cod = map.codomain();
    let n = cod.dims()[block];
    let adj = map.adjoint_matrix();
    let mut g = map.domain().amplified(k).zero();
    for r in 0..k {
        for s in 0..k {
            let mut cell = cod.zero();
            {
                let mb = &mut cell.blocks_mut()[block];
                for a in 0..n {
                    for bcol in 0..n {
                        mb[(a, bcol)] = u[r * n + a] * v[s * n + bcol].conj();
                    }
                }
            }
            let coords = &adj * cell.to_coords();
            let cell_dom = AlgElement::from_coords(map.domain(), &coords).expect("shape");
            g.set_amplified_cell(map.domain(), &cell_dom, r, s);
        }
    }
    g
}

struct AscentOutcome {
    value: f64,
    witness: AlgElement,
    converged: bool,
}

fn linear_ascent(map: &LinMap, k: usize, start: AlgElement) -> Result<AscentOutcome> {
    let mut x = start;
    let mut best = f64::NEG_INFINITY;
    let mut best_witness = x.clone();
    let mut prev = f64::NEG_INFINITY;
    let mut converged = false;
    for _ in 0..MAX_ASCENT_ITER {
        let y = map.apply_amplified(&x, k)?;
        let (sigma, b, u, v) = top_singular_triple(&y);
        if sigma > best {
            best = sigma;
            best_witness = x.clone();
        }
        if sigma <= prev + tol::ASCENT_STALL.max(tol::ASCENT_RELATIVE_STALL * sigma) {
            converged = true;
            break;
        }
        prev = sigma;
        x = linear_gradient(map, k, b, &u, &v).polar_unitary_part();
    }
    Ok(AscentOutcome {
        value: best.max(0.0),
        witness: best_witness,
        converged,
    })
}

fn merge_outcomes(outcomes: Vec<AscentOutcome>) -> AscentOutcome {
    outcomes
        .into_iter()
        .reduce(|acc, o| if o.value > acc.value { o } else { acc })
        .expect("at least one restart")
}

fn amplified_norm_with_warm(
    map: &LinMap,
    k: usize,
    restarts: usize,
    seed: u64,
    warm: Option<AlgElement>,
) -> Result<NormEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("amplification level must be >= 1".into()));
    }
    let restarts = restarts.max(1);
    let amp_dom = map.domain().amplified(k);
    let mut outcomes = Vec::with_capacity(restarts + 1);
    if let Some(w) = warm {
        outcomes.push(linear_ascent(map, k, w)?);
    }
    for idx in 0..restarts {
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let start = random::random_unitary(&amp_dom, &mut rng);
        outcomes.push(linear_ascent(map, k, start)?);
    }
    let best = merge_outcomes(outcomes);
    Ok(NormEstimate {
        lower: best.value,
        value: best.value,
        level: k,
        restarts,
        converged: best.converged,
        witness: vec![best.witness],
    })
}

/// Estimate `‖id_{M_k} ⊗ T‖` from `restarts` random starts.
pub fn amplified_norm(map: &LinMap, k: usize, restarts: usize, seed: u64) -> Result<NormEstimate> {
    amplified_norm_with_warm(map, k, restarts, seed, None)
}

/// Embed a level-`(k−1)` witness into level `k` by direct sum with the unit
/// in the new corner cell; the result is still in the unit ball and achieves
/// at least the previous image norm.
fn pad_witness(w: &AlgElement, base: &BlockAlgebra, k: usize) -> AlgElement {
    let mut out = base.amplified(k).zero();
    for r in 0..k - 1 {
        for s in 0..k - 1 {
            let cell = w.amplified_cell(base, k - 1, r, s);
            out.set_amplified_cell(base, &cell, r, s);
        }
    }
    out.set_amplified_cell(base, &base.unit(), k - 1, k - 1);
    out
}

/// Estimate the cb-norm of a linear map.
///
/// For maps into `⊕ᵢ M_{nᵢ}` the supremum over levels stabilizes at
/// `k = maxᵢ nᵢ`, so the estimate runs the level ladder up to that point,
/// warm-starting each level with the padded witness of the previous one
/// (which also enforces monotonicity of the reported values in the level).
pub fn cb_norm(map: &LinMap, restarts: usize, seed: u64) -> Result<NormEstimate> {
    let kmax = map.codomain().max_block().max(1);
    let mut prev: Option<NormEstimate> = None;
    for k in 1..=kmax {
        let warm = prev
            .as_ref()
            .map(|e| pad_witness(&e.witness[0], map.domain(), k));
        let est = amplified_norm_with_warm(map, k, restarts, seed.wrapping_add(k as u64), warm)?;
        if let Some(p) = &prev {
            debug_assert!(
                est.value >= p.value - 1e-9,
                "amplified norm decreased along the level ladder: {} -> {}",
                p.value,
                est.value
            );
        }
        prev = Some(est);
    }
    Ok(prev.expect("kmax >= 1"))
}

// ---------------------------------------------------------------------------
// Bilinear (Haagerup-amplification) ascent
// ---------------------------------------------------------------------------

/// Adjoint tensors `w[i][j] = M† · coords(u_i v_j*)` for the rank-one target
/// in `block`; `u_i`, `v_j` are the length-`n` chunks of the singular pair.
fn w_tensors(bil: &BilMap, k: usize, block: usize, u: &CVec, v: &CVec) -> Vec<Vec<CVec>> {
    let cod = bil.codomain();
    let n = cod.dims()[block];
    let adj = bil.matrix().adjoint();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut cell = cod.zero();
                    {
                        let mb = &mut cell.blocks_mut()[block];
                        for a in 0..n {
                            for bcol in 0..n {
                                mb[(a, bcol)] = u[i * n + a] * v[j * n + bcol].conj();
                            }
                        }
                    }
                    &adj * cell.to_coords()
                })
                .collect()
        })
        .collect()
}

fn cell_coords(x: &AlgElement, base: &BlockAlgebra, k: usize) -> Vec<Vec<CVec>> {
    (0..k)
        .map(|r| {
            (0..k)
                .map(|s| x.amplified_cell(base, k, r, s).to_coords())
                .collect()
        })
        .collect()
}

/// Gradient of `Re⟨u v*, Z(X, Y)⟩` in `X` for fixed `Y`.
fn bilinear_gradient_x(
    bil: &BilMap,
    k: usize,
    w: &[Vec<CVec>],
    ycells: &[Vec<CVec>],
) -> AlgElement {
    let d = bil.domain().coord_dim();
    let mut g = bil.domain().amplified(k).zero();
    for (i, wi) in w.iter().enumerate() {
        for (p, yrow) in ycells.iter().enumerate() {
            let mut cell = CVec::zeros(d);
            for a in 0..d {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for (wij, y) in wi.iter().zip(yrow) {
                    for b in 0..d {
                        acc += wij[a * d + b] * y[b].conj();
                    }
                }
                cell[a] = acc;
            }
            let el = AlgElement::from_coords(bil.domain(), &cell).expect("shape");
            g.set_amplified_cell(bil.domain(), &el, i, p);
        }
    }
    g
}

/// Gradient of `Re⟨u v*, Z(X, Y)⟩` in `Y` for fixed `X`.
fn bilinear_gradient_y(
    bil: &BilMap,
    k: usize,
    w: &[Vec<CVec>],
    xcells: &[Vec<CVec>],
) -> AlgElement {
    let d = bil.domain().coord_dim();
    let mut g = bil.domain().amplified(k).zero();
    for p in 0..k {
        for j in 0..k {
            let mut cell = CVec::zeros(d);
            for b in 0..d {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for (wi, xrow) in w.iter().zip(xcells) {
                    let wij = &wi[j];
                    let x = &xrow[p];
                    for a in 0..d {
                        acc += wij[a * d + b] * x[a].conj();
                    }
                }
                cell[b] = acc;
            }
            let el = AlgElement::from_coords(bil.domain(), &cell).expect("shape");
            g.set_amplified_cell(bil.domain(), &el, p, j);
        }
    }
    g
}

struct BilinearOutcome {
    value: f64,
    witness_x: AlgElement,
    witness_y: AlgElement,
    converged: bool,
}

/// Evaluate the amplified image from cell coordinates, assembling the
/// blocks of `M_k(codomain)` directly.
fn eval_amplified_cells(
    bil: &BilMap,
    k: usize,
    xcells: &[Vec<CVec>],
    ycells: &[Vec<CVec>],
) -> AlgElement {
    let cod = bil.codomain();
    let mut out = cod.amplified(k).zero();
    let mut cell = CVec::zeros(cod.coord_dim());
    for i in 0..k {
        for j in 0..k {
            cell.fill(num_complex::Complex64::new(0.0, 0.0));
            for p in 0..k {
                bil.eval_coords_into(&xcells[i][p], &ycells[p][j], &mut cell);
            }
            // write the cell into the output blocks
            let mut off = 0usize;
            for (bi, &n) in cod.dims().iter().enumerate() {
                let m = &mut out.blocks_mut()[bi];
                for r in 0..n {
                    for c in 0..n {
                        m[(i * n + r, j * n + c)] = cell[off + r * n + c];
                    }
                }
                off += n * n;
            }
        }
    }
    out
}

fn bilinear_ascent(
    bil: &BilMap,
    k: usize,
    start_x: AlgElement,
    start_y: AlgElement,
) -> Result<BilinearOutcome> {
    let base = bil.domain().clone();
    let mut x = start_x;
    let mut y = start_y;
    let mut xcells = cell_coords(&x, &base, k);
    let mut ycells = cell_coords(&y, &base, k);
    let mut best = f64::NEG_INFINITY;
    let mut bw = (x.clone(), y.clone());
    let mut prev = f64::NEG_INFINITY;
    let mut converged = false;
    for _ in 0..MAX_ASCENT_ITER {
        let z = eval_amplified_cells(bil, k, &xcells, &ycells);
        let (sigma, b, u, v) = top_singular_triple(&z);
        if sigma > best {
            best = sigma;
            bw = (x.clone(), y.clone());
        }
        if sigma <= prev + tol::ASCENT_STALL.max(tol::ASCENT_RELATIVE_STALL * sigma) {
            converged = true;
            break;
        }
        prev = sigma;

        // X half-step at the current singular pair.
        let w = w_tensors(bil, k, b, &u, &v);
        x = bilinear_gradient_x(bil, k, &w, &ycells).polar_unitary_part();
        xcells = cell_coords(&x, &base, k);

        // Y half-step at the refreshed singular pair.
        let z2 = eval_amplified_cells(bil, k, &xcells, &ycells);
        let (sigma2, b2, u2, v2) = top_singular_triple(&z2);
        if sigma2 > best {
            best = sigma2;
            bw = (x.clone(), y.clone());
        }
        let w2 = w_tensors(bil, k, b2, &u2, &v2);
        y = bilinear_gradient_y(bil, k, &w2, &xcells).polar_unitary_part();
        ycells = cell_coords(&y, &base, k);
    }
    Ok(BilinearOutcome {
        value: best.max(0.0),
        witness_x: bw.0,
        witness_y: bw.1,
        converged,
    })
}

/// Estimate the level-`k` norm of a bilinear map under the row-times-column
/// amplification, with certified witnesses.
pub fn bilinear_h_norm(bil: &BilMap, k: usize, restarts: usize, seed: u64) -> Result<NormEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("amplification level must be >= 1".into()));
    }
    let restarts = restarts.max(1);
    let amp_dom = bil.domain().amplified(k);
    let mut outcomes = Vec::with_capacity(restarts);
    for idx in 0..restarts {
        let mut rng = random::rng_for_substream(seed, idx as u64);
        let sx = random::random_unitary(&amp_dom, &mut rng);
        let sy = random::random_unitary(&amp_dom, &mut rng);
        outcomes.push(bilinear_ascent(bil, k, sx, sy)?);
    }
    let best = outcomes
        .into_iter()
        .reduce(|acc, o| if o.value > acc.value { o } else { acc })
        .expect("at least one restart");
    Ok(NormEstimate {
        lower: best.value,
        value: best.value,
        level: k,
        restarts,
        converged: best.converged,
        witness: vec![best.witness_x, best.witness_y],
    })
}

/// Bilinear cb-type estimate at the level where linear cb-norms into this
/// codomain stabilize.
pub fn bilinear_h_norm_default_level(bil: &BilMap, restarts: usize, seed: u64) -> Result<NormEstimate> {
    bilinear_h_norm(bil, bil.codomain().max_block().max(1), restarts, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::BlockAlgebra;
    use num_complex::Complex64;

    #[test]
    fn identity_norm_is_one() {
        let alg = BlockAlgebra::full(2).unwrap();
        let id = LinMap::identity(&alg);
        for k in 1..=2 {
            let est = amplified_norm(&id, k, 4, 1).unwrap();
            assert!((est.lower - 1.0).abs() < 1e-9, "k={k}: {}", est.lower);
            assert!((est.value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn transpose_level_one_is_isometric() {
        let alg = BlockAlgebra::full(2).unwrap();
        let t = LinMap::transpose_map(&alg);
        let est = amplified_norm(&t, 1, 8, 3).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn transpose_swap_witness_reaches_two() {
        // The flip Σ e_ij ⊗ e_ji is a unit-ball element whose partial
        // transpose has norm 2; the ascent must certify at least 2 − 1e−6.
        let alg = BlockAlgebra::full(2).unwrap();
        let t = LinMap::transpose_map(&alg);
        let amp = alg.amplified(2);
        let mut swap = amp.zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut cell = alg.zero();
                cell.blocks_mut()[0][(j, i)] = Complex64::new(1.0, 0.0);
                swap.set_amplified_cell(&alg, &cell, i, j);
            }
        }
        assert!((swap.op_norm() - 1.0).abs() < 1e-12);
        let img = t.apply_amplified(&swap, 2).unwrap();
        assert!((img.op_norm() - 2.0).abs() < 1e-12);

        let est = amplified_norm(&t, 2, 8, 5).unwrap();
        assert!(est.lower >= 2.0 - 1e-6, "{}", est.lower);
        assert!(est.value <= 2.0 + 1e-9);
    }

    #[test]
    fn cb_norm_of_conjugation_is_one() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let u = crate::matcore::random::random_unitary_from_seed(&alg, 11);
        let pi = LinMap::conjugation(&u);
        let est = cb_norm(&pi, 4, 2).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "{}", est.value);
        assert_eq!(est.level, 3);
    }

    #[test]
    fn cb_norm_scales_homogeneously() {
        let alg = BlockAlgebra::full(2).unwrap();
        let delta = 0.3;
        let t = LinMap::identity(&alg).scale(1.0 + delta);
        let est = cb_norm(&t, 4, 7).unwrap();
        assert!((est.value - (1.0 + delta)).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn witness_reproduces_lower() {
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let mut rng = crate::matcore::random::rng_from_seed(13);
        let g = crate::matcore::random::random_element(&alg, &mut rng);
        let t = LinMap::left_mul(&g);
        let est = cb_norm(&t, 6, 17).unwrap();
        let replay = est.verify_linear(&t).unwrap();
        assert!((replay - est.lower).abs() < 1e-9);
        assert!(est.witness[0].op_norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn multiplication_is_completely_contractive() {
        let alg = BlockAlgebra::full(2).unwrap();
        let m = BilMap::native_multiplication(&alg);
        for k in 1..=2 {
            let est = bilinear_h_norm(&m, k, 4, 19).unwrap();
            assert!((est.value - 1.0).abs() < 1e-6, "k={k}: {}", est.value);
            assert!(est.lower >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn zero_bilinear_map_estimates_zero() {
        let alg = BlockAlgebra::full(2).unwrap();
        let z = BilMap::zero(&alg, &alg);
        let est = bilinear_h_norm(&z, 2, 2, 23).unwrap();
        assert!(est.value.abs() < 1e-9);
    }

    #[test]
    fn bilinear_witness_reproduces_lower() {
        let alg = BlockAlgebra::full(2).unwrap();
        let mut rng = crate::matcore::random::rng_from_seed(29);
        let g = crate::matcore::random::random_element(&alg, &mut rng);
        let h = crate::matcore::random::random_element(&alg, &mut rng);
        let b = BilMap::from_action(&alg, &alg, |x, y| g.mul(x)?.mul(&h.mul(y)?)).unwrap();
        let est = bilinear_h_norm(&b, 2, 4, 31).unwrap();
        let replay = est.verify_bilinear(&b).unwrap();
        assert!((replay - est.lower).abs() < 1e-9);
    }
}
