//! The low-degree Hochschild complex of a block algebra over itself, and a
//! least-squares coboundary solver.
//!
//! For an endomorphism `h` and a bilinear map `D` on the algebra:
//!
//! ```text
//! δ¹h(x,y)   = x·h(y) − h(xy) + h(x)·y
//! δ²D(x,y,z) = x·D(y,z) − D(xy,z) + D(x,yz) − D(x,y)·z
//! ```
//!
//! On `⊕ᵢ M_{nᵢ}` every 2-cocycle is a coboundary, which is what makes the
//! correction iteration work: the defect of an associative multiplication is
//! a near-cocycle, and `solve` produces the `h` whose transport removes it
//! to quadratic order. The solver returns the minimum-norm least-squares
//! solution; the kernel of `δ¹` (the derivations) is nontrivial, and
//! min-norm is what makes the iteration deterministic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{AlgElement, BlockAlgebra, CMat, CVec};
use crate::opspace::{BilMap, LinMap};

/// `δ¹h` as an exact tensor.
pub fn coboundary_1(h: &LinMap) -> Result<BilMap> {
    if h.domain() != h.codomain() {
        return Err(Error::ShapeMismatch(
            "coboundary of a non-endomorphism is not defined".into(),
        ));
    }
    let alg = h.domain().clone();
    BilMap::from_action(&alg, &alg, |x, y| {
        let t1 = x.mul(&h.apply(y)?)?;
        let t2 = h.apply(&x.mul(y)?)?;
        let t3 = h.apply(x)?.mul(y)?;
        t1.sub(&t2)?.add(&t3)
    })
}

/// The trilinear obstruction `δ²D`, kept as an evaluator.
pub struct TrilinearDefect {
    bil: BilMap,
}

impl TrilinearDefect {
    pub fn eval(&self, x: &AlgElement, y: &AlgElement, z: &AlgElement) -> Result<AlgElement> {
        let d = &self.bil;
        let t1 = x.mul(&d.eval(y, z)?)?;
        let t2 = d.eval(&x.mul(y)?, z)?;
        let t3 = d.eval(x, &y.mul(z)?)?;
        let t4 = d.eval(x, y)?.mul(z)?;
        t1.sub(&t2)?.add(&t3)?.sub(&t4)
    }

    /// Max norm of `δ²D` over seeded random unit triples.
    pub fn max_residual(&self, samples: usize, seed: u64) -> Result<f64> {
        let alg = self.bil.domain().clone();
        let mut worst = 0.0f64;
        for idx in 0..samples {
            let mut rng = crate::matcore::random::rng_for_substream(seed, idx as u64);
            let x = crate::matcore::random::random_contraction(&alg, &mut rng);
            let y = crate::matcore::random::random_contraction(&alg, &mut rng);
            let z = crate::matcore::random::random_contraction(&alg, &mut rng);
            worst = worst.max(self.eval(&x, &y, &z)?.op_norm());
        }
        Ok(worst)
    }
}

pub fn coboundary_2(d: &BilMap) -> Result<TrilinearDefect> {
    if d.domain() != d.codomain() {
        return Err(Error::ShapeMismatch("coboundary_2 needs a square bilinear map".into()));
    }
    Ok(TrilinearDefect { bil: d.clone() })
}

/// The `d³ × d²` matrix of `δ¹` acting on vec(H) (column-major stacking of
/// the endomorphism matrix).
pub fn coboundary_1_matrix(alg: &BlockAlgebra) -> CMat {
    let d = alg.coord_dim();
    let mult = BilMap::native_multiplication(alg);
    // left/right multiplication matrices for each basis element
    let lmats: Vec<CMat> = (0..d)
        .map(|a| LinMap::left_mul(&alg.basis_element(a)).matrix().clone())
        .collect();
    let rmats: Vec<CMat> = (0..d)
        .map(|b| {
            let eb = alg.basis_element(b);
            LinMap::from_action(alg, alg, |x| x.mul(&eb))
                .expect("right multiplication is well-formed")
                .matrix()
                .clone()
        })
        .collect();
    let mut op = CMat::zeros(d * d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let row0 = (a * d + b) * d;
            // x·h(y): + L_a on column block b
            for r in 0..d {
                for i in 0..d {
                    op[(row0 + r, b * d + i)] += lmats[a][(r, i)];
                }
            }
            // −h(xy): −Σ_j coords(e_a e_b)[j] · Id on column block j
            let cab = mult.matrix().column(a * d + b);
            for j in 0..d {
                let c = cab[j];
                if c != Complex64::new(0.0, 0.0) {
                    for r in 0..d {
                        op[(row0 + r, j * d + r)] -= c;
                    }
                }
            }
            // h(x)·y: + R_b on column block a
            for r in 0..d {
                for i in 0..d {
                    op[(row0 + r, a * d + i)] += rmats[b][(r, i)];
                }
            }
        }
    }
    op
}

fn vec_h_to_linmap(alg: &BlockAlgebra, v: &CVec) -> LinMap {
    let d = alg.coord_dim();
    let m = CMat::from_fn(d, d, |r, c| v[c * d + r]);
    LinMap::new(alg.clone(), alg.clone(), m).expect("shape by construction")
}

fn bil_to_rhs(bil: &BilMap) -> CVec {
    let d = bil.domain().coord_dim();
    let m = bil.matrix();
    let mut v = CVec::zeros(d * d * d);
    for a in 0..d {
        for b in 0..d {
            for r in 0..d {
                v[(a * d + b) * d + r] = m[(r, a * d + b)];
            }
        }
    }
    v
}

/// Minimum-norm least-squares solver for `δ¹h = D` over a fixed algebra.
///
/// The pseudo-inverse is realized through the Gram matrix `(δ¹)*(δ¹)`
/// (realified, then a real symmetric eigendecomposition); `δ¹` has an O(1)
/// spectral gap above its kernel on these algebras, so the singular-value
/// cutoff `1e−12·σ_max` lands safely inside the gap.
pub struct CoboundarySolver {
    algebra: BlockAlgebra,
    op: CMat,
    eig_vecs: DMatrix<f64>,
    inv_eig_vals: Vec<f64>,
    /// Smallest singular value of `δ¹` above the cutoff.
    pub sigma_min_positive: f64,
}

impl CoboundarySolver {
    pub fn new(alg: &BlockAlgebra) -> CoboundarySolver {
        let op = coboundary_1_matrix(alg);
        let gram_c = op.adjoint() * &op;
        let gram_r = {
            let r = crate::matcore::linalg::realify(&gram_c);
            (&r + r.transpose()) * 0.5
        };
        let eig = gram_r.symmetric_eigen();
        let lam_max = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        let cutoff = lam_max * (crate::tol::PINV_CUTOFF * crate::tol::PINV_CUTOFF).max(1e-13);
        let mut sigma_min_positive = f64::INFINITY;
        let inv_eig_vals: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&l| {
                if l > cutoff {
                    sigma_min_positive = sigma_min_positive.min(l.sqrt());
                    1.0 / l
                } else {
                    0.0
                }
            })
            .collect();
        CoboundarySolver {
            algebra: alg.clone(),
            op,
            eig_vecs: eig.eigenvectors,
            inv_eig_vals,
            sigma_min_positive,
        }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    /// Solve `δ¹h = D`; returns `(h, residual)` with `residual` the
    /// Euclidean distance of `D` to the range of `δ¹`.
    pub fn solve(&self, d_map: &BilMap) -> Result<(LinMap, f64)> {
        if d_map.domain() != &self.algebra || d_map.codomain() != &self.algebra {
            return Err(Error::ShapeMismatch("coboundary solve on the wrong algebra".into()));
        }
        let rhs = bil_to_rhs(d_map);
        // y = (δ¹)* rhs, realified
        let y = self.op.adjoint() * &rhs;
        let n = y.len();
        let mut y_r = nalgebra::DVector::<f64>::zeros(2 * n);
        for i in 0..n {
            y_r[i] = y[i].re;
            y_r[i + n] = y[i].im;
        }
        let z = &self.eig_vecs
            * nalgebra::DVector::from_iterator(
                2 * n,
                (self.eig_vecs.transpose() * &y_r)
                    .iter()
                    .zip(&self.inv_eig_vals)
                    .map(|(c, inv)| c * inv),
            );
        let h_vec = CVec::from_fn(n, |i, _| Complex64::new(z[i], z[i + n]));
        let h = vec_h_to_linmap(&self.algebra, &h_vec);
        let residual = (&self.op * &h_vec - &rhs).norm();
        Ok((h, residual))
    }
}

static SOLVER_CACHE: OnceLock<Mutex<HashMap<Vec<usize>, Arc<CoboundarySolver>>>> = OnceLock::new();

/// Cached solver per block structure (the `δ¹` operator depends only on the
/// algebra, not on the defect being solved).
pub fn solver_for(alg: &BlockAlgebra) -> Arc<CoboundarySolver> {
    let cache = SOLVER_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("solver cache poisoned");
    guard
        .entry(alg.dims().to_vec())
        .or_insert_with(|| Arc::new(CoboundarySolver::new(alg)))
        .clone()
}

/// Standalone entry point: min-norm least-squares solution of `δ¹h = D`.
pub fn solve_coboundary(d_map: &BilMap) -> Result<(LinMap, f64)> {
    solver_for(d_map.domain()).solve(d_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random;

    #[test]
    fn coboundary_of_identity_is_multiplication() {
        // δ¹id(x,y) = x·y − xy + x·y = xy
        let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
        let id = LinMap::identity(&alg);
        let d = coboundary_1(&id).unwrap();
        let m = BilMap::native_multiplication(&alg);
        assert!(d.sub(&m).unwrap().coord_norm() < 1e-13);
    }

    #[test]
    fn inner_derivations_are_cocycles() {
        // h(x) = ax − xa has δ¹h = 0
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let mut rng = random::rng_from_seed(3);
        let a = random::random_element(&alg, &mut rng);
        let h = LinMap::from_action(&alg, &alg, |x| a.mul(x)?.sub(&x.mul(&a)?)).unwrap();
        let d = coboundary_1(&h).unwrap();
        assert!(d.coord_norm() < 1e-12);
    }

    #[test]
    fn complex_property_delta2_after_delta1_vanishes() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut rng = random::rng_from_seed(5);
        let g = random::random_element(&alg, &mut rng);
        let h = LinMap::left_mul(&g);
        let d = coboundary_1(&h).unwrap();
        let tri = coboundary_2(&d).unwrap();
        let worst = tri.max_residual(25, 7).unwrap();
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn delta2_of_multiplication_is_associativity() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let m = BilMap::native_multiplication(&alg);
        let tri = coboundary_2(&m).unwrap();
        assert!(tri.max_residual(20, 11).unwrap() < 1e-13);
    }

    #[test]
    fn operator_matrix_matches_action() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let op = coboundary_1_matrix(&alg);
        let mut rng = random::rng_from_seed(13);
        let g = random::random_element(&alg, &mut rng);
        let h = LinMap::left_mul(&g);
        // vec(H) column-major
        let d_coord = alg.coord_dim();
        let mut v = CVec::zeros(d_coord * d_coord);
        for c in 0..d_coord {
            for r in 0..d_coord {
                v[c * d_coord + r] = h.matrix()[(r, c)];
            }
        }
        let lhs = &op * v;
        let want = bil_to_rhs(&coboundary_1(&h).unwrap());
        assert!((lhs - want).norm() < 1e-12);
    }

    #[test]
    fn delta1_has_a_spectral_gap() {
        // kernel = derivations (all inner): dim d−#blocks... for M_2: 3.
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let solver = CoboundarySolver::new(&alg);
        assert!(
            solver.sigma_min_positive > 0.1,
            "gap {}",
            solver.sigma_min_positive
        );
    }

    #[test]
    fn solve_zero_gives_zero() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let z = BilMap::zero(&alg, &alg);
        let (h, res) = solve_coboundary(&z).unwrap();
        assert!(h.coord_norm() < 1e-14);
        assert!(res < 1e-14);
    }

    #[test]
    fn exact_preimage_is_recovered() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let mut rng = random::rng_from_seed(17);
        let g = random::random_element(&alg, &mut rng).scale_re(0.3);
        let h0 = LinMap::left_mul(&g);
        let d = coboundary_1(&h0).unwrap();
        let (h, res) = solve_coboundary(&d).unwrap();
        assert!(res < 1e-10, "residual {res}");
        // h may differ from h0 by a derivation, but δ¹h must equal D
        let back = coboundary_1(&h).unwrap();
        assert!(back.sub(&d).unwrap().coord_norm() < 1e-10);
    }

    #[test]
    fn random_non_cocycle_has_positive_residual() {
        let alg = BlockAlgebra::new(vec![2]).unwrap();
        let mut rng = random::rng_from_seed(19);
        let d = BilMap::from_action(&alg, &alg, |x, y| {
            let gx = random::random_element(&alg, &mut rng); // fresh noise per pair
            gx.mul(&x.mul(y)?)
        })
        .unwrap();
        let (_, res) = solve_coboundary(&d).unwrap();
        assert!(res > 1e-6, "residual {res}");
        let tri = coboundary_2(&d).unwrap();
        assert!(tri.max_residual(10, 23).unwrap() > 1e-6);
    }
}
