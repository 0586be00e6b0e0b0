//! Seeded random elements: Haar unitaries, Gaussian elements, projections.
//!
//! Everything is deterministic in the seed. Independent streams for
//! concurrent work are derived with [`rng_for_substream`], so results do not
//! depend on execution order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::algebra::{AlgElement, BlockAlgebra, CMat};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `idx` of the generator seeded with `seed`.
pub fn rng_for_substream(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx.wrapping_add(1));
    rng
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    // Box-Muller; variance 1/2 per component so E|z|² = 1.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let r = (-u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

fn gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> CMat {
    // from_fn fills column-major; draw row-major for a stable element order.
    let mut m = CMat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = gaussian_complex(rng);
        }
    }
    m
}

/// Standard complex Gaussian element (independent entries, E|z|² = 1).
pub fn random_element<R: Rng>(algebra: &BlockAlgebra, rng: &mut R) -> AlgElement {
    let blocks = algebra.dims().iter().map(|&n| gaussian_matrix(n, rng)).collect();
    AlgElement::from_blocks(algebra.clone(), blocks).expect("gaussian blocks are well-formed")
}

/// Haar-distributed unitary per block: QR of a Gaussian matrix with the
/// phases of the R diagonal absorbed into Q.
pub fn random_unitary<R: Rng>(algebra: &BlockAlgebra, rng: &mut R) -> AlgElement {
    let blocks = algebra
        .dims()
        .iter()
        .map(|&n| {
            let g = gaussian_matrix(n, rng);
            let qr = g.qr();
            let q = qr.q();
            let r = qr.r();
            let phases = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    let d = r[(i, i)];
                    if d.norm() > 0.0 {
                        d / d.norm()
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            q * phases
        })
        .collect();
    AlgElement::from_blocks(algebra.clone(), blocks).expect("unitary blocks are well-formed")
}

/// Random orthogonal projection: `u diag(1,…,1,0,…,0) u*` per block with a
/// Haar unitary and uniformly chosen rank (possibly 0 or full).
pub fn random_projection<R: Rng>(algebra: &BlockAlgebra, rng: &mut R) -> AlgElement {
    let u = random_unitary(algebra, rng);
    let blocks = u
        .blocks()
        .iter()
        .map(|ub| {
            let n = ub.nrows();
            let rank = rng.gen_range(0..=n);
            let d = DMatrix::from_fn(n, n, |i, j| {
                if i == j && i < rank {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            ub * d * ub.adjoint()
        })
        .collect();
    AlgElement::from_blocks(algebra.clone(), blocks).expect("projection blocks are well-formed")
}

/// Random Hermitian element `(g + g*)/2`.
pub fn random_hermitian<R: Rng>(algebra: &BlockAlgebra, rng: &mut R) -> AlgElement {
    let g = random_element(algebra, rng);
    g.add(&g.adjoint()).expect("same algebra").scale_re(0.5)
}

/// Random contraction: Gaussian element rescaled to norm `u^{1/2} ≤ 1`.
pub fn random_contraction<R: Rng>(algebra: &BlockAlgebra, rng: &mut R) -> AlgElement {
    let g = random_element(algebra, rng);
    let norm = g.op_norm();
    let target: f64 = rng.gen::<f64>().sqrt();
    if norm > 0.0 {
        g.scale_re(target / norm)
    } else {
        g
    }
}

/// Random invertible contraction with `‖x‖ ≤ 1` and smallest singular value
/// at least `sigma_min_floor`; rejection-sampled.
pub fn random_invertible<R: Rng>(
    algebra: &BlockAlgebra,
    rng: &mut R,
    sigma_min_floor: f64,
) -> AlgElement {
    loop {
        let g = random_element(algebra, rng);
        let scaled = g.scale_re(1.0 / g.op_norm().max(f64::MIN_POSITIVE));
        if scaled.smallest_singular_value() >= sigma_min_floor {
            return scaled;
        }
    }
}

/// Convenience wrappers taking a bare seed.
pub fn random_unitary_from_seed(algebra: &BlockAlgebra, seed: u64) -> AlgElement {
    random_unitary(algebra, &mut rng_from_seed(seed))
}

pub fn random_element_from_seed(algebra: &BlockAlgebra, seed: u64) -> AlgElement {
    random_element(algebra, &mut rng_from_seed(seed))
}

pub fn random_projection_from_seed(algebra: &BlockAlgebra, seed: u64) -> AlgElement {
    random_projection(algebra, &mut rng_from_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        let u = random_unitary_from_seed(&alg, 42);
        let uu = u.adjoint().mul(&u).unwrap();
        assert!(uu.distance_to(&alg.unit()).unwrap() < 1e-12);
        assert!((u.op_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_output() {
        let alg = BlockAlgebra::new(vec![3]).unwrap();
        let a = random_unitary_from_seed(&alg, 7);
        let b = random_unitary_from_seed(&alg, 7);
        assert_eq!(a, b);
        let c = random_unitary_from_seed(&alg, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn substreams_are_independent_of_order() {
        let alg = BlockAlgebra::full(2).unwrap();
        let a1 = random_element(&alg, &mut rng_for_substream(3, 0));
        let b1 = random_element(&alg, &mut rng_for_substream(3, 1));
        let b2 = random_element(&alg, &mut rng_for_substream(3, 1));
        let a2 = random_element(&alg, &mut rng_for_substream(3, 0));
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        assert_ne!(a1, b1);
    }

    #[test]
    fn projection_is_projection() {
        let alg = BlockAlgebra::new(vec![3, 2]).unwrap();
        let mut rng = rng_from_seed(9);
        for _ in 0..16 {
            let p = random_projection(&alg, &mut rng);
            let pp = p.mul(&p).unwrap();
            assert!(pp.distance_to(&p).unwrap() < 1e-12);
            assert!(p.hermitian_residual() < 1e-12);
        }
    }

    #[test]
    fn haar_trace_statistics_m2() {
        // E|tr u| over Haar U(2) equals 8/(3π); the oracle below evaluates the
        // Weyl-density integral by quadrature, independently of the sampler.
        let oracle = {
            let steps = 200_000;
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..steps {
                let t = std::f64::consts::PI * (i as f64 + 0.5) / steps as f64;
                let w = t.sin() * t.sin(); // eigenvalue-gap density on [0, π]
                num += 2.0 * t.cos().abs() * w;
                den += w;
            }
            num / den
        };
        assert!((oracle - 8.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-6);

        let alg = BlockAlgebra::full(2).unwrap();
        let mut rng = rng_from_seed(2024);
        let samples = 10_000;
        let mean: f64 = (0..samples)
            .map(|_| {
                let u = random_unitary(&alg, &mut rng);
                let b = &u.blocks()[0];
                (b[(0, 0)] + b[(1, 1)]).norm()
            })
            .sum::<f64>()
            / samples as f64;
        assert!(
            (mean - oracle).abs() <= 0.05,
            "empirical {mean} vs oracle {oracle}"
        );
    }
}
