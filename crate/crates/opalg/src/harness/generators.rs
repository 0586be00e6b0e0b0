//! Instance generators for the verification campaigns. Everything is
//! deterministic in the seed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::matcore::{linalg, random, AlgElement, BlockAlgebra, CMat};
use crate::opspace::LinMap;
use num_complex::Complex64;

/// A random *-isomorphism of `⊕ᵢ M_{nᵢ}`: a block permutation among
/// equal-size blocks composed with a unitary conjugation per block.
pub fn star_isomorphism<R: Rng>(alg: &BlockAlgebra, rng: &mut R) -> LinMap {
    let dims = alg.dims().to_vec();
    let mut perm: Vec<usize> = (0..dims.len()).collect();
    // shuffle positions within each group of equal block sizes
    let mut by_size: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &n) in dims.iter().enumerate() {
        by_size.entry(n).or_default().push(i);
    }
    for group in by_size.values() {
        let mut shuffled = group.clone();
        shuffled.shuffle(rng);
        for (slot, &src) in group.iter().zip(&shuffled) {
            perm[*slot] = src;
        }
    }
    let conjugators = random::random_unitary(alg, rng);
    LinMap::from_action(alg, alg, |x| {
        let blocks: Vec<CMat> = (0..dims.len())
            .map(|j| {
                let u = &conjugators.blocks()[j];
                u * &x.blocks()[perm[j]] * u.adjoint()
            })
            .collect();
        AlgElement::from_blocks(alg.clone(), blocks)
    })
    .expect("block permutation plus conjugation is well-formed")
}

/// A Gaussian coordinate perturbation with coordinate norm 1.
pub fn unit_norm_noise<R: Rng>(alg: &BlockAlgebra, rng: &mut R) -> LinMap {
    let d = alg.coord_dim();
    let mut m = CMat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let re: f64 = rng.gen::<f64>() - 0.5;
            let im: f64 = rng.gen::<f64>() - 0.5;
            m[(r, c)] = Complex64::new(re, im);
        }
    }
    let norm = linalg::largest_singular_value(&m);
    LinMap::new(alg.clone(), alg.clone(), m / Complex64::new(norm, 0.0)).expect("shape")
}

/// `L = (id + ε·G)∘π` for a planted *-isomorphism `π` and unit-norm noise.
pub fn perturbed_isomorphism<R: Rng>(alg: &BlockAlgebra, eps: f64, rng: &mut R) -> LinMap {
    let pi = star_isomorphism(alg, rng);
    let g = unit_norm_noise(alg, rng);
    LinMap::identity(alg)
        .add(&g.scale(eps))
        .expect("same spaces")
        .compose(&pi)
        .expect("same spaces")
}

/// A unital test map for the defect bounds:
/// `T = unitize(symmetrize((id + εG)∘π))`, where the unitization is the
/// plain normalization `x ↦ T'(1)⁻¹·T'(x)`.
pub fn defmult_instance<R: Rng>(alg: &BlockAlgebra, eps: f64, rng: &mut R) -> Result<LinMap> {
    let l = perturbed_isomorphism(alg, eps, rng);
    let sym = crate::defect::symmetrize(&l);
    let one_img = sym.apply(&alg.unit())?;
    let inv = one_img.try_inverse()?;
    LinMap::left_mul(&inv).compose(&sym)
}

/// A planted almost-multiplication `m(x,y) = Φ₀⁻¹(Φ₀(x)Φ₀(y))` with
/// `‖Φ₀ − id‖ = scale`; returns `(m, Φ₀)`.
pub fn planted_multiplication<R: Rng>(
    alg: &BlockAlgebra,
    scale: f64,
    rng: &mut R,
) -> Result<(crate::perturb::Multiplication, LinMap)> {
    let g = unit_norm_noise(alg, rng);
    let phi0 = LinMap::identity(alg).add(&g.scale(scale))?;
    let phi0_inv = phi0.try_inverse()?;
    let bil = crate::opspace::BilMap::from_action(alg, alg, |x, y| {
        phi0_inv.apply(&phi0.apply(x)?.mul(&phi0.apply(y)?)?)
    })?;
    Ok((
        crate::perturb::Multiplication::new(bil, crate::tol::ASSOCIATIVITY)?,
        phi0,
    ))
}

/// Random invertible element with `‖x‖` in `[0.5, 2]` and relative smallest
/// singular value at least `sigma_floor`.
pub fn random_invertible_scaled<R: Rng>(
    alg: &BlockAlgebra,
    sigma_floor: f64,
    rng: &mut R,
) -> AlgElement {
    let x = random::random_invertible(alg, rng, sigma_floor);
    let c: f64 = 0.5 + 1.5 * rng.gen::<f64>();
    x.scale_re(c)
}

/// One (1+1) random walk `u ← u·exp(iρh)` with the 1/5th success rule.
fn unitary_walk<R: Rng>(
    x: &AlgElement,
    start: AlgElement,
    start_val: f64,
    rng: &mut R,
) -> (f64, AlgElement) {
    let alg = x.algebra().clone();
    let mut best_u = start;
    let mut best = start_val;
    let mut radius = 0.3f64;
    let mut evals = 0usize;
    while radius > 1e-7 && evals < 2500 {
        let mut hits = 0usize;
        for _ in 0..30 {
            evals += 1;
            let h = random::random_hermitian(&alg, rng);
            let hn = h.op_norm().max(1e-12);
            let step_blocks: Vec<CMat> = best_u
                .blocks()
                .iter()
                .zip(h.blocks())
                .map(|(ub, hb)| ub * linalg::unitary_exp_ih(hb, radius / hn))
                .collect();
            let cand = AlgElement::from_blocks(alg.clone(), step_blocks).expect("shape");
            let d = x.sub(&cand).expect("shape").op_norm();
            if d < best {
                best = d;
                best_u = cand;
                hits += 1;
            }
        }
        if hits * 5 > 30 {
            radius = (radius * 1.6).min(0.5);
        } else {
            radius *= 0.55;
        }
    }
    (best, best_u)
}

/// One descent branch of the nearest-unitary objective: a singular value of
/// `x − u` together with the per-block Hermitian generator of its steepest
/// geodesic descent direction. For the branch with singular pair `(p, q)`
/// in block `b`, the first-order change along skew-Hermitian `H` is
/// `−Re tr((q p* u_b)·H)`, so descent follows `H = skew((q p* u_b)*)`.
struct Branch {
    sigma: f64,
    block: usize,
    generator: CMat, // Hermitian; step is u_b·exp(i t generator)
}

fn branch_from_triple(
    u_b: &CMat,
    sigma: f64,
    left: &crate::matcore::CVec,
    right: &crate::matcore::CVec,
    block: usize,
) -> Branch {
    let n = right.len();
    // M = right·left*·u_b, so that dσ/dt = −Re tr(M H)
    let mut qp = CMat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            qp[(r, c)] = right[r] * left[c].conj();
        }
    }
    let m = qp * u_b;
    let h_skew = (m.adjoint() - &m) * num_complex::Complex64::new(0.5, 0.0);
    let herm = &h_skew * num_complex::Complex64::new(0.0, -1.0);
    let herm = (&herm + herm.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    Branch {
        sigma,
        block,
        generator: herm,
    }
}

/// Block-wise inner product of two branch gradients (zero when they act on
/// different blocks).
fn branch_dot(a: &Branch, b: &Branch) -> f64 {
    if a.block != b.block {
        return 0.0;
    }
    a.generator
        .iter()
        .zip(b.generator.iter())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

/// Riemannian polish of `‖x − u‖`. Away from ties this is steepest descent
/// on the top singular branch; at near-ties it steps along the minimum-norm
/// element of the convex hull of the active branch gradients (the classical
/// descent direction for a pointwise max), which is what keeps it from
/// zigzagging on the tie manifold.
fn gradient_polish(x: &AlgElement, start: (f64, AlgElement)) -> (f64, AlgElement) {
    let (mut val, mut u) = (start.0, start.1);
    let mut step = 0.1f64;
    'outer: for _ in 0..600 {
        let diff = x.sub(&u).expect("shape");
        let mut branches: Vec<Branch> = Vec::new();
        for (b, m) in diff.blocks().iter().enumerate() {
            for (sigma, left, right) in linalg::leading_singular_triples(m, 2) {
                branches.push(branch_from_triple(&u.blocks()[b], sigma, &left, &right, b));
            }
        }
        branches.sort_by(|a, b| b.sigma.partial_cmp(&a.sigma).unwrap());
        let top_sigma = branches[0].sigma;
        // branches within one step's reach of the top can switch places
        let window = (4.0 * step).max(1e-11);
        let active: Vec<&Branch> = branches
            .iter()
            .filter(|b| b.sigma >= top_sigma - window)
            .take(2)
            .collect();

        // direction = min-norm convex combination of the active gradients
        let (lambda, dir_norm_sq) = if active.len() == 1 {
            (1.0, branch_dot(active[0], active[0]))
        } else {
            let g11 = branch_dot(active[0], active[0]);
            let g12 = branch_dot(active[0], active[1]);
            let g22 = branch_dot(active[1], active[1]);
            let denom = g11 - 2.0 * g12 + g22;
            let lam = if denom <= 1e-15 {
                1.0
            } else {
                ((g22 - g12) / denom).clamp(0.0, 1.0)
            };
            let n2 = lam * lam * g11 + 2.0 * lam * (1.0 - lam) * g12 + (1.0 - lam) * (1.0 - lam) * g22;
            (lam, n2)
        };
        if dir_norm_sq < 1e-26 {
            break; // stationary: zero is in the subdifferential hull
        }
        let dir_norm = dir_norm_sq.sqrt();

        let mut gens: Vec<Option<CMat>> = vec![None; u.blocks().len()];
        let weights = [lambda, 1.0 - lambda];
        for (w, br) in weights.iter().zip(active.iter()) {
            if *w == 0.0 {
                continue;
            }
            let scaled = &br.generator * num_complex::Complex64::new(*w, 0.0);
            gens[br.block] = Some(match gens[br.block].take() {
                Some(g) => g + scaled,
                None => scaled,
            });
        }

        let mut t = (4.0 * step).min(0.5);
        while t > 1e-14 {
            let mut cand = u.clone();
            for (b, g) in gens.iter().enumerate() {
                if let Some(g) = g {
                    cand.blocks_mut()[b] = &u.blocks()[b] * linalg::unitary_exp_ih(g, t / dir_norm);
                }
            }
            let cand_val = x.sub(&cand).expect("shape").op_norm();
            if cand_val < val - 1e-15 {
                val = cand_val;
                u = cand;
                step = t;
                continue 'outer;
            }
            t *= 0.5;
        }
        // no improvement at this activation window; tighten and retry once
        if step > 1e-12 {
            step *= 1e-3;
            continue;
        }
        break;
    }
    (val, u)
}

/// Brute-force distance from `x` to the unitary group: Haar sampling, then
/// multi-start random walks each finished by a gradient polish (the
/// objective has shallow basins and plateaus where an isotropic walk alone
/// strands). Independent of the polar-decomposition route.
pub fn nearest_unitary_bruteforce<R: Rng>(x: &AlgElement, coarse: usize, rng: &mut R) -> f64 {
    let alg = x.algebra().clone();
    let mut samples: Vec<(f64, AlgElement)> = Vec::with_capacity(coarse + 1);
    let one = alg.unit();
    samples.push((x.sub(&one).expect("shape").op_norm(), one));
    for _ in 0..coarse {
        let u = random::random_unitary(&alg, rng);
        let d = x.sub(&u).expect("shape").op_norm();
        samples.push((d, u));
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut best = f64::INFINITY;
    for (val, start) in samples.into_iter().take(2) {
        let (walked_val, walked_u) = unitary_walk(x, start, val, rng);
        let (polished, _) = gradient_polish(x, (walked_val, walked_u));
        best = best.min(polished);
    }
    // a fresh independent walk against stranded basins
    let u = random::random_unitary(&alg, rng);
    let d = x.sub(&u).expect("shape").op_norm();
    let (wv, wu) = unitary_walk(x, u, d, rng);
    best = best.min(gradient_polish(x, (wv, wu)).0);
    best
}
