//! Dense complex factorizations routed through realification.
//!
//! The doubling `M ↦ [[Re M, −Im M], [Im M, Re M]]` is an isometric
//! *-isomorphism onto its image: products, adjoints and matrix functions
//! commute with it, singular values appear with doubled multiplicity, and a
//! real singular triple `R(M)w = σ·u` reinterprets directly as a complex
//! triple. All SVD and Hermitian eigen computations below therefore run on
//! the real doubled matrix and read complex results back off the block
//! structure. Unitary polar factors are computed by the scaled Newton
//! iteration, which works in complex arithmetic directly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::algebra::{CMat, CVec};

pub type RMat = DMatrix<f64>;
pub type RVec = nalgebra::DVector<f64>;

pub fn realify(m: &CMat) -> RMat {
    let (r, c) = m.shape();
    let mut out = RMat::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// Read a complex matrix back from a doubled real matrix, averaging the two
/// copies of each entry.
pub fn complex_from_doubled(m: &RMat) -> CMat {
    let r = m.nrows() / 2;
    let c = m.ncols() / 2;
    CMat::from_fn(r, c, |i, j| {
        Complex64::new(
            0.5 * (m[(i, j)] + m[(i + r, j + c)]),
            0.5 * (m[(i + r, j)] - m[(i, j + c)]),
        )
    })
}

fn complex_from_stacked(w: &RVec) -> CVec {
    let n = w.len() / 2;
    CVec::from_fn(n, |i, _| Complex64::new(w[i], w[i + n]))
}

/// Singular values of a complex matrix, descending. Each value appears with
/// its doubled multiplicity collapsed back (the doubled list is sorted and
/// every second entry is returned, which is exact up to pairing noise).
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut sv: Vec<f64> = realify(m)
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv.into_iter().step_by(2).collect()
}

pub fn largest_singular_value(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn smallest_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Top singular triple `(σ, u, v)` with `σ = ‖M‖` and `M v ≈ σ u`,
/// `‖u‖ = ‖v‖ = 1`.
///
/// The value comes from the vectorless SVD (the vectored real SVD can
/// misreport values on tightly clustered spectra); the vectors come from
/// the vectored run with `u` recomputed as `normalize(M v)`, so the
/// rank-one functional `Re⟨u v*, ·⟩` evaluated at `M` is always a true
/// lower bound for `σ`.
pub fn top_singular_triple(m: &CMat) -> (f64, CVec, CVec) {
    leading_singular_triples(m, 1).remove(0)
}

/// Leading `count` singular triples (collapsing the doubled multiplicity of
/// the realified problem by stride 2 over the sorted list). Values are
/// taken from the vectorless SVD; see [`top_singular_triple`].
pub fn leading_singular_triples(m: &CMat, count: usize) -> Vec<(f64, CVec, CVec)> {
    let trusted = singular_values(m);
    let svd = realify(m).svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    order
        .iter()
        .step_by(2)
        .take(count)
        .enumerate()
        .map(|(rank, &i)| {
            let v = complex_from_stacked(&vt.row(i).transpose());
            let v = if v.norm() > 0.0 { v.normalize() } else { v };
            let mv = m * &v;
            let n = mv.norm();
            let u = if n > 1e-300 {
                mv / Complex64::new(n, 0.0)
            } else {
                let mut e = CVec::zeros(m.nrows());
                e[0] = Complex64::new(1.0, 0.0);
                e
            };
            (trusted.get(rank).copied().unwrap_or(0.0), u, v)
        })
        .collect()
}

/// Hermitian functional calculus `f(h)` through the doubled real symmetric
/// eigendecomposition.
pub fn hermitian_matrix_function<F: Fn(f64) -> f64>(h: &CMat, f: F) -> CMat {
    let (vals, vecs) = hermitian_eigen_doubled(h);
    let m2 = vecs.nrows();
    let mut out_real = RMat::zeros(m2, m2);
    for (j, &ev) in vals.iter().enumerate() {
        let w = f(ev);
        if w == 0.0 {
            continue;
        }
        let col = vecs.column(j);
        for r in 0..m2 {
            for c in 0..m2 {
                out_real[(r, c)] += w * col[r] * col[c];
            }
        }
    }
    complex_from_doubled(&out_real)
}

/// Clip the singular values of `m` at `radius`:
/// `m · w(m*m)` with `w(λ) = min(1, radius/√λ)`, a basis-free matrix
/// function evaluated through the (reliable) Hermitian eigensolver.
pub fn clip_singular_values(m: &CMat, radius: f64) -> CMat {
    let h = m.adjoint() * m;
    let w = hermitian_matrix_function(&h, |lam| {
        let sigma = lam.max(0.0).sqrt();
        if sigma <= radius {
            1.0
        } else {
            radius / sigma
        }
    });
    m * w
}

/// Unitary polar factor by the scaled Newton iteration
/// `X ← (γX + (γX)^{-*})/2`. Singular input is nudged by a small multiple
/// of the identity first; the result is always unitary to roundoff.
pub fn polar_unitary(m: &CMat) -> CMat {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale < f64::MIN_POSITIVE {
        return CMat::identity(n, n);
    }
    let mut reg = 0.0;
    'outer: loop {
        let mut x = m.clone();
        if reg > 0.0 {
            for i in 0..n {
                x[(i, i)] += Complex64::new(reg, 0.0);
            }
        }
        for _ in 0..80 {
            let inv = match x.clone().try_inverse() {
                Some(inv) => inv,
                None => {
                    reg = if reg == 0.0 { 1e-12 * scale } else { reg * 100.0 };
                    continue 'outer;
                }
            };
            let nx = x.norm();
            let ninv = inv.norm();
            if !nx.is_finite() || !ninv.is_finite() || ninv > 1e16 / scale.max(1e-300) {
                reg = if reg == 0.0 { 1e-12 * scale } else { reg * 100.0 };
                continue 'outer;
            }
            let gamma = (ninv / nx).sqrt();
            let next = (&x * Complex64::new(gamma, 0.0)
                + inv.adjoint() * Complex64::new(1.0 / gamma, 0.0))
                * Complex64::new(0.5, 0.0);
            let delta = (&next - &x).norm();
            x = next;
            if delta <= 1e-14 * x.norm() {
                return x;
            }
        }
        // Newton stalled; nudge and retry.
        reg = if reg == 0.0 { 1e-12 * scale } else { reg * 100.0 };
        if reg > scale {
            return CMat::identity(n, n);
        }
    }
}

/// Eigendecomposition of a Hermitian matrix via the doubled real symmetric
/// problem: returns the doubled eigenvalue list (ascending) and the real
/// eigenvector matrix, for consumers that assemble spectral projectors.
pub fn hermitian_eigen_doubled(h: &CMat) -> (RVec, RMat) {
    let sym = {
        let r = realify(h);
        (&r + r.transpose()) * 0.5
    };
    let eig = sym.symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Eigenvalues of a Hermitian matrix, ascending, with doubled multiplicities
/// collapsed.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    let (vals, _) = hermitian_eigen_doubled(h);
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.into_iter().step_by(2).collect()
}

/// Spectral projector `Σ { v v* : λ_v ∈ [lo, hi] }` of a Hermitian matrix.
pub fn hermitian_spectral_projector(h: &CMat, lo: f64, hi: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen_doubled(h);
    let m2 = vecs.nrows();
    let mut p_real = RMat::zeros(m2, m2);
    for (j, &ev) in vals.iter().enumerate() {
        if ev >= lo && ev <= hi {
            let w = vecs.column(j);
            for r in 0..m2 {
                for c in 0..m2 {
                    p_real[(r, c)] += w[r] * w[c];
                }
            }
        }
    }
    complex_from_doubled(&p_real)
}

/// `exp(i·t·h)` for Hermitian `h`.
pub fn unitary_exp_ih(h: &CMat, t: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen_doubled(h);
    let n = h.nrows();
    let mut out = CMat::zeros(n, n);
    // use every second vector: each complex eigenvector appears twice in the
    // doubled problem, and the reinterpretation of either copy is valid
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    let mut taken = 0usize;
    let mut proj_sum = CMat::zeros(n, n);
    for &j in &order {
        if taken == n {
            break;
        }
        let w = vecs.column(j).into_owned();
        let v = complex_from_stacked(&w);
        // skip copies that are complex-linearly dependent on what we have
        let mut resid = v.clone();
        let corr = &proj_sum * &resid;
        resid -= corr;
        if resid.norm() < 1e-8 {
            continue;
        }
        let v = resid.normalize();
        let phase = Complex64::from_polar(1.0, t * vals[j]);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] += phase * v[r] * v[c].conj();
                proj_sum[(r, c)] += v[r] * v[c].conj();
            }
        }
        taken += 1;
    }
    out
}
