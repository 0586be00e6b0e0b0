//! Linear maps between block algebras in matrix-unit coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{AlgElement, BlockAlgebra, CMat};

/// A linear map `T: domain → codomain`, stored as its
/// `codomain.coord_dim() × domain.coord_dim()` matrix over the matrix-unit
/// bases (which are orthonormal for the Frobenius inner product).
#[derive(Clone, Debug, PartialEq)]
pub struct LinMap {
    domain: BlockAlgebra,
    codomain: BlockAlgebra,
    matrix: CMat,
}

impl LinMap {
    pub fn new(domain: BlockAlgebra, codomain: BlockAlgebra, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != codomain.coord_dim() || matrix.ncols() != domain.coord_dim() {
            return Err(Error::ShapeMismatch(format!(
                "map matrix must be {}x{}, got {}x{}",
                codomain.coord_dim(),
                domain.coord_dim(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Structural("map matrix contains non-finite entries".into()));
        }
        Ok(LinMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn identity(algebra: &BlockAlgebra) -> LinMap {
        LinMap {
            domain: algebra.clone(),
            codomain: algebra.clone(),
            matrix: CMat::identity(algebra.coord_dim(), algebra.coord_dim()),
        }
    }

    /// Build the coordinate matrix by applying `f` to every basis element.
    pub fn from_action<F>(domain: &BlockAlgebra, codomain: &BlockAlgebra, mut f: F) -> Result<LinMap>
    where
        F: FnMut(&AlgElement) -> Result<AlgElement>,
    {
        let da = domain.coord_dim();
        let db = codomain.coord_dim();
        let mut matrix = CMat::zeros(db, da);
        for j in 0..da {
            let img = f(&domain.basis_element(j))?;
            if img.algebra() != codomain {
                return Err(Error::ShapeMismatch(
                    "action image lives in the wrong algebra".into(),
                ));
            }
            matrix.set_column(j, &img.to_coords());
        }
        LinMap::new(domain.clone(), codomain.clone(), matrix)
    }

    /// The transpose map `x ↦ xᵀ` blockwise (a complete-norm benchmark case).
    pub fn transpose_map(algebra: &BlockAlgebra) -> LinMap {
        LinMap::from_action(algebra, algebra, |x| {
            let blocks = x.blocks().iter().map(|m| m.transpose()).collect();
            AlgElement::from_blocks(algebra.clone(), blocks)
        })
        .expect("transpose action is well-formed")
    }

    /// Left multiplication `x ↦ c·x`.
    pub fn left_mul(c: &AlgElement) -> LinMap {
        let alg = c.algebra().clone();
        LinMap::from_action(&alg, &alg, |x| c.mul(x)).expect("left multiplication is well-formed")
    }

    /// Conjugation `x ↦ u x u*`.
    pub fn conjugation(u: &AlgElement) -> LinMap {
        let alg = u.algebra().clone();
        LinMap::from_action(&alg, &alg, |x| u.mul(x)?.mul(&u.adjoint())).expect("conjugation is well-formed")
    }

    pub fn domain(&self) -> &BlockAlgebra {
        &self.domain
    }

    pub fn codomain(&self) -> &BlockAlgebra {
        &self.codomain
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn apply(&self, x: &AlgElement) -> Result<AlgElement> {
        if x.algebra() != &self.domain {
            return Err(Error::ShapeMismatch("apply: element not in the domain".into()));
        }
        AlgElement::from_coords(&self.codomain, &(&self.matrix * x.to_coords()))
    }

    /// Apply `id_{M_k} ⊗ T` to an element of `M_k(domain)`.
    pub fn apply_amplified(&self, x: &AlgElement, k: usize) -> Result<AlgElement> {
        if x.algebra() != &self.domain.amplified(k) {
            return Err(Error::ShapeMismatch(
                "apply_amplified: element not in the amplified domain".into(),
            ));
        }
        let mut out = self.codomain.amplified(k).zero();
        for r in 0..k {
            for s in 0..k {
                let cell = x.amplified_cell(&self.domain, k, r, s);
                let img = self.apply(&cell)?;
                out.set_amplified_cell(&self.codomain, &img, r, s);
            }
        }
        Ok(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinMap) -> Result<LinMap> {
        if inner.codomain != self.domain {
            return Err(Error::ShapeMismatch(
                "compose: inner codomain does not match outer domain".into(),
            ));
        }
        LinMap::new(
            inner.domain.clone(),
            self.codomain.clone(),
            &self.matrix * &inner.matrix,
        )
    }

    pub fn add(&self, rhs: &LinMap) -> Result<LinMap> {
        self.check_same_spaces(rhs)?;
        LinMap::new(self.domain.clone(), self.codomain.clone(), &self.matrix + &rhs.matrix)
    }

    pub fn sub(&self, rhs: &LinMap) -> Result<LinMap> {
        self.check_same_spaces(rhs)?;
        LinMap::new(self.domain.clone(), self.codomain.clone(), &self.matrix - &rhs.matrix)
    }

    pub fn scale(&self, c: f64) -> LinMap {
        LinMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * Complex64::new(c, 0.0),
        }
    }

    fn check_same_spaces(&self, rhs: &LinMap) -> Result<()> {
        if self.domain != rhs.domain || self.codomain != rhs.codomain {
            return Err(Error::ShapeMismatch("maps act between different spaces".into()));
        }
        Ok(())
    }

    pub fn singular_values(&self) -> Vec<f64> {
        crate::matcore::linalg::singular_values(&self.matrix)
    }

    /// Operator norm of the coordinate matrix (an exact, deterministic norm
    /// on coordinates; not the cb-norm).
    pub fn coord_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.singular_values();
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        if smin == 0.0 {
            f64::INFINITY
        } else {
            smax / smin
        }
    }

    pub fn is_invertible(&self) -> bool {
        if self.matrix.nrows() != self.matrix.ncols() {
            return false;
        }
        let sv = self.singular_values();
        let smax = sv[0];
        smax > 0.0 && sv[sv.len() - 1] > crate::tol::INVERTIBILITY * smax
    }

    pub fn try_inverse(&self) -> Result<LinMap> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible("linear map is numerically singular".into()));
        }
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotInvertible("matrix inversion failed".into()))?;
        LinMap::new(self.codomain.clone(), self.domain.clone(), inv)
    }

    /// The map `T⋆(x) = T(x*)*`. This is a bit-exact operation: conjugation
    /// composed with the transposition permutation on both coordinate sets.
    pub fn star(&self) -> LinMap {
        let pa = transposition_permutation(&self.domain);
        let pb = transposition_permutation(&self.codomain);
        let db = self.codomain.coord_dim();
        let da = self.domain.coord_dim();
        let mut out = CMat::zeros(db, da);
        for i in 0..db {
            for j in 0..da {
                out[(i, j)] = self.matrix[(pb[i], pa[j])].conj();
            }
        }
        LinMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: out,
        }
    }

    /// `T(1) = 1` up to `tol`.
    pub fn is_unital(&self, tol: f64) -> bool {
        let one = self.domain.unit();
        match self.apply(&one) {
            Ok(img) => img
                .distance_to(&self.codomain.unit())
                .map(|d| d <= tol)
                .unwrap_or(false),
            Err(_) => false,
        }
    }

    /// Frobenius adjoint of the coordinate matrix.
    pub fn adjoint_matrix(&self) -> CMat {
        self.matrix.adjoint()
    }
}

/// Permutation `p` with `coords(xᵀ)[i] = coords(x)[p[i]]`.
fn transposition_permutation(alg: &BlockAlgebra) -> Vec<usize> {
    let mut p = Vec::with_capacity(alg.coord_dim());
    let mut off = 0;
    for &n in alg.dims() {
        for r in 0..n {
            for c in 0..n {
                p.push(off + c * n + r);
            }
        }
        off += n * n;
    }
    p
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct LinMapJson {
    pub domain: Vec<usize>,
    pub codomain: Vec<usize>,
    /// Row-major `codomain.coord_dim() × domain.coord_dim()` entries.
    pub matrix: Vec<[f64; 2]>,
}

impl From<&LinMap> for LinMapJson {
    fn from(t: &LinMap) -> Self {
        let (db, da) = (t.matrix.nrows(), t.matrix.ncols());
        LinMapJson {
            domain: t.domain.dims().to_vec(),
            codomain: t.codomain.dims().to_vec(),
            matrix: (0..db * da)
                .map(|i| {
                    let z = t.matrix[(i / da, i % da)];
                    [z.re, z.im]
                })
                .collect(),
        }
    }
}

impl TryFrom<LinMapJson> for LinMap {
    type Error = Error;

    fn try_from(j: LinMapJson) -> Result<LinMap> {
        let domain = BlockAlgebra::new(j.domain)?;
        let codomain = BlockAlgebra::new(j.codomain)?;
        let (db, da) = (codomain.coord_dim(), domain.coord_dim());
        if j.matrix.len() != db * da {
            return Err(Error::ShapeMismatch(format!(
                "expected {} matrix entries, got {}",
                db * da,
                j.matrix.len()
            )));
        }
        let matrix = CMat::from_fn(db, da, |r, c| {
            let [re, im] = j.matrix[r * da + c];
            Complex64::new(re, im)
        });
        LinMap::new(domain, codomain, matrix)
    }
}

impl Serialize for LinMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LinMapJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LinMapJson::deserialize(d)?;
        LinMap::try_from(j).map_err(serde::de::Error::custom)
    }
}
