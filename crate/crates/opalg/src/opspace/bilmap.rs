//! Bilinear maps `B: domain × domain → codomain` in coordinates.
//!
//! The tensor is stored linearized as a `codomain.coord_dim() × d²` matrix
//! with column index `a·d + b` holding the coordinates of `B(e_a, e_b)`,
//! where `d = domain.coord_dim()`. The operator norm of that matrix is the
//! deterministic "coordinate norm" used to drive iterations; cb-type norms
//! are estimated separately by the ascent in [`super::estimate`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{AlgElement, BlockAlgebra, CMat, CVec};

#[derive(Clone, Debug, PartialEq)]
pub struct BilMap {
    domain: BlockAlgebra,
    codomain: BlockAlgebra,
    matrix: CMat,
}

impl BilMap {
    pub fn new(domain: BlockAlgebra, codomain: BlockAlgebra, matrix: CMat) -> Result<Self> {
        let d = domain.coord_dim();
        if matrix.nrows() != codomain.coord_dim() || matrix.ncols() != d * d {
            return Err(Error::ShapeMismatch(format!(
                "bilinear tensor must be {}x{}, got {}x{}",
                codomain.coord_dim(),
                d * d,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Structural("bilinear tensor contains non-finite entries".into()));
        }
        Ok(BilMap {
            domain,
            codomain,
            matrix,
        })
    }

    pub fn zero(domain: &BlockAlgebra, codomain: &BlockAlgebra) -> BilMap {
        let d = domain.coord_dim();
        BilMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: CMat::zeros(codomain.coord_dim(), d * d),
        }
    }

    pub fn from_action<F>(domain: &BlockAlgebra, codomain: &BlockAlgebra, mut f: F) -> Result<BilMap>
    where
        F: FnMut(&AlgElement, &AlgElement) -> Result<AlgElement>,
    {
        let d = domain.coord_dim();
        let mut matrix = CMat::zeros(codomain.coord_dim(), d * d);
        for a in 0..d {
            let ea = domain.basis_element(a);
            for b in 0..d {
                let eb = domain.basis_element(b);
                let img = f(&ea, &eb)?;
                if img.algebra() != codomain {
                    return Err(Error::ShapeMismatch(
                        "bilinear action image lives in the wrong algebra".into(),
                    ));
                }
                matrix.set_column(a * d + b, &img.to_coords());
            }
        }
        BilMap::new(domain.clone(), codomain.clone(), matrix)
    }

    /// The native multiplication `(x, y) ↦ xy` of a block algebra.
    pub fn native_multiplication(algebra: &BlockAlgebra) -> BilMap {
        BilMap::from_action(algebra, algebra, |x, y| x.mul(y)).expect("multiplication is well-formed")
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

    pub fn eval(&self, x: &AlgElement, y: &AlgElement) -> Result<AlgElement> {
        if x.algebra() != &self.domain || y.algebra() != &self.domain {
            return Err(Error::ShapeMismatch("eval: arguments not in the domain".into()));
        }
        Ok(self.eval_coords(&x.to_coords(), &y.to_coords()))
    }

    pub(crate) fn eval_coords(&self, x: &CVec, y: &CVec) -> AlgElement {
        let mut out = CVec::zeros(self.codomain.coord_dim());
        self.eval_coords_into(x, y, &mut out);
        AlgElement::from_coords(&self.codomain, &out).expect("shape by construction")
    }

    /// Accumulate `B(x, y)` into `out` (which must be pre-zeroed by the
    /// caller when a fresh value is wanted); avoids building the Kronecker
    /// vector.
    pub(crate) fn eval_coords_into(&self, x: &CVec, y: &CVec, out: &mut CVec) {
        let d = self.domain.coord_dim();
        let m = &self.matrix;
        for a in 0..d {
            let xa = x[a];
            if xa == num_complex::Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..d {
                let w = xa * y[b];
                if w == num_complex::Complex64::new(0.0, 0.0) {
                    continue;
                }
                let col = m.column(a * d + b);
                for (o, mc) in out.iter_mut().zip(col.iter()) {
                    *o += w * mc;
                }
            }
        }
    }

    /// Row-times-column amplification: for `X, Y ∈ M_k(domain)` compute
    /// `Z ∈ M_k(codomain)` with `Z_{ij} = Σ_p B(X_{ip}, Y_{pj})`.
    pub fn eval_amplified(&self, x: &AlgElement, y: &AlgElement, k: usize) -> Result<AlgElement> {
        let amp = self.domain.amplified(k);
        if x.algebra() != &amp || y.algebra() != &amp {
            return Err(Error::ShapeMismatch(
                "eval_amplified: arguments not in the amplified domain".into(),
            ));
        }
        let mut out = self.codomain.amplified(k).zero();
        for i in 0..k {
            for j in 0..k {
                let mut acc = self.codomain.zero();
                for p in 0..k {
                    let xc = x.amplified_cell(&self.domain, k, i, p);
                    let yc = y.amplified_cell(&self.domain, k, p, j);
                    acc = acc.add(&self.eval_coords(&xc.to_coords(), &yc.to_coords()))?;
                }
                out.set_amplified_cell(&self.codomain, &acc, i, j);
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &BilMap) -> Result<BilMap> {
        self.check_same_spaces(rhs)?;
        BilMap::new(self.domain.clone(), self.codomain.clone(), &self.matrix + &rhs.matrix)
    }

    pub fn sub(&self, rhs: &BilMap) -> Result<BilMap> {
        self.check_same_spaces(rhs)?;
        BilMap::new(self.domain.clone(), self.codomain.clone(), &self.matrix - &rhs.matrix)
    }

    pub fn scale(&self, c: f64) -> BilMap {
        BilMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * Complex64::new(c, 0.0),
        }
    }

    fn check_same_spaces(&self, rhs: &BilMap) -> Result<()> {
        if self.domain != rhs.domain || self.codomain != rhs.codomain {
            return Err(Error::ShapeMismatch("bilinear maps act between different spaces".into()));
        }
        Ok(())
    }

    /// Exact operator norm of the linearized tensor (coordinate 2-norms on
    /// both sides); deterministic and cheap.
    pub fn coord_norm(&self) -> f64 {
        crate::matcore::linalg::largest_singular_value(&self.matrix)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct BilMapJson {
    pub domain: Vec<usize>,
    pub codomain: Vec<usize>,
    /// Row-major `codomain.coord_dim() × domain.coord_dim()²` entries; the
    /// column `a·d + b` is `B(e_a, e_b)`.
    pub tensor: Vec<[f64; 2]>,
}

impl From<&BilMap> for BilMapJson {
    fn from(t: &BilMap) -> Self {
        let (db, dd) = (t.matrix.nrows(), t.matrix.ncols());
        BilMapJson {
            domain: t.domain.dims().to_vec(),
            codomain: t.codomain.dims().to_vec(),
            tensor: (0..db * dd)
                .map(|i| {
                    let z = t.matrix[(i / dd, i % dd)];
                    [z.re, z.im]
                })
                .collect(),
        }
    }
}

impl TryFrom<BilMapJson> for BilMap {
    type Error = Error;

    fn try_from(j: BilMapJson) -> Result<BilMap> {
        let domain = BlockAlgebra::new(j.domain)?;
        let codomain = BlockAlgebra::new(j.codomain)?;
        let d = domain.coord_dim();
        let (db, dd) = (codomain.coord_dim(), d * d);
        if j.tensor.len() != db * dd {
            return Err(Error::ShapeMismatch(format!(
                "expected {} tensor entries, got {}",
                db * dd,
                j.tensor.len()
            )));
        }
        let matrix = CMat::from_fn(db, dd, |r, c| {
            let [re, im] = j.tensor[r * dd + c];
            Complex64::new(re, im)
        });
        BilMap::new(domain, codomain, matrix)
    }
}

impl Serialize for BilMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BilMapJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BilMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BilMapJson::deserialize(d)?;
        BilMap::try_from(j).map_err(serde::de::Error::custom)
    }
}
