//! Block algebras `⊕ᵢ M_{nᵢ}` and their elements.
//!
//! A finite-dimensional von Neumann algebra is a direct sum of full matrix
//! blocks. Elements are stored as one dense complex matrix per block, and
//! every linear/bilinear map in the crate works in coordinates over the
//! matrix-unit basis, ordered block-major and row-major within a block.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// A direct sum of full matrix blocks, given by its block sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockAlgebra {
    dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("block list must be nonempty".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument("block sizes must be >= 1".into()));
        }
        Ok(BlockAlgebra { dims })
    }

    /// Single full matrix block `M_n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    /// Coordinate dimension `Σᵢ nᵢ²` over the matrix-unit basis.
    pub fn coord_dim(&self) -> usize {
        self.dims.iter().map(|n| n * n).sum()
    }

    /// Largest block size; the amplification level at which cb-norms of maps
    /// into this algebra stabilize.
    pub fn max_block(&self) -> usize {
        *self.dims.iter().max().expect("nonempty")
    }

    /// Offset of block `b` in the coordinate vector.
    pub fn coord_offset(&self, b: usize) -> usize {
        self.dims[..b].iter().map(|n| n * n).sum()
    }

    /// The algebra `M_k(self) = ⊕ᵢ M_{k·nᵢ}`.
    pub fn amplified(&self, k: usize) -> BlockAlgebra {
        BlockAlgebra {
            dims: self.dims.iter().map(|n| n * k).collect(),
        }
    }

    /// The algebra `M_2(self)` housing 2x2 block assemblies.
    pub fn doubled(&self) -> BlockAlgebra {
        self.amplified(2)
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self.dims.iter().map(|&n| CMat::zeros(n, n)).collect(),
        }
    }

    /// The unit: the identity in each block.
    pub fn unit(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self.dims.iter().map(|&n| CMat::identity(n, n)).collect(),
        }
    }

    /// Matrix-unit basis element for coordinate index `idx`.
    pub fn basis_element(&self, idx: usize) -> AlgElement {
        let mut el = self.zero();
        let mut rem = idx;
        for (b, &n) in self.dims.iter().enumerate() {
            if rem < n * n {
                el.blocks[b][(rem / n, rem % n)] = Complex64::new(1.0, 0.0);
                return el;
            }
            rem -= n * n;
        }
        panic!("coordinate index {idx} out of range");
    }
}

/// An element of a [`BlockAlgebra`]: one complex `nᵢ×nᵢ` matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement {
    algebra: BlockAlgebra,
    blocks: Vec<CMat>,
}

impl AlgElement {
    pub fn from_blocks(algebra: BlockAlgebra, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (b, (m, &n)) in blocks.iter().zip(algebra.dims()).enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "block {b} must be {n}x{n}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Structural(format!(
                    "block {b} contains non-finite entries"
                )));
            }
        }
        Ok(AlgElement { algebra, blocks })
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [CMat] {
        &mut self.blocks
    }

    fn check_same_algebra(&self, rhs: &AlgElement) -> Result<()> {
        if self.algebra != rhs.algebra {
            return Err(Error::ShapeMismatch(format!(
                "elements live in different algebras: {:?} vs {:?}",
                self.algebra.dims(),
                rhs.algebra.dims()
            )));
        }
        Ok(())
    }

    /// Blockwise matrix product.
    pub fn mul(&self, rhs: &AlgElement) -> Result<AlgElement> {
        self.check_same_algebra(rhs)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Ok(AlgElement {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn add(&self, rhs: &AlgElement) -> Result<AlgElement> {
        self.check_same_algebra(rhs)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Ok(AlgElement {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn sub(&self, rhs: &AlgElement) -> Result<AlgElement> {
        self.check_same_algebra(rhs)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a - b)
            .collect();
        Ok(AlgElement {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn scale(&self, c: Complex64) -> AlgElement {
        AlgElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> AlgElement {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Blockwise conjugate transpose `x*`.
    pub fn adjoint(&self) -> AlgElement {
        AlgElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// Ambient C*-norm: the largest singular value over all blocks.
    pub fn op_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(super::linalg::largest_singular_value)
            .fold(0.0, f64::max)
    }

    /// Smallest singular value over all blocks (`1/‖x⁻¹‖` when invertible).
    pub fn smallest_singular_value(&self) -> f64 {
        self.blocks
            .iter()
            .map(super::linalg::smallest_singular_value)
            .fold(f64::INFINITY, f64::min)
    }

    /// Scale-relative invertibility test: `σ_min > threshold · σ_max`.
    pub fn is_invertible(&self) -> bool {
        let smax = self.op_norm();
        smax > 0.0 && self.smallest_singular_value() > crate::tol::INVERTIBILITY * smax
    }

    pub fn try_inverse(&self) -> Result<AlgElement> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible(format!(
                "smallest singular value {:.3e} below threshold",
                self.smallest_singular_value()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|m| {
                m.clone()
                    .try_inverse()
                    .ok_or_else(|| Error::NotInvertible("block inversion failed".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgElement {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    /// `‖x − x*‖`, the deviation from being Hermitian.
    pub fn hermitian_residual(&self) -> f64 {
        self.sub(&self.adjoint()).map(|d| d.op_norm()).unwrap_or(f64::INFINITY)
    }

    /// `‖x − y‖` in the ambient norm.
    pub fn distance_to(&self, rhs: &AlgElement) -> Result<f64> {
        Ok(self.sub(rhs)?.op_norm())
    }

    /// Flatten to the coordinate vector over the matrix-unit basis.
    pub fn to_coords(&self) -> CVec {
        let mut v = CVec::zeros(self.algebra.coord_dim());
        let mut off = 0;
        for m in &self.blocks {
            let n = m.nrows();
            for r in 0..n {
                for c in 0..n {
                    v[off + r * n + c] = m[(r, c)];
                }
            }
            off += n * n;
        }
        v
    }

    pub fn from_coords(algebra: &BlockAlgebra, v: &CVec) -> Result<AlgElement> {
        if v.len() != algebra.coord_dim() {
            return Err(Error::ShapeMismatch(format!(
                "coordinate vector length {} != coord_dim {}",
                v.len(),
                algebra.coord_dim()
            )));
        }
        let mut blocks = Vec::with_capacity(algebra.num_blocks());
        let mut off = 0;
        for &n in algebra.dims() {
            blocks.push(CMat::from_fn(n, n, |r, c| v[off + r * n + c]));
            off += n * n;
        }
        Ok(AlgElement {
            algebra: algebra.clone(),
            blocks,
        })
    }

    /// Frobenius norm over all blocks.
    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| m.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Nearest element of the unit ball: clip singular values at 1.
    pub fn clip_to_unit_ball(&self) -> AlgElement {
        let blocks = self
            .blocks
            .iter()
            .map(|m| super::linalg::clip_singular_values(m, 1.0))
            .collect();
        AlgElement {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// Unitary polar factor per block. Blocks that are numerically zero come
    /// back as the identity, which is still a valid unit-ball maximizer for
    /// the linear half-step of the norm ascent.
    pub fn polar_unitary_part(&self) -> AlgElement {
        let blocks = self.blocks.iter().map(super::linalg::polar_unitary).collect();
        AlgElement {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// Assemble `[[a, b], [c, d]]` per block inside `M_2(algebra)`.
    pub fn block2x2(a: &AlgElement, b: &AlgElement, c: &AlgElement, d: &AlgElement) -> Result<AlgElement> {
        a.check_same_algebra(b)?;
        a.check_same_algebra(c)?;
        a.check_same_algebra(d)?;
        let alg2 = a.algebra.doubled();
        let blocks = a
            .blocks
            .iter()
            .zip(&b.blocks)
            .zip(c.blocks.iter().zip(&d.blocks))
            .map(|((ab, bb), (cb, db))| {
                let n = ab.nrows();
                CMat::from_fn(2 * n, 2 * n, |r, s| match (r < n, s < n) {
                    (true, true) => ab[(r, s)],
                    (true, false) => bb[(r, s - n)],
                    (false, true) => cb[(r - n, s)],
                    (false, false) => db[(r - n, s - n)],
                })
            })
            .collect();
        AlgElement::from_blocks(alg2, blocks)
    }

    /// Cell `(r, s)` of an element of `amplified(base, k)`, as a base element.
    pub fn amplified_cell(&self, base: &BlockAlgebra, k: usize, r: usize, s: usize) -> AlgElement {
        debug_assert_eq!(&base.amplified(k), &self.algebra);
        let blocks = self
            .blocks
            .iter()
            .zip(base.dims())
            .map(|(m, &n)| m.view((r * n, s * n), (n, n)).into_owned())
            .collect();
        AlgElement {
            algebra: base.clone(),
            blocks,
        }
    }

    /// Write `cell` into position `(r, s)` of an element of `amplified(base, k)`.
    pub fn set_amplified_cell(&mut self, base: &BlockAlgebra, cell: &AlgElement, r: usize, s: usize) {
        debug_assert_eq!(&base.amplified(1), cell.algebra());
        for (m, (c, &n)) in self
            .blocks
            .iter_mut()
            .zip(cell.blocks.iter().zip(base.dims()))
        {
            m.view_mut((r * n, s * n), (n, n)).copy_from(c);
        }
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

/// Wire form of an element: `{"dims": [...], "blocks": [[[re, im], ...], ...]}`
/// with each block a row-major list of `[re, im]` pairs. Writers round-trip
/// bit-exactly through readers at double precision.
#[derive(Serialize, Deserialize)]
pub struct ElementJson {
    pub dims: Vec<usize>,
    pub blocks: Vec<Vec<[f64; 2]>>,
}

impl From<&AlgElement> for ElementJson {
    fn from(el: &AlgElement) -> Self {
        ElementJson {
            dims: el.algebra.dims().to_vec(),
            blocks: el
                .blocks
                .iter()
                .map(|m| {
                    let n = m.nrows();
                    (0..n * n)
                        .map(|i| {
                            let z = m[(i / n, i % n)];
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<ElementJson> for AlgElement {
    type Error = Error;

    fn try_from(j: ElementJson) -> Result<AlgElement> {
        let algebra = BlockAlgebra::new(j.dims)?;
        if j.blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch("block count mismatch in JSON".into()));
        }
        let blocks = j
            .blocks
            .iter()
            .zip(algebra.dims())
            .map(|(flat, &n)| {
                if flat.len() != n * n {
                    return Err(Error::ShapeMismatch(format!(
                        "expected {} entries for a {n}x{n} block, got {}",
                        n * n,
                        flat.len()
                    )));
                }
                Ok(CMat::from_fn(n, n, |r, c| {
                    let [re, im] = flat[r * n + c];
                    Complex64::new(re, im)
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        AlgElement::from_blocks(algebra, blocks)
    }
}

impl Serialize for AlgElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ElementJson::deserialize(d)?;
        AlgElement::try_from(j).map_err(serde::de::Error::custom)
    }
}
