use std::ops::{Add, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgebraShape;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cre, cx, Cx, Real};

/// Which norm [`Element::norm`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// Largest singular value over all blocks.
    Operator,
    /// Sum of all singular values.
    Trace,
}

/// A member of the block-diagonal algebra: one complex square matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<T: Real> {
    shape: AlgebraShape,
    blocks: Vec<DMatrix<Cx<T>>>,
}

impl<T: Real> Element<T> {
    pub fn zeros(shape: &AlgebraShape) -> Self {
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&n| DMatrix::zeros(n, n))
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    /// The unit `𝟏`.
    pub fn unit(shape: &AlgebraShape) -> Self {
        let blocks = shape
            .block_dims()
            .iter()
            .map(|&n| DMatrix::identity(n, n))
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn from_blocks(shape: &AlgebraShape, blocks: Vec<DMatrix<Cx<T>>>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::BlockMismatch(format!(
                "expected {} blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(shape.block_dims()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::BlockMismatch(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }

    /// Builds an element from real block matrices.
    pub fn from_real_blocks(shape: &AlgebraShape, blocks: Vec<DMatrix<T>>) -> Result<Self> {
        Self::from_blocks(shape, blocks.into_iter().map(|b| b.map(cre)).collect())
    }

    /// Diagonal element whose ambient diagonal (concatenated over blocks) is `values`.
    pub fn diagonal(shape: &AlgebraShape, values: &[T]) -> Result<Self> {
        if values.len() != shape.ambient_size() {
            return Err(Error::BlockMismatch(format!(
                "{} diagonal values for ambient size {}",
                values.len(),
                shape.ambient_size()
            )));
        }
        let mut out = Self::zeros(shape);
        let mut at = 0;
        for b in out.blocks.iter_mut() {
            for i in 0..b.nrows() {
                b[(i, i)] = cre(values[at]);
                at += 1;
            }
        }
        Ok(out)
    }

    /// Element of the commutative algebra `C^d` with the given coordinates.
    pub fn from_function(values: &[T]) -> Self {
        let shape = AlgebraShape::commutative(values.len()).expect("non-empty");
        Self::diagonal(&shape, values).expect("matching size")
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[DMatrix<Cx<T>>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &DMatrix<Cx<T>> {
        &self.blocks[b]
    }

    fn zip_map(&self, other: &Self, f: impl Fn(&DMatrix<Cx<T>>, &DMatrix<Cx<T>>) -> DMatrix<Cx<T>>) -> Self {
        assert_eq!(self.shape, other.shape, "element shapes differ");
        Self {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    fn map_blocks(&self, f: impl Fn(&DMatrix<Cx<T>>) -> DMatrix<Cx<T>>) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_blocks(|b| b * cre(s))
    }

    pub fn scale_complex(&self, s: Cx<T>) -> Self {
        self.map_blocks(|b| b * s)
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    /// Blockwise transpose.
    pub fn transpose(&self) -> Self {
        self.map_blocks(|b| b.transpose())
    }

    /// Ordinary (associative) product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self.zip_map(other, |a, b| a * b))
    }

    /// `(xy + yx) / 2`.
    pub fn jordan_product(&self, other: &Self) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        let half = cre(T::lit(0.5));
        Ok(self.zip_map(other, |a, b| (a * b + b * a) * half))
    }

    pub fn square(&self) -> Self {
        self.map_blocks(|b| b * b)
    }

    /// `Σ_b tr(x_b† y_b)`.
    pub fn hs_inner(&self, other: &Self) -> Result<Cx<T>> {
        self.shape.ensure_same(&other.shape)?;
        let mut acc = cre(T::zero());
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (p, q) in a.iter().zip(b.iter()) {
                acc += p.conj() * q;
            }
        }
        Ok(acc)
    }

    pub fn hs_norm(&self) -> T {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(T::zero(), |a, z| a + z.norm_sqr())
            .sqrt()
    }

    pub fn trace(&self) -> Cx<T> {
        self.blocks
            .iter()
            .fold(cre(T::zero()), |acc, b| acc + b.trace())
    }

    pub fn norm(&self, kind: NormKind) -> T {
        let singular = self.blocks.iter().flat_map(|b| linalg::complex_singular_values(b));
        match kind {
            NormKind::Operator => singular.fold(T::zero(), |a, s| a.max(s)),
            NormKind::Trace => singular.fold(T::zero(), |a, s| a + s),
        }
    }

    /// HS norm of `x - x†`, halved.
    pub fn self_adjoint_residual(&self) -> T {
        (self - &self.adjoint()).hs_norm() * T::lit(0.5)
    }

    pub fn is_self_adjoint(&self, tol: T) -> bool {
        self.self_adjoint_residual() <= tol * (T::one() + self.hs_norm())
    }

    pub(crate) fn ensure_self_adjoint(&self, tol: T) -> Result<()> {
        if self.is_self_adjoint(tol) {
            Ok(())
        } else {
            Err(Error::NotSelfAdjoint {
                residual: self.self_adjoint_residual().to_f64_lossy(),
            })
        }
    }

    /// Splits `x = h + i k` into self-adjoint parts `(h, k)`.
    pub fn hermitian_parts(&self) -> (Self, Self) {
        let adj = self.adjoint();
        let h = (self + &adj).scale(T::lit(0.5));
        let k = (self - &adj).scale_complex(cx(T::zero(), T::lit(-0.5)));
        (h, k)
    }

    /// Coordinates of the self-adjoint part in the canonical orthonormal basis.
    ///
    /// Per block, entries `(i, j)` with `i <= j` are visited row-major: a
    /// diagonal unit for `i == j`, otherwise the symmetric pair
    /// `(E_ij + E_ji)/√2` followed by the antisymmetric pair `i(E_ji - E_ij)/√2`.
    pub fn sa_coords(&self) -> DVector<T> {
        let mut out = DVector::zeros(self.shape.dim());
        let r2 = T::lit(std::f64::consts::SQRT_2);
        let half = T::lit(0.5);
        let mut at = 0;
        for b in &self.blocks {
            let n = b.nrows();
            for i in 0..n {
                for j in i..n {
                    if i == j {
                        out[at] = b[(i, i)].re;
                        at += 1;
                    } else {
                        // Average (i,j) and conj(j,i) to read only the Hermitian part.
                        let z = (b[(i, j)] + b[(j, i)].conj()) * cre(half);
                        out[at] = r2 * z.re;
                        out[at + 1] = -r2 * z.im;
                        at += 2;
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`Element::sa_coords`].
    pub fn from_sa_coords(shape: &AlgebraShape, coords: &DVector<T>) -> Self {
        assert_eq!(coords.len(), shape.dim(), "coordinate length");
        let inv_r2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        let mut out = Self::zeros(shape);
        let mut at = 0;
        for b in out.blocks.iter_mut() {
            let n = b.nrows();
            for i in 0..n {
                for j in i..n {
                    if i == j {
                        b[(i, i)] = cre(coords[at]);
                        at += 1;
                    } else {
                        let z = cx(coords[at] * inv_r2, -coords[at + 1] * inv_r2);
                        b[(i, j)] = z;
                        b[(j, i)] = z.conj();
                        at += 2;
                    }
                }
            }
        }
        out
    }

    /// The `k`-th canonical self-adjoint basis element.
    pub fn basis_element(shape: &AlgebraShape, k: usize) -> Self {
        let mut e = DVector::zeros(shape.dim());
        e[k] = T::one();
        Self::from_sa_coords(shape, &e)
    }

    pub fn canonical_basis(shape: &AlgebraShape) -> Vec<Self> {
        (0..shape.dim()).map(|k| Self::basis_element(shape, k)).collect()
    }

    /// Eigen-decomposition of each block of the Hermitian part.
    fn block_eigen(&self) -> Vec<SymmetricEigen<Cx<T>, nalgebra::Dyn>> {
        self.blocks
            .iter()
            .map(|b| {
                let h = (b + b.adjoint()) * cre(T::lit(0.5));
                SymmetricEigen::new(h)
            })
            .collect()
    }

    /// All eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut vals: Vec<T> = self
            .block_eigen()
            .iter()
            .flat_map(|e| e.eigenvalues.iter().copied().collect::<Vec<_>>())
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        vals
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or_else(T::zero)
    }

    /// Spectral decomposition `x = Σ λ_k p_k`; eigenvalues closer than `tol`
    /// are merged into one cluster. Ordered by ascending eigenvalue.
    pub fn spectral_projections(&self, tol: T) -> Result<Vec<(T, Self)>> {
        self.ensure_self_adjoint(tol)?;
        let eig = self.block_eigen();
        let mut pairs: Vec<(T, usize, usize)> = Vec::new();
        for (b, e) in eig.iter().enumerate() {
            for (k, &v) in e.eigenvalues.iter().enumerate() {
                pairs.push((v, b, k));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut clusters: Vec<Vec<(T, usize, usize)>> = Vec::new();
        for p in pairs {
            match clusters.last_mut() {
                Some(c) if p.0 - c.last().expect("non-empty").0 <= tol => c.push(p),
                _ => clusters.push(vec![p]),
            }
        }
        let out = clusters
            .into_iter()
            .map(|c| {
                let mean = c.iter().fold(T::zero(), |a, p| a + p.0) / T::from_usize_lossy(c.len());
                let mut proj = Self::zeros(&self.shape);
                for &(_, b, k) in &c {
                    let v = eig[b].eigenvectors.column(k);
                    proj.blocks[b] += &v * v.adjoint();
                }
                (mean, proj)
            })
            .collect();
        Ok(out)
    }

    /// Positive semidefinite up to `tol`, relative to `1 + ‖x‖`.
    pub fn is_psd(&self, tol: T) -> bool {
        if !self.is_self_adjoint(tol) {
            return false;
        }
        let scale = T::one() + self.norm(NormKind::Operator);
        self.min_eigenvalue() >= -tol * scale
    }

    /// Projection onto the span of eigenvectors with eigenvalue above `cut`.
    pub fn support_projection(&self, cut: T) -> Self {
        let eig = self.block_eigen();
        let mut proj = Self::zeros(&self.shape);
        for (b, e) in eig.iter().enumerate() {
            for (k, &v) in e.eigenvalues.iter().enumerate() {
                if v > cut {
                    let col = e.eigenvectors.column(k);
                    proj.blocks[b] += &col * col.adjoint();
                }
            }
        }
        proj
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(p, q)| (p - q).norm_sqr().sqrt()).collect::<Vec<_>>())
            .fold(T::zero(), |a, v| a.max(v))
    }
}

impl<T: Real> Add for &Element<T> {
    type Output = Element<T>;
    fn add(self, rhs: Self) -> Element<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &Element<T> {
    type Output = Element<T>;
    fn sub(self, rhs: Self) -> Element<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<T: Real> Neg for &Element<T> {
    type Output = Element<T>;
    fn neg(self) -> Element<T> {
        self.map_blocks(|b| -b)
    }
}

/// `jordan_product` as a free function.
pub fn jordan_product<T: Real>(x: &Element<T>, y: &Element<T>) -> Result<Element<T>> {
    x.jordan_product(y)
}

/// `hs_inner` as a free function.
pub fn hs_inner<T: Real>(x: &Element<T>, y: &Element<T>) -> Result<Cx<T>> {
    x.hs_inner(y)
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

impl<T: Real> Serialize for Element<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                (0..b.nrows())
                    .map(|i| {
                        (0..b.ncols())
                            .map(|j| [b[(i, j)].re.to_f64_lossy(), b[(i, j)].im.to_f64_lossy()])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ElementRepr { blocks }.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Element<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ElementRepr::deserialize(d)?;
        let dims: Vec<usize> = repr.blocks.iter().map(|b| b.len()).collect();
        let shape = AlgebraShape::new(dims).map_err(D::Error::custom)?;
        let mut blocks = Vec::with_capacity(repr.blocks.len());
        for (bi, rows) in repr.blocks.iter().enumerate() {
            let n = rows.len();
            let mut m = DMatrix::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(D::Error::custom(format!("block {bi} row {i} is not square")));
                }
                for (j, z) in row.iter().enumerate() {
                    m[(i, j)] = cx(T::lit(z[0]), T::lit(z[1]));
                }
            }
            blocks.push(m);
        }
        Element::from_blocks(&shape, blocks).map_err(D::Error::custom)
    }
}
