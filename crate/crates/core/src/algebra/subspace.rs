use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use super::{AlgebraShape, Element};
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::scalar::Real;
use crate::upmap::SaMap;

/// A real subspace of the self-adjoint part, held as orthonormal coordinate
/// columns in the canonical self-adjoint basis.
///
/// All subspaces handled here are *-closed, so `S^sa` determines `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaSubspace<T: Real> {
    shape: AlgebraShape,
    coords: DMatrix<T>,
}

impl<T: Real> SaSubspace<T> {
    pub fn zero(shape: &AlgebraShape) -> Self {
        Self {
            shape: shape.clone(),
            coords: DMatrix::zeros(shape.dim(), 0),
        }
    }

    pub fn full(shape: &AlgebraShape) -> Self {
        let d = shape.dim();
        Self {
            shape: shape.clone(),
            coords: DMatrix::identity(d, d),
        }
    }

    /// Wraps columns that are already orthonormal.
    pub(crate) fn from_orthonormal(shape: &AlgebraShape, mut coords: DMatrix<T>) -> Self {
        debug_assert_eq!(coords.nrows(), shape.dim());
        linalg::sign_normalize_columns(&mut coords);
        Self {
            shape: shape.clone(),
            coords,
        }
    }

    /// Subspace spanned by the columns of an arbitrary coordinate matrix.
    pub fn from_coord_columns(
        shape: &AlgebraShape,
        m: &DMatrix<T>,
        policy: &RankPolicy<T>,
    ) -> Result<Self> {
        if m.nrows() != shape.dim() {
            return Err(Error::BlockMismatch(format!(
                "coordinate rows {} vs dimension {}",
                m.nrows(),
                shape.dim()
            )));
        }
        let q = linalg::range_space(m, policy)?;
        Ok(Self::from_orthonormal(shape, q))
    }

    /// Real span of the self-adjoint parts of `spanners` (non-self-adjoint
    /// inputs contribute both Hermitian parts).
    pub fn span(shape: &AlgebraShape, spanners: &[Element<T>], policy: &RankPolicy<T>) -> Result<Self> {
        let mut cols: Vec<DVector<T>> = Vec::new();
        for x in spanners {
            shape.ensure_same(x.shape())?;
            let (h, k) = x.hermitian_parts();
            cols.push(h.sa_coords());
            if k.hs_norm() > policy.floor {
                cols.push(k.sa_coords());
            }
        }
        if cols.is_empty() {
            return Ok(Self::zero(shape));
        }
        let m = DMatrix::from_columns(&cols);
        Self::from_coord_columns(shape, &m, policy)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    /// Orthonormal coordinate columns.
    pub fn coords(&self) -> &DMatrix<T> {
        &self.coords
    }

    pub fn basis(&self) -> Vec<Element<T>> {
        self.coords
            .column_iter()
            .map(|c| Element::from_sa_coords(&self.shape, &c.into_owned()))
            .collect()
    }

    /// Orthogonal projector onto the subspace, in coordinates.
    pub fn projector(&self) -> DMatrix<T> {
        &self.coords * self.coords.transpose()
    }

    pub fn complement_projector(&self) -> DMatrix<T> {
        let d = self.shape.dim();
        DMatrix::identity(d, d) - self.projector()
    }

    /// HS-orthogonal complement inside the self-adjoint part.
    pub fn orthogonal_complement(&self, policy: &RankPolicy<T>) -> Result<Self> {
        if self.dim() == 0 {
            return Ok(Self::full(&self.shape));
        }
        let ns = linalg::null_space(&self.coords.transpose(), policy)?;
        Ok(Self::from_orthonormal(&self.shape, ns))
    }

    pub fn project_coords(&self, v: &DVector<T>) -> DVector<T> {
        &self.coords * (self.coords.transpose() * v)
    }

    pub fn project(&self, x: &Element<T>) -> Element<T> {
        Element::from_sa_coords(&self.shape, &self.project_coords(&x.sa_coords()))
    }

    /// HS norm of the component of `v` orthogonal to the subspace.
    pub fn residual_coords(&self, v: &DVector<T>) -> T {
        (v - self.project_coords(v)).norm()
    }

    pub fn contains(&self, x: &Element<T>, tol: T) -> Result<bool> {
        self.shape.ensure_same(x.shape())?;
        x.ensure_self_adjoint(tol)?;
        let v = x.sa_coords();
        Ok(self.residual_coords(&v) <= tol * (T::one() + v.norm()))
    }

    pub fn contains_coords(&self, v: &DVector<T>, tol: T) -> bool {
        self.residual_coords(v) <= tol * (T::one() + v.norm())
    }

    /// `S ∩ T`, from the null space of the stacked complement projectors.
    pub fn intersect(&self, other: &Self, policy: &RankPolicy<T>) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        let d = self.shape.dim();
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(&self.shape));
        }
        let a = self.complement_projector();
        let b = other.complement_projector();
        let stacked = linalg::vstack(&[&a, &b], d);
        let ns = linalg::null_space(&stacked, policy)?;
        Ok(Self::from_orthonormal(&self.shape, ns))
    }

    /// Largest principal-angle residual of `self`'s basis against `other`.
    pub fn excess_over(&self, other: &Self) -> T {
        if self.dim() == 0 {
            return T::zero();
        }
        linalg::op_norm(&(other.complement_projector() * &self.coords))
    }

    pub fn is_subset_of(&self, other: &Self, tol: T) -> bool {
        self.excess_over(other) <= tol
    }

    /// Same dimension and projectors agreeing to `tol` in operator norm.
    pub fn same_as(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && linalg::op_norm(&(self.projector() - other.projector())) <= tol
    }

    pub fn projector_distance(&self, other: &Self) -> T {
        linalg::op_norm(&(self.projector() - other.projector()))
    }

    /// `L(S)`.
    pub fn image(&self, map: &SaMap<T>, policy: &RankPolicy<T>) -> Result<Self> {
        self.shape.ensure_same(map.shape())?;
        if self.dim() == 0 {
            return Ok(Self::zero(&self.shape));
        }
        Self::from_coord_columns(&self.shape, &(map.matrix() * &self.coords), policy)
    }
}

/// `{x self-adjoint : L(x) ∈ S}`.
pub fn subspace_preimage<T: Real>(
    map: &SaMap<T>,
    s: &SaSubspace<T>,
    policy: &RankPolicy<T>,
) -> Result<SaSubspace<T>> {
    s.shape.ensure_same(map.shape())?;
    let m = s.complement_projector() * map.matrix();
    let ns = linalg::null_space(&m, policy)?;
    Ok(SaSubspace::from_orthonormal(&s.shape, ns))
}

pub fn subspace_span<T: Real>(
    shape: &AlgebraShape,
    spanners: &[Element<T>],
    policy: &RankPolicy<T>,
) -> Result<SaSubspace<T>> {
    SaSubspace::span(shape, spanners, policy)
}

pub fn subspace_intersect<T: Real>(
    s: &SaSubspace<T>,
    t: &SaSubspace<T>,
    policy: &RankPolicy<T>,
) -> Result<SaSubspace<T>> {
    s.intersect(t, policy)
}

pub fn subspace_contains<T: Real>(s: &SaSubspace<T>, x: &Element<T>, tol: T) -> Result<bool> {
    s.contains(x, tol)
}

impl<T: Real> Serialize for SaSubspace<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis().serialize(s)
    }
}
