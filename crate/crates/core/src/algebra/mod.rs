//! Finite-dimensional *-algebras `M_{n_1} ⊕ … ⊕ M_{n_B}`: elements, the
//! Jordan product, norms, spectral data and self-adjoint subspaces.

mod element;
mod shape;
mod subspace;

pub use element::{hs_inner, jordan_product, Element, NormKind};
pub use shape::AlgebraShape;
pub use subspace::{subspace_contains, subspace_intersect, subspace_preimage, subspace_span, SaSubspace};
