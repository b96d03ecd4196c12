//! Definite set `M_φ`, the invariant part `B_φ`, the multiplicative core
//! `C_φ`, and Jordan structure of subspaces.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{subspace_preimage, AlgebraShape, Element, SaSubspace};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::scalar::Real;
use crate::upmap::SaMap;

/// Gram matrices more negative than this (relative) are rejected.
const GRAM_NEG_TOL: f64 = 1e-8;

/// Coordinates of `b_i ∘ b_j` for all pairs of columns of `basis`,
/// indexed `i * k + j`.
fn jordan_table<T: Real>(shape: &AlgebraShape, basis: &DMatrix<T>) -> Vec<DVector<T>> {
    let elems: Vec<Element<T>> = basis
        .column_iter()
        .map(|c| Element::from_sa_coords(shape, &c.into_owned()))
        .collect();
    let k = elems.len();
    let mut out = vec![DVector::zeros(shape.dim()); k * k];
    for i in 0..k {
        for j in i..k {
            let v = elems[i].jordan_product(&elems[j]).expect("same shape").sa_coords();
            out[j * k + i] = v.clone();
            out[i * k + j] = v;
        }
    }
    out
}

/// `G_ij = ⟨w, b_i ∘ b_j⟩` for the columns `b` of `basis`.
pub(crate) fn weighted_jordan_gram<T: Real>(shape: &AlgebraShape, basis: &DMatrix<T>, w: &DVector<T>) -> DMatrix<T> {
    let k = basis.ncols();
    let table = jordan_table(shape, basis);
    DMatrix::from_fn(k, k, |i, j| w.dot(&table[i * k + j]))
}

/// A PSD Gram form together with the subspace where it vanishes.
#[derive(Debug, Clone, Serialize)]
pub struct GramNullSpace<T: Real> {
    pub space: SaSubspace<T>,
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
    /// Smallest eigenvalue above the rank threshold, if any.
    pub min_positive_eigenvalue: Option<T>,
}

fn gram_null_space<T: Real>(
    shape: &AlgebraShape,
    g: &DMatrix<T>,
    embed: &DMatrix<T>,
    policy: &RankPolicy<T>,
) -> Result<GramNullSpace<T>> {
    let (ns, min, max) = linalg::psd_null_space(g, policy)?;
    let scale = T::one().max(max);
    if min < -T::lit(GRAM_NEG_TOL) * scale {
        return Err(Error::GramNotPsd {
            min_eigenvalue: min.to_f64_lossy(),
        });
    }
    let thr = policy.threshold(max);
    let sym = (g + g.transpose()) * T::lit(0.5);
    let min_positive = sym
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .filter(|&v| v > thr)
        .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))));
    let coords = embed * ns;
    Ok(GramNullSpace {
        space: SaSubspace::from_orthonormal(shape, coords),
        min_eigenvalue: min,
        max_eigenvalue: max,
        min_positive_eigenvalue: min_positive,
    })
}

/// Gram matrix of the Schwarz defect `q(x) = tr(φ(x∘x) - φ(x)∘φ(x))` on the
/// canonical self-adjoint basis.
pub fn schwarz_gram<T: Real>(phi: &SaMap<T>) -> DMatrix<T> {
    let shape = phi.shape();
    let d = shape.dim();
    let a = phi.matrix();
    let u = Element::<T>::unit(shape).sa_coords();
    let t = a.transpose() * u;
    let id = DMatrix::<T>::identity(d, d);
    weighted_jordan_gram(shape, &id, &t) - a.transpose() * a
}

/// `M_φ^sa` with the Gram spectrum that decided it.
pub fn definite_set_with_gram<T: Real>(phi: &SaMap<T>, policy: &RankPolicy<T>) -> Result<GramNullSpace<T>> {
    let shape = phi.shape();
    let d = shape.dim();
    let g = schwarz_gram(phi);
    gram_null_space(shape, &g, &DMatrix::identity(d, d), policy)
}

/// The definite set `{x : φ(x∘x) = φ(x)∘φ(x)}`.
pub fn definite_set<T: Real>(phi: &SaMap<T>, policy: &RankPolicy<T>) -> Result<SaSubspace<T>> {
    Ok(definite_set_with_gram(phi, policy)?.space)
}

/// Largest `V ⊆ M_φ` with `φ(V) ⊆ V`.
pub fn b_phi<T: Real>(phi: &SaMap<T>, m_phi: &SaSubspace<T>, policy: &RankPolicy<T>) -> Result<SaSubspace<T>> {
    let steps = phi.shape().dim() + 1;
    let mut v = m_phi.clone();
    for _ in 0..steps {
        let next = m_phi.intersect(&subspace_preimage(phi, &v, policy)?, policy)?;
        if next.dim() == v.dim() {
            return Ok(next);
        }
        v = next;
    }
    Err(Error::IterationOverflow { what: "B_phi", steps })
}

/// `⋂ φⁿ(B_φ)`, reached once the image chain stops losing dimension.
pub fn multiplicative_core<T: Real>(phi: &SaMap<T>, b: &SaSubspace<T>, policy: &RankPolicy<T>) -> Result<SaSubspace<T>> {
    let steps = phi.shape().dim() + 1;
    let mut w = b.clone();
    for _ in 0..steps {
        let next = w.image(phi, policy)?;
        if next.dim() == w.dim() {
            return Ok(next);
        }
        w = next;
    }
    Err(Error::IterationOverflow { what: "C_phi", steps })
}

/// Worst membership residual of `b_i ∘ b_j` in `s`, relative to `1 + ‖b_i ∘ b_j‖`.
pub fn jordan_closure_defect<T: Real>(s: &SaSubspace<T>) -> T {
    let k = s.dim();
    let table = jordan_table(s.shape(), s.coords());
    let mut worst = T::zero();
    for i in 0..k {
        for j in i..k {
            let v = &table[i * k + j];
            worst = worst.max(s.residual_coords(v) / (T::one() + v.norm()));
        }
    }
    worst
}

pub fn is_jordan_closed<T: Real>(s: &SaSubspace<T>, tol: T) -> bool {
    jordan_closure_defect(s) <= tol
}

/// Smallest Jordan-closed subspace containing `s`.
pub fn jordan_generated<T: Real>(s: &SaSubspace<T>, policy: &RankPolicy<T>) -> Result<SaSubspace<T>> {
    let shape = s.shape().clone();
    let steps = shape.dim() + 1;
    let mut cur = s.clone();
    for _ in 0..steps {
        let k = cur.dim();
        let table = jordan_table(&shape, cur.coords());
        let mut cols: Vec<DVector<T>> = cur.coords().column_iter().map(|c| c.into_owned()).collect();
        for i in 0..k {
            for j in i..k {
                cols.push(table[i * k + j].clone());
            }
        }
        if cols.is_empty() {
            return Ok(cur);
        }
        let next = SaSubspace::from_coord_columns(&shape, &DMatrix::from_columns(&cols), policy)?;
        if next.dim() == cur.dim() {
            return Ok(next);
        }
        cur = next;
    }
    Err(Error::IterationOverflow {
        what: "Jordan closure",
        steps,
    })
}

/// Largest ambient Jordan subalgebra inside `M∞ = range E`: the null space
/// in `M∞` of `q(x) = tr(E(x∘x) - x∘x)`, which is PSD there.
pub fn largest_jordan_subalgebra_with_gram<T: Real>(
    m_inf: &SaSubspace<T>,
    e: &SaMap<T>,
    policy: &RankPolicy<T>,
) -> Result<GramNullSpace<T>> {
    let shape = m_inf.shape();
    let u = Element::<T>::unit(shape).sa_coords();
    let w = e.matrix().transpose() * &u - u;
    let g = weighted_jordan_gram(shape, m_inf.coords(), &w);
    gram_null_space(shape, &g, m_inf.coords(), policy)
}

pub fn largest_jordan_subalgebra<T: Real>(
    m_inf: &SaSubspace<T>,
    e: &SaMap<T>,
    policy: &RankPolicy<T>,
) -> Result<SaSubspace<T>> {
    Ok(largest_jordan_subalgebra_with_gram(m_inf, e, policy)?.space)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoreReport<T: Real> {
    pub definite_set: SaSubspace<T>,
    pub schwarz_gram_min_eigenvalue: T,
    pub b_phi: SaSubspace<T>,
    pub core: SaSubspace<T>,
    pub m_inf_jordan_closed: bool,
    pub m_inf_jordan_defect: T,
    pub jordan_generated_tail: SaSubspace<T>,
    pub largest_jordan_in_tail: SaSubspace<T>,
    pub core_equals_tail: bool,
}

pub fn core_report<T: Real>(
    phi: &SaMap<T>,
    e: &SaMap<T>,
    m_inf: &SaSubspace<T>,
    tols: &Tolerances<T>,
) -> Result<CoreReport<T>> {
    let policy = tols.rank_policy();
    let ds = definite_set_with_gram(phi, &policy)?;
    let b = b_phi(phi, &ds.space, &policy)?;
    let core = multiplicative_core(phi, &b, &policy)?;
    let defect = jordan_closure_defect(m_inf);
    let generated = jordan_generated(m_inf, &policy)?;
    let largest = largest_jordan_subalgebra(m_inf, e, &policy)?;
    let core_equals_tail = core.same_as(m_inf, tols.membership);
    Ok(CoreReport {
        definite_set: ds.space,
        schwarz_gram_min_eigenvalue: ds.min_eigenvalue,
        b_phi: b,
        core,
        m_inf_jordan_closed: defect <= tols.membership,
        m_inf_jordan_defect: defect,
        jordan_generated_tail: generated,
        largest_jordan_in_tail: largest,
        core_equals_tail,
    })
}
