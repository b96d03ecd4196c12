//! Invariant states, faithfulness on subalgebras and norm convergence of
//! functionals under the dual dynamics.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{Element, NormKind, SaSubspace};
use crate::asymptotics::{matrix_spectrum, spectral_projector};
use crate::config::Tolerances;
use crate::corestruct::is_jordan_closed;
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::scalar::Real;
use crate::upmap::{SaFunctional, SaMap};

const UNIT_EIGEN_TOL: f64 = 1e-5;

/// Invariant state of maximal support: the spectral projection of `φ†` onto
/// eigenvalue 1, applied to `𝟏/n`.
pub fn invariant_state<T: Real>(phi: &SaMap<T>) -> Result<SaFunctional<T>> {
    let shape = phi.shape();
    let at = phi.matrix().transpose();
    let one = matrix_spectrum(&at)
        .into_iter()
        .find(|c| (c.value.re - T::one()).abs() <= T::lit(UNIT_EIGEN_TOL) && c.value.im == T::zero())
        .ok_or(Error::NoUnitEigenvalue)?;
    if one.geometric < one.algebraic {
        return Err(Error::PeripheralDefective {
            re: one.value.re.to_f64_lossy(),
            im: 0.0,
            algebraic: one.algebraic,
            geometric: one.geometric,
        });
    }
    let p1 = spectral_projector(&at, &[one])?;
    let n = T::from_usize_lossy(shape.ambient_size());
    let u = Element::<T>::unit(shape).sa_coords();
    let mut density = Element::from_sa_coords(shape, &(p1 * u / n));
    let tr = density.trace().re;
    if tr <= T::zero() {
        return Err(Error::NoUnitEigenvalue);
    }
    density = density.scale(T::one() / tr);
    Ok(SaFunctional { density })
}

/// Smallest eigenvalue of the density relative to its operator norm.
pub fn faithfulness_margin<T: Real>(state: &SaFunctional<T>) -> T {
    let scale = state.density.norm(NormKind::Operator);
    if scale <= T::zero() {
        return T::zero();
    }
    state.density.min_eigenvalue() / scale
}

/// True iff the maximal-support invariant density is positive definite.
pub fn exists_faithful_invariant_state<T: Real>(state: &SaFunctional<T>, tol: T) -> bool {
    faithfulness_margin(state) > tol
}

pub fn maximal_support<T: Real>(state: &SaFunctional<T>, tol: T) -> Element<T> {
    let cut = tol * state.density.norm(NormKind::Operator);
    state.density.support_projection(cut)
}

/// Is there an invariant state faithful on the Jordan-closed `n`?
///
/// With `P` the support of the maximal invariant density, this holds iff no
/// nonzero `x ∈ N` has `Px = 0`.
pub fn exists_invariant_state_faithful_on<T: Real>(
    state: &SaFunctional<T>,
    n: &SaSubspace<T>,
    tols: &Tolerances<T>,
) -> Result<bool> {
    if !is_jordan_closed(n, tols.membership) {
        return Err(Error::NotJordanClosed);
    }
    n.shape().ensure_same(state.density.shape())?;
    if n.dim() == 0 {
        return Ok(true);
    }
    let p = maximal_support(state, tols.rank);
    let cols: Vec<DVector<T>> = n
        .basis()
        .iter()
        .map(|b| {
            let px = p.product(b).expect("same shape");
            let mut v = Vec::new();
            for blk in px.blocks() {
                for z in blk.iter() {
                    v.push(z.re);
                    v.push(z.im);
                }
            }
            DVector::from_vec(v)
        })
        .collect();
    let m = DMatrix::from_columns(&cols);
    let kernel = linalg::null_space(&m, &RankPolicy::new(tols.rank))?;
    Ok(kernel.ncols() == 0)
}

/// Convergence of `a_n = ‖φ†ⁿ(R)‖₁`.
#[derive(Debug, Clone, Serialize)]
pub struct NormConvergence<T: Real> {
    pub density: Element<T>,
    /// `a_0, …, a_{n_max}`.
    pub sequence: Vec<T>,
    /// `‖E†(R)‖₁`.
    pub converged_to: T,
    pub vanishes: bool,
    /// First `n` with `|a_n - converged_to| ≤ tol`.
    pub n_converged: Option<usize>,
    /// Largest increase `a_{n+1} - a_n`.
    pub max_increase: T,
    /// `‖(φ†ⁿ - E†∘(α†)ⁿ)(R)‖₁` at `n_max`.
    pub remainder: T,
    pub remainder_decays: bool,
}

/// `(φⁿ)†R` against its limit on `M∞`, with `α = φ|M∞` in the basis of `m_inf`.
pub fn norm_convergence_report<T: Real>(
    phi: &SaMap<T>,
    e: &DMatrix<T>,
    m_inf: &SaSubspace<T>,
    r: &SaFunctional<T>,
    n_max: usize,
    tol: T,
) -> Result<NormConvergence<T>> {
    let shape = phi.shape();
    shape.ensure_same(r.density.shape())?;
    r.density.ensure_self_adjoint(tol)?;
    let at = phi.matrix().transpose();
    let v = m_inf.coords();
    let res_t = (v.transpose() * phi.matrix() * v).transpose();
    let et_v = e.transpose() * v;
    let trace_norm = |c: &DVector<T>| Element::from_sa_coords(shape, c).norm(NormKind::Trace);

    let r0 = r.density.sa_coords();
    let converged_to = trace_norm(&(e.transpose() * &r0));
    let mut cur = r0.clone();
    let mut tail = v.transpose() * &r0;
    let mut sequence = vec![trace_norm(&cur)];
    let mut max_increase = T::lit(f64::NEG_INFINITY);
    let mut remainder = trace_norm(&(&cur - &et_v * &tail));
    for _ in 0..n_max {
        cur = &at * cur;
        tail = &res_t * tail;
        let a = trace_norm(&cur);
        max_increase = max_increase.max(a - *sequence.last().expect("nonempty"));
        sequence.push(a);
        remainder = trace_norm(&(&cur - &et_v * &tail));
    }
    if n_max == 0 {
        max_increase = T::zero();
    }
    let last = *sequence.last().expect("nonempty");
    let gap = (last - converged_to).abs();
    if gap > tol {
        return Err(Error::NotConverged {
            gap: gap.to_f64_lossy(),
            n_max,
        });
    }
    let n_converged = sequence.iter().position(|&a| (a - converged_to).abs() <= tol);
    Ok(NormConvergence {
        density: r.density.clone(),
        sequence,
        converged_to,
        vanishes: converged_to <= tol,
        n_converged,
        max_increase,
        remainder,
        remainder_decays: remainder <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StateReport<T: Real> {
    pub invariant_state: SaFunctional<T>,
    pub maximal_support: Element<T>,
    pub faithfulness_margin: T,
    pub faithful_exists: bool,
    /// Some invariant state is faithful on the Jordan algebra generated by `M∞`.
    pub faithful_on_jordan_generated_tail: bool,
    /// Decay records for a basis of the orthogonal complement of `C_φ`.
    pub complement_decay: Vec<NormConvergence<T>>,
    pub complement_vanishes: bool,
}

pub fn state_report<T: Real>(
    phi: &SaMap<T>,
    e: &DMatrix<T>,
    m_inf: &SaSubspace<T>,
    core: &SaSubspace<T>,
    jordan_generated_tail: &SaSubspace<T>,
    tols: &Tolerances<T>,
) -> Result<StateReport<T>> {
    let state = invariant_state(phi)?;
    let margin = faithfulness_margin(&state);
    let support = maximal_support(&state, tols.rank);
    let on_generated = exists_invariant_state_faithful_on(&state, jordan_generated_tail, tols)?;
    let complement = core.orthogonal_complement(&tols.rank_policy())?;
    let mut records = Vec::with_capacity(complement.dim());
    for b in complement.basis() {
        let r = SaFunctional { density: b };
        records.push(norm_convergence_report(phi, e, m_inf, &r, tols.n_max, tols.conv)?);
    }
    let complement_vanishes = records.iter().all(|r| r.vanishes);
    Ok(StateReport {
        faithful_exists: margin > tols.rank,
        invariant_state: state,
        maximal_support: support,
        faithfulness_margin: margin,
        faithful_on_jordan_generated_tail: on_generated,
        complement_decay: records,
        complement_vanishes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::peripheral_idempotent_of;
    use crate::algebra::AlgebraShape;
    use crate::corestruct::jordan_generated;
    use crate::scalar::cre;

    fn tols() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn three_state() -> SaMap<f64> {
        let p = DMatrix::from_row_slice(3, 3, &[1. / 3., 1. / 3., 1. / 3., 0., 0., 1., 0., 1., 0.]);
        SaMap::new(&AlgebraShape::commutative(3).unwrap(), p).unwrap()
    }

    fn tail(phi: &SaMap<f64>) -> (DMatrix<f64>, SaSubspace<f64>) {
        let e = peripheral_idempotent_of(phi, 1e-8).unwrap().e;
        let m = SaSubspace::from_coord_columns(phi.shape(), &e, &RankPolicy::new(1e-9)).unwrap();
        (e, m)
    }

    #[test]
    fn three_state_invariant_state() {
        let phi = three_state();
        let st = invariant_state(&phi).unwrap();
        let want = Element::from_function(&[0.0, 0.5, 0.5]);
        assert!(st.density.max_abs_diff(&want) < 1e-12);
        assert!(!exists_faithful_invariant_state(&st, 1e-9));
    }

    #[test]
    fn identity_and_unitary_states_are_maximally_mixed() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let st = invariant_state(&SaMap::<f64>::identity(&s)).unwrap();
        assert!(st.density.max_abs_diff(&Element::unit(&s).scale(1.0 / 3.0)) < 1e-12);
        assert!(exists_faithful_invariant_state(&st, 1e-9));

        let s2 = AlgebraShape::full(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(2, 2, &[cre(h), cre(h), cre(h), cre(-h)]);
        let conj = SaMap::from_fn(&s2, |x| {
            Element::from_blocks(&s2, vec![&u * x.block(0) * u.adjoint()]).unwrap()
        });
        let st = invariant_state(&conj).unwrap();
        assert!(st.density.max_abs_diff(&Element::unit(&s2).scale(0.5)) < 1e-12);
    }

    #[test]
    fn faithful_on_subalgebras() {
        let phi = three_state();
        let (_, m) = tail(&phi);
        let st = invariant_state(&phi).unwrap();
        let gen = jordan_generated(&m, &RankPolicy::new(1e-9)).unwrap();
        assert!(!exists_invariant_state_faithful_on(&st, &gen, &tols()).unwrap());
        let one = SaSubspace::span(phi.shape(), &[Element::unit(phi.shape())], &RankPolicy::new(1e-9)).unwrap();
        assert!(exists_invariant_state_faithful_on(&st, &one, &tols()).unwrap());
        assert!(matches!(
            exists_invariant_state_faithful_on(&st, &m, &tols()),
            Err(Error::NotJordanClosed)
        ));
    }

    #[test]
    fn three_state_norm_convergence() {
        let phi = three_state();
        let (e, m) = tail(&phi);
        let r = SaFunctional { density: Element::from_function(&[1.0, -0.5, -0.5]) };
        let rep = norm_convergence_report(&phi, &e, &m, &r, 64, 1e-6).unwrap();
        assert!(rep.vanishes);
        assert!(rep.converged_to < 1e-12);
        let r = SaFunctional { density: Element::from_function(&[0.0, 1.0, -1.0]) };
        let rep = norm_convergence_report(&phi, &e, &m, &r, 64, 1e-6).unwrap();
        assert!((rep.converged_to - 2.0).abs() < 1e-12);
        assert!(!rep.vanishes);
        assert!(rep.remainder_decays);
        let st = invariant_state(&phi).unwrap();
        let rep = norm_convergence_report(&phi, &e, &m, &st, 16, 1e-6).unwrap();
        assert!(rep.sequence.iter().all(|a| (a - 1.0).abs() < 1e-12));
    }

    #[test]
    fn too_short_sequence_is_reported() {
        let phi = three_state();
        let (e, m) = tail(&phi);
        let r = SaFunctional { density: Element::from_function(&[1.0, -0.5, -0.5]) };
        assert!(matches!(
            norm_convergence_report(&phi, &e, &m, &r, 2, 1e-6),
            Err(Error::NotConverged { .. })
        ));
    }
}
