//! Independent reference computations used to cross-check the spectral
//! pipeline on random instances.

use nalgebra::{DMatrix, DVector};

use crate::algebra::SaSubspace;
use crate::linalg::{self, RankPolicy};
use crate::error::Result;
use crate::scalar::Real;

/// Result of the power-subsequence search.
#[derive(Debug, Clone)]
pub struct PowerLimit<T: Real> {
    pub e: DMatrix<T>,
    /// Power `n` whose `Aⁿ` was closest to idempotent.
    pub n: usize,
    /// `‖A²ⁿ - Aⁿ‖` at that `n`, before polishing.
    pub raw_defect: T,
    /// `‖X² - X‖` after polishing.
    pub defect: T,
}

/// Idempotent limit point of `{Aⁿ}` found by searching `n ≤ n_max` for the
/// power minimizing `‖A²ⁿ - Aⁿ‖`, then polishing with `X ← 3X² - 2X³`.
///
/// Works when the peripheral eigenvalues are roots of unity of order
/// dividing some `n ≤ n_max`; irrational rotations have no idempotent
/// power and are outside its reach.
pub fn power_limit<T: Real>(a: &DMatrix<T>, n_max: usize) -> PowerLimit<T> {
    let d = a.nrows();
    let mut p = DMatrix::<T>::identity(d, d);
    let mut best = (T::lit(f64::INFINITY), 0usize, p.clone());
    for n in 1..=n_max.max(1) {
        p = a * &p;
        let defect = linalg::op_norm(&(&p * &p - &p));
        if defect < best.0 {
            best = (defect, n, p.clone());
        }
        if defect < T::lit(1e-13) {
            break;
        }
    }
    let (raw_defect, n, mut x) = best;
    let mut defect = raw_defect;
    for _ in 0..100 {
        let x2 = &x * &x;
        let next = &x2 * T::lit(3.0) - &x2 * &x * T::lit(2.0);
        let nd = linalg::op_norm(&(&next * &next - &next));
        x = next;
        let done = nd < T::lit(1e-14) || !(nd < defect);
        defect = nd;
        if done {
            break;
        }
    }
    PowerLimit {
        e: x,
        n,
        raw_defect,
        defect,
    }
}

/// All 0/1 vectors of `C^d` lying in `s` (commutative shapes only).
pub fn projections_in<T: Real>(s: &SaSubspace<T>, tol: T) -> Vec<DVector<T>> {
    let d = s.shape().dim();
    debug_assert!(s.shape().is_commutative() && d < 24);
    (0u32..(1u32 << d))
        .map(|bits| DVector::from_fn(d, |i, _| if bits >> i & 1 == 1 { T::one() } else { T::zero() }))
        .filter(|v| s.contains_coords(v, tol))
        .collect()
}

/// Span of the projections in `s`, by exhaustive enumeration.
pub fn projection_span<T: Real>(s: &SaSubspace<T>, tol: T, policy: &RankPolicy<T>) -> Result<SaSubspace<T>> {
    let ps = projections_in(s, tol);
    if ps.is_empty() {
        return Ok(SaSubspace::zero(s.shape()));
    }
    SaSubspace::from_coord_columns(s.shape(), &DMatrix::from_columns(&ps), policy)
}
