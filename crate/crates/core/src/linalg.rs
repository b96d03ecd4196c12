//! Dense real linear algebra on self-adjoint coordinates: ranks, null spaces,
//! ranges and oblique projectors.

use nalgebra::{DMatrix, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Relative rank threshold with an absolute floor.
#[derive(Debug, Clone, Copy)]
pub struct RankPolicy<T> {
    pub rel: T,
    pub floor: T,
}

impl<T: Real> RankPolicy<T> {
    pub fn new(rel: T) -> Self {
        Self {
            rel,
            floor: T::lit(1e-12),
        }
    }

    pub fn threshold(&self, largest: T) -> T {
        (self.rel * largest).max(self.floor)
    }

    /// Fails when any value sits inside the decade band around `threshold`.
    pub fn check_unambiguous(&self, values: &[T], threshold: T) -> Result<()> {
        let lo = threshold * T::lit(0.1);
        let hi = threshold * T::lit(10.0);
        for &v in values {
            if v > lo && v < hi {
                return Err(Error::RankTolAmbiguous {
                    value: v.to_f64_lossy(),
                    threshold: threshold.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

/// Singular value decomposition with descending singular values and a full
/// right factor (`v` is `cols x cols`).
pub(crate) struct SortedSvd<T: Real> {
    pub u: DMatrix<T>,
    pub sigma: Vec<T>,
    pub v: DMatrix<T>,
}

pub(crate) fn svd_sorted<T: Real>(m: &DMatrix<T>) -> SortedSvd<T> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return SortedSvd {
            u: DMatrix::zeros(rows, 0),
            sigma: Vec::new(),
            v: DMatrix::zeros(0, 0),
        };
    }
    let padded_rows = rows.max(cols);
    let mut work = DMatrix::<T>::zeros(padded_rows, cols);
    work.view_mut((0, 0), (rows, cols)).copy_from(m);
    let (u_full, s, v_full) = jacobi_svd(work);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    let k = order.len();
    let mut u = DMatrix::<T>::zeros(rows, k);
    let mut v = DMatrix::<T>::zeros(cols, k);
    let mut sigma = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(s[src]);
        u.set_column(dst, &u_full.column(src).rows(0, rows));
        v.set_column(dst, &v_full.column(src));
    }
    SortedSvd { u, sigma, v }
}

const JACOBI_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD of a matrix with `rows >= cols`.
///
/// nalgebra's bidiagonal SVD returns inaccurate factors on some
/// rank-deficient inputs, which every subspace decision here depends on.
fn jacobi_svd<T: Real>(mut a: DMatrix<T>) -> (DMatrix<T>, Vec<T>, DMatrix<T>) {
    let n = a.ncols();
    debug_assert!(a.nrows() >= n);
    let mut v = DMatrix::<T>::identity(n, n);
    let eps = T::default_epsilon();
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for m in [&mut a, &mut v] {
                    for r in 0..m.nrows() {
                        let x = m[(r, p)];
                        let y = m[(r, q)];
                        m[(r, p)] = c * x - s * y;
                        m[(r, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma = Vec::with_capacity(n);
    for j in 0..n {
        let s = a.column(j).norm();
        sigma.push(s);
        if s > T::zero() {
            let col = a.column(j) / s;
            a.set_column(j, &col);
        }
    }
    (a, sigma, v)
}

const SCHUR_SWEEPS_PER_DIM: usize = 400;
const HQR_SWEEPS: usize = 60;

/// Complex eigenvalues of a real square matrix.
///
/// nalgebra's Schur iteration has no exceptional shifts and can cycle forever
/// on permutation-like inputs. It gets a bounded attempt; on failure the
/// Hessenberg form goes through [`hqr`].
pub fn eigenvalues<T: Real>(a: &DMatrix<T>) -> Vec<Cx<T>> {
    let d = a.nrows();
    if d == 0 {
        return Vec::new();
    }
    if let Some(s) = Schur::try_new(a.clone(), T::default_epsilon(), SCHUR_SWEEPS_PER_DIM * d) {
        return s.complex_eigenvalues().iter().copied().collect();
    }
    hqr(a.clone().hessenberg().h())
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only,
/// with ad hoc shifts every ten stalled sweeps. A block that still has not
/// split after `HQR_SWEEPS` sweeps is reported through its diagonal.
fn hqr<T: Real>(mut h: DMatrix<T>) -> Vec<Cx<T>> {
    let n = h.nrows();
    let zero = T::zero();
    let eps = T::default_epsilon();
    let mut out = vec![Cx::new(zero, zero); n];
    let mut anorm = zero;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[(i, j)].abs();
        }
    }
    let sign = |a: T, b: T| if b >= T::zero() { a.abs() } else { -a.abs() };
    let mut nn = n as isize - 1;
    let mut t = zero;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let u = nn as usize;
            let mut l = u;
            while l >= 1 {
                let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
                if s == zero {
                    s = anorm;
                }
                if h[(l, l - 1)].abs() <= eps * s {
                    h[(l, l - 1)] = zero;
                    break;
                }
                l -= 1;
            }
            let mut x = h[(u, u)];
            if l == u {
                out[u] = Cx::new(x + t, zero);
                nn -= 1;
                break;
            }
            let mut y = h[(u - 1, u - 1)];
            let mut w = h[(u, u - 1)] * h[(u - 1, u)];
            if l == u - 1 {
                let p = (y - x) * T::lit(0.5);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= zero {
                    let z = p + sign(z, p);
                    let lo = if z != zero { x - w / z } else { x + z };
                    out[u - 1] = Cx::new(x + z, zero);
                    out[u] = Cx::new(lo, zero);
                } else {
                    out[u - 1] = Cx::new(x + p, -z);
                    out[u] = Cx::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == HQR_SWEEPS {
                for i in l..=u {
                    out[i] = Cx::new(h[(i, i)] + t, zero);
                }
                nn = l as isize - 1;
                break;
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=u {
                    h[(i, i)] -= x;
                }
                let s = h[(u, u - 1)].abs() + h[(u - 1, u - 2)].abs();
                x = s * T::lit(0.75);
                y = x;
                w = s * s * T::lit(-0.4375);
            }
            its += 1;
            let (mut p, mut q, mut r): (T, T, T);
            let mut m = u - 2;
            loop {
                let z = h[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - rr - ss;
                r = h[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let a = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let b = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if a <= eps * b {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=u {
                h[(i, i - 2)] = zero;
                if i != m + 2 {
                    h[(i, i - 3)] = zero;
                }
            }
            for k in m..u {
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if k != u - 1 { h[(k + 2, k - 1)] } else { zero };
                    x = p.abs() + q.abs() + r.abs();
                    if x != zero {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s == zero {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                } else {
                    h[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=u {
                    let mut pj = h[(k, j)] + q * h[(k + 1, j)];
                    if k != u - 1 {
                        pj += r * h[(k + 2, j)];
                        h[(k + 2, j)] -= pj * z;
                    }
                    h[(k + 1, j)] -= pj * y;
                    h[(k, j)] -= pj * x;
                }
                for i in l..=u.min(k + 3) {
                    let mut pi = x * h[(i, k)] + y * h[(i, k + 1)];
                    if k != u - 1 {
                        pi += z * h[(i, k + 2)];
                        h[(i, k + 2)] -= pi * r;
                    }
                    h[(i, k + 1)] -= pi * q;
                    h[(i, k)] -= pi;
                }
            }
            if (l as isize) >= nn - 1 {
                break;
            }
        }
    }
    out
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() < m.ncols() {
        return svd_sorted(&m.transpose()).sigma;
    }
    svd_sorted(m).sigma
}

/// Singular values of a complex matrix, via its real embedding
/// `[[Re, -Im], [Im, Re]]` whose singular values come in equal pairs.
pub fn complex_singular_values<T: Real>(m: &DMatrix<Cx<T>>) -> Vec<T> {
    let (r, c) = m.shape();
    let emb = DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    singular_values(&emb).into_iter().step_by(2).collect()
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space<T: Real>(m: &DMatrix<T>, policy: &RankPolicy<T>) -> Result<DMatrix<T>> {
    let cols = m.ncols();
    if cols == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let svd = svd_sorted(m);
    let largest = svd.sigma.first().copied().unwrap_or_else(T::zero);
    let thr = policy.threshold(largest);
    policy.check_unambiguous(&svd.sigma, thr)?;
    let rank = svd.sigma.iter().filter(|&&s| s > thr).count();
    Ok(svd.v.columns(rank, cols - rank).into_owned())
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_space<T: Real>(m: &DMatrix<T>, policy: &RankPolicy<T>) -> Result<DMatrix<T>> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return Ok(DMatrix::zeros(rows, 0));
    }
    let svd = svd_sorted(m);
    let largest = svd.sigma.first().copied().unwrap_or_else(T::zero);
    let thr = policy.threshold(largest);
    policy.check_unambiguous(&svd.sigma, thr)?;
    let rank = svd.sigma.iter().filter(|&&s| s > thr).count();
    Ok(svd.u.columns(0, rank).into_owned())
}

/// Null space of a symmetric positive-semidefinite matrix, decided on its
/// eigenvalues. Also returns the smallest eigenvalue for sanity checks.
pub fn psd_null_space<T: Real>(
    g: &DMatrix<T>,
    policy: &RankPolicy<T>,
) -> Result<(DMatrix<T>, T, T)> {
    let n = g.nrows();
    if n == 0 {
        return Ok((DMatrix::zeros(0, 0), T::zero(), T::zero()));
    }
    let sym = (g + g.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(sym);
    let vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
    let largest = vals.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let smallest = vals.iter().fold(T::lit(f64::INFINITY), |m, &v| m.min(v));
    let thr = policy.threshold(largest);
    let positive: Vec<T> = vals.iter().map(|v| v.max(T::zero())).collect();
    policy.check_unambiguous(&positive, thr)?;
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] <= thr).collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        out.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((out, smallest, largest))
}

/// The `k` right-singular vectors of `m` for its smallest singular values,
/// together with the `(k)`-th smallest and `(k+1)`-th smallest values.
pub(crate) fn smallest_right_singular<T: Real>(
    m: &DMatrix<T>,
    k: usize,
) -> (DMatrix<T>, T, Option<T>) {
    let cols = m.ncols();
    let svd = svd_sorted(m);
    let start = cols - k;
    let within = if k == 0 { T::zero() } else { svd.sigma[start] };
    let outside = if start == 0 { None } else { Some(svd.sigma[start - 1]) };
    (svd.v.columns(start, k).into_owned(), within, outside)
}

/// Oblique projector with range `span(right)` and kernel `span(left)^⊥`.
pub fn oblique_projector<T: Real>(right: &DMatrix<T>, left: &DMatrix<T>) -> Option<DMatrix<T>> {
    let coupling = left.transpose() * right;
    let inv = coupling.try_inverse()?;
    Some(right * inv * left.transpose())
}

/// Largest singular value.
pub fn op_norm<T: Real>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    svd_sorted(m).sigma.first().copied().unwrap_or_else(T::zero)
}

/// Flips column signs so the first significant entry of each column is positive.
pub fn sign_normalize_columns<T: Real>(m: &mut DMatrix<T>) {
    for mut col in m.column_iter_mut() {
        let scale = col.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        if scale == T::zero() {
            continue;
        }
        let cut = scale * T::lit(1e-8);
        if let Some(first) = col.iter().find(|v| v.abs() > cut).copied() {
            if first < T::zero() {
                col.neg_mut();
            }
        }
    }
}

pub(crate) fn vstack<T: Real>(parts: &[&DMatrix<T>], cols: usize) -> DMatrix<T> {
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        out.view_mut((at, 0), (p.nrows(), cols)).copy_from(*p);
        at += p.nrows();
    }
    out
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, v| a.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// `tr Aᵏ = Σ λᵏ` for `k = 1..=n`.
    fn power_sums_match(a: &DMatrix<f64>, ev: &[Cx<f64>]) -> f64 {
        let n = a.nrows();
        let mut worst = 0f64;
        let mut ak = DMatrix::identity(n, n);
        for k in 1..=n as i32 {
            ak = &ak * a;
            let s: Cx<f64> = ev.iter().map(|l| l.powi(k)).sum();
            worst = worst.max((s - Cx::new(ak.trace(), 0.0)).norm());
        }
        worst
    }

    #[test]
    fn hqr_on_cycles_and_random_matrices() {
        for n in 2..=7 {
            let cyc = DMatrix::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 });
            let ev: Vec<Cx<f64>> = hqr(cyc.clone().hessenberg().h());
            assert!(ev.iter().all(|l| (l.norm() - 1.0).abs() < 1e-9), "{ev:?}");
            assert!(power_sums_match(&cyc, &ev) < 1e-9);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(1..=9usize);
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0f64));
            let ev = hqr(a.clone().hessenberg().h());
            assert!(power_sums_match(&a, &ev) < 1e-8);
        }
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        let ns = null_space(&m, &RankPolicy::new(1e-9)).unwrap();
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-12);
        let gram = ns.transpose() * &ns;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn ambiguous_rank_is_reported() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2e-9]);
        let err = null_space(&m, &RankPolicy::new(1e-9)).unwrap_err();
        assert_eq!(err.code(), "RANK_TOL_AMBIGUOUS");
    }

    #[test]
    fn oblique_projector_is_idempotent() {
        let r = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let l = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let p = oblique_projector(&r, &l).unwrap();
        assert!((&p * &p - &p).norm() < 1e-14);
        assert!((&p * &r - &r).norm() < 1e-14);
    }

    #[test]
    fn range_of_wide_matrix() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = range_space(&m, &RankPolicy::new(1e-9)).unwrap();
        assert_eq!(r.ncols(), 1);
    }
}
