//! Seeded random elements and random unital positive maps for test suites.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraShape, Element};
use crate::scalar::{cre, cx, Cx, Real};
use crate::upmap::{KrausFamily, MapSpec};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let g: f64 = rng.sample(StandardNormal);
    T::lit(g)
}

/// Complex Ginibre matrix.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Cx<T>> {
    DMatrix::from_fn(rows, cols, |_, _| cx(gaussian(rng), gaussian(rng)))
}

pub fn random_sa<T: Real, R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element<T> {
    let blocks = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = ginibre::<T, R>(n, n, rng);
            (&g + g.adjoint()) * cre(T::lit(0.5))
        })
        .collect();
    Element::from_blocks(shape, blocks).expect("shape-consistent")
}

/// `G G†` for Ginibre `G` in every block, scaled to operator norm about 1.
pub fn random_psd<T: Real, R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element<T> {
    let blocks: Vec<DMatrix<Cx<T>>> = shape
        .block_dims()
        .iter()
        .map(|&n| {
            let g = ginibre::<T, R>(n, n, rng);
            &g * g.adjoint()
        })
        .collect();
    let x = Element::from_blocks(shape, blocks).expect("shape-consistent");
    let s = x.norm(crate::algebra::NormKind::Operator);
    if s > T::zero() {
        x.scale(T::one() / s)
    } else {
        x
    }
}

/// Random self-adjoint density with trace norm about 1.
pub fn random_density<T: Real, R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element<T> {
    let x = random_sa::<T, R>(shape, rng);
    let n = x.norm(crate::algebra::NormKind::Trace);
    x.scale(T::one() / n.max(T::lit(1e-300)))
}

/// Element of `M∞`-style subspaces: random combination of the given basis.
pub fn random_in_span<T: Real, R: Rng + ?Sized>(basis: &[Element<T>], shape: &AlgebraShape, rng: &mut R) -> Element<T> {
    let mut acc = Element::zeros(shape);
    for b in basis {
        acc = &acc + &b.scale(gaussian(rng));
    }
    acc
}

/// Sparse row-stochastic matrix: each entry is kept with probability
/// `density` and rows are normalized, so zero patterns (transient states,
/// periodic classes, several recurrent classes) occur regularly.
pub fn random_stochastic<T: Real, R: Rng + ?Sized>(d: usize, density: f64, rng: &mut R) -> DMatrix<T> {
    let mut p = DMatrix::<T>::zeros(d, d);
    for r in 0..d {
        loop {
            let mut any = false;
            for c in 0..d {
                if rng.random::<f64>() < density {
                    p[(r, c)] = T::lit(rng.random::<f64>() + 0.05);
                    any = true;
                } else {
                    p[(r, c)] = T::zero();
                }
            }
            if any {
                break;
            }
        }
        let s = p.row(r).iter().fold(T::zero(), |a, &v| a + v);
        for c in 0..d {
            p[(r, c)] /= s;
        }
    }
    p
}

/// Row-stochastic matrix with planted structure: a few closed classes, some
/// of them periodic, plus transient states that leak into the classes.
pub fn random_structured_stochastic<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<T> {
    let mut states: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        states.swap(i, rng.random_range(0..=i));
    }
    let transient = rng.random_range(0..=d / 2);
    let (trans, rec) = states.split_at(transient);
    let mut p = DMatrix::<T>::zeros(d, d);
    let mut rest = rec;
    while !rest.is_empty() {
        let size = rng.random_range(1..=rest.len().min(4));
        let (class, tail) = rest.split_at(size);
        rest = tail;
        let period = if size > 1 && rng.random::<f64>() < 0.5 { rng.random_range(2..=size) } else { 1 };
        for (i, &r) in class.iter().enumerate() {
            let targets: Vec<usize> = class
                .iter()
                .enumerate()
                .filter(|(j, _)| j % period == (i + 1) % period)
                .map(|(_, &c)| c)
                .collect();
            for &c in &targets {
                p[(r, c)] = T::lit(rng.random::<f64>() + 0.1);
            }
        }
    }
    for &r in trans {
        for c in 0..d {
            if rng.random::<f64>() < 0.5 {
                p[(r, c)] = T::lit(rng.random::<f64>() + 0.1);
            }
        }
        // guarantee leakage out of the transient set
        let c = rec[rng.random_range(0..rec.len())];
        p[(r, c)] += T::lit(0.3);
    }
    for r in 0..d {
        let s = p.row(r).iter().fold(T::zero(), |a, &v| a + v);
        for c in 0..d {
            p[(r, c)] /= s;
        }
    }
    p
}

/// Haar-like unitary whose eigenvalues are `m`-th roots of unity.
pub fn random_root_unitary<T: Real, R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> DMatrix<Cx<T>> {
    let q = ginibre::<T, R>(n, n, rng).qr().q();
    let tau = T::two_pi() / T::from_usize_lossy(m.max(1));
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let k = T::from_usize_lossy(rng.random_range(0..m.max(1)));
            cx((tau * k).cos(), (tau * k).sin())
        } else {
            cre(T::zero())
        }
    });
    &q * phases * q.adjoint()
}

/// Unital CP map with planted recurrent blocks. Each recurrent block is fed
/// by a single source block through a root-of-unity unitary conjugation or a
/// dephasing channel; the remaining blocks receive Gaussian Kraus noise from
/// everywhere.
pub fn random_structured_kraus<T: Real, R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Vec<KrausFamily<T>> {
    let dims = shape.block_dims().to_vec();
    let b = dims.len();
    let recurrent: Vec<bool> = (0..b).map(|_| rng.random::<f64>() < 0.6).collect();
    let recurrent = if recurrent.iter().any(|&r| r) {
        recurrent
    } else {
        (0..b).map(|t| t == 0).collect()
    };
    // feed each recurrent block from a recurrent block of the same size,
    // sometimes swapping a pair
    let mut source: Vec<usize> = (0..b).collect();
    for t in 0..b {
        for u in t + 1..b {
            if recurrent[t] && recurrent[u] && dims[t] == dims[u] && source[t] == t && source[u] == u && rng.random::<f64>() < 0.5 {
                source.swap(t, u);
            }
        }
    }
    let mut families = Vec::new();
    let mut noisy = Vec::new();
    for t in 0..b {
        let n = dims[t];
        if recurrent[t] {
            let m = rng.random_range(1..=4);
            let u = random_root_unitary::<T, R>(n, m, rng);
            let ops = if n > 1 && rng.random::<f64>() < 0.4 {
                let w = ginibre::<T, R>(n, n, rng).qr().q();
                (0..n)
                    .map(|i| {
                        let wi = w.column(i).into_owned();
                        &wi * wi.adjoint() * &u
                    })
                    .collect()
            } else {
                vec![u]
            };
            families.push(KrausFamily { from: source[t], to: t, ops });
        } else {
            noisy.push(t);
        }
    }
    loop {
        let mut extra = Vec::new();
        for &t in &noisy {
            for s in 0..b {
                if rng.random::<f64>() < 0.6 {
                    let k = rng.random_range(1..=2);
                    let ops = (0..k).map(|_| ginibre::<T, R>(dims[t], dims[s], rng)).collect();
                    extra.push(KrausFamily { from: s, to: t, ops });
                }
            }
        }
        let mut all = families.clone();
        all.extend(extra);
        if let Some(f) = normalize_kraus(shape, all) {
            return f;
        }
    }
}

fn inverse_sqrt_psd<T: Real>(s: DMatrix<Cx<T>>) -> Option<DMatrix<Cx<T>>> {
    let eig = SymmetricEigen::new(s);
    let n = eig.eigenvalues.len();
    let mut diag = DMatrix::<Cx<T>>::zeros(n, n);
    for i in 0..n {
        let v = eig.eigenvalues[i];
        if v <= T::lit(1e-10) {
            return None;
        }
        diag[(i, i)] = cre(T::one() / v.sqrt());
    }
    Some(&eig.eigenvectors * diag * eig.eigenvectors.adjoint())
}

/// Normalizes Gaussian Kraus operators `A_k` to `B_k = S^{-1/2} A_k` with
/// `S = Σ A_k A_k†` per target block, which makes the map unital.
pub fn normalize_kraus<T: Real>(shape: &AlgebraShape, mut families: Vec<KrausFamily<T>>) -> Option<Vec<KrausFamily<T>>> {
    for (t, &n) in shape.block_dims().iter().enumerate() {
        let mut s = DMatrix::<Cx<T>>::zeros(n, n);
        for f in families.iter().filter(|f| f.to == t) {
            for a in &f.ops {
                s += a * a.adjoint();
            }
        }
        let w = inverse_sqrt_psd(s)?;
        for f in families.iter_mut().filter(|f| f.to == t) {
            for a in f.ops.iter_mut() {
                *a = &w * &*a;
            }
        }
    }
    Some(families)
}

/// Random unital CP map: each `(source, target)` block pair is present with
/// probability `pair_prob` and carries `1..=max_ops` Gaussian Kraus operators.
pub fn random_kraus<T: Real, R: Rng + ?Sized>(
    shape: &AlgebraShape,
    pair_prob: f64,
    min_ops: usize,
    max_ops: usize,
    rng: &mut R,
) -> Vec<KrausFamily<T>> {
    let dims = shape.block_dims().to_vec();
    let b = dims.len();
    loop {
        let mut families = Vec::new();
        for t in 0..b {
            let mut sources: Vec<usize> = (0..b).filter(|_| rng.random::<f64>() < pair_prob).collect();
            if sources.is_empty() {
                sources.push(rng.random_range(0..b));
            }
            for s in sources {
                let k = rng.random_range(min_ops..=max_ops);
                let ops = (0..k).map(|_| ginibre::<T, R>(dims[t], dims[s], rng)).collect();
                families.push(KrausFamily { from: s, to: t, ops });
            }
        }
        if let Some(f) = normalize_kraus(shape, families) {
            return f;
        }
    }
}

/// Shapes with `Σ n_i ≤ max_ambient`, optionally requiring a non-trivial block.
pub fn random_shape<R: Rng + ?Sized>(max_ambient: usize, rng: &mut R) -> AlgebraShape {
    loop {
        let mut dims = Vec::new();
        let mut left = max_ambient;
        while left > 0 {
            let n = rng.random_range(1..=left.min(3));
            dims.push(n);
            left -= n;
            if rng.random::<f64>() < 0.35 {
                break;
            }
        }
        if dims.iter().any(|&n| n > 1) {
            return AlgebraShape::new(dims).expect("positive blocks");
        }
    }
}

/// Convex combination of a CP map and a CP map composed with the transpose.
pub fn random_transpose_mix<T: Real, R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> MapSpec<T> {
    let w: f64 = rng.random_range(0.2..0.8);
    let a = random_kraus::<T, R>(shape, 0.7, 2, 3, rng);
    let b = random_kraus::<T, R>(shape, 0.7, 2, 3, rng);
    MapSpec::Mix(vec![
        (T::lit(w), MapSpec::Kraus(a)),
        (T::lit(1.0 - w), MapSpec::KrausTranspose(b)),
    ])
}
