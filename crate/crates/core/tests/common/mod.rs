#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex;
use tailcore::linalg::RankPolicy;
use tailcore::upmap::KrausFamily;
use tailcore::{build_map, AlgebraShape, Element, MapSpec, UPMap};

pub type C = Complex<f64>;

pub fn pol() -> RankPolicy<f64> {
    RankPolicy::new(1e-9)
}

pub fn m2() -> AlgebraShape {
    AlgebraShape::full(2).unwrap()
}

pub fn cm(rows: &[&[(f64, f64)]]) -> DMatrix<C> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| C::new(rows[i][j].0, rows[i][j].1))
}

pub fn sigma_x() -> Element<f64> {
    Element::from_blocks(&m2(), vec![cm(&[&[(0., 0.), (1., 0.)], &[(1., 0.), (0., 0.)]])]).unwrap()
}

pub fn sigma_z() -> Element<f64> {
    Element::diagonal(&m2(), &[1.0, -1.0]).unwrap()
}

pub fn stochastic(rows: &[&[f64]]) -> UPMap<f64> {
    let d = rows.len();
    let p = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
    build_map(&AlgebraShape::commutative(d).unwrap(), MapSpec::Stochastic(p)).unwrap()
}

pub fn identity_map(shape: &AlgebraShape) -> UPMap<f64> {
    let fams = shape
        .block_dims()
        .iter()
        .enumerate()
        .map(|(b, &n)| KrausFamily {
            from: b,
            to: b,
            ops: vec![DMatrix::identity(n, n)],
        })
        .collect();
    build_map(shape, MapSpec::Kraus(fams)).unwrap()
}

/// Off-diagonals of `M₂` scaled by `λ`, written as `(1-p)·x + p·ZxZ` with `1 - 2p = λ`.
pub fn lambda_map(lambda: f64) -> UPMap<f64> {
    let p = (1.0 - lambda) / 2.0;
    let a = DMatrix::<C>::identity(2, 2).scale((1.0 - p).sqrt());
    let z = cm(&[&[(1., 0.), (0., 0.)], &[(0., 0.), (-1., 0.)]]).scale(p.sqrt());
    build_map(&m2(), MapSpec::Kraus(vec![KrausFamily { from: 0, to: 0, ops: vec![a, z] }])).unwrap()
}

pub fn example() -> UPMap<f64> {
    tailcore::golden::example_map()
}
