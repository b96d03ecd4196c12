mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tailcore::asymptotics::{
    asymptotic_profile, check_decay_condition, decay_power, intrinsic_jordan, peripheral_idempotent, superop_spectrum,
    SpectralCluster,
};
use tailcore::oracle::power_limit;
use tailcore::{AlgebraShape, Element, SaMap, SaSubspace, Tolerances, UPMap};

fn profile(phi: &UPMap<f64>) -> tailcore::AsymptoticProfile64 {
    asymptotic_profile(phi, &Tolerances::default(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap()
}

fn near(c: &SpectralCluster<f64>, re: f64) -> bool {
    (c.value - Complex::new(re, 0.0)).norm() < 1e-9
}

/// Characteristic polynomial coefficients by Faddeev–LeVerrier, leading 1.
fn charpoly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * c[k - 1];
        c.push(-(a * &m).trace() / k as f64);
    }
    c
}

#[test]
fn spectrum_of_the_three_state_map() {
    let phi = example();
    // λ³ - λ²/3 - λ + 1/3 = (λ - 1)(λ + 1)(λ - 1/3)
    let c = charpoly(phi.matrix());
    let want = [1.0, -1.0 / 3.0, -1.0, 1.0 / 3.0];
    for (a, b) in c.iter().zip(want) {
        assert!((a - b).abs() < 1e-14);
    }
    let sp = superop_spectrum(&phi);
    assert_eq!(sp.len(), 3);
    for v in [1.0, -1.0, 1.0 / 3.0] {
        let cl = sp.iter().find(|c| near(c, v)).expect("eigenvalue present");
        assert_eq!((cl.algebraic, cl.geometric), (1, 1));
    }
}

#[test]
fn spectrum_of_identity_and_lambda_maps() {
    let sp = superop_spectrum(&identity_map(&AlgebraShape::commutative(2).unwrap()));
    assert_eq!(sp.len(), 1);
    assert!(near(&sp[0], 1.0) && sp[0].algebraic == 2);

    let sp = superop_spectrum(&lambda_map(0.5));
    assert_eq!(sp.len(), 2);
    assert!(sp.iter().any(|c| near(c, 1.0) && c.algebraic == 2));
    assert!(sp.iter().any(|c| near(c, 0.5) && c.algebraic == 2));
}

#[test]
fn idempotent_limits() {
    let e = peripheral_idempotent(&example(), 1e-8).unwrap().e;
    let want = DMatrix::from_row_slice(3, 3, &[0., 0.5, 0.5, 0., 1., 0., 0., 0., 1.]);
    assert!((e - want).amax() < 1e-9);

    let s = AlgebraShape::new(vec![2, 1]).unwrap();
    let e = peripheral_idempotent(&identity_map(&s), 1e-8).unwrap().e;
    assert!((e - DMatrix::identity(5, 5)).amax() < 1e-12);

    let e = peripheral_idempotent(&lambda_map(0.5), 1e-8).unwrap().e;
    let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0., 0., 1.0]));
    assert!((e - want).amax() < 1e-9);
}

#[test]
fn tail_systems() {
    let phi = example();
    let p = profile(&phi);
    let want = SaSubspace::span(
        phi.shape(),
        &[Element::from_function(&[0.5, 1.0, 0.0]), Element::from_function(&[0.5, 0.0, 1.0])],
        &pol(),
    )
    .unwrap();
    assert_eq!(p.m_inf.dim(), 2);
    assert!(p.m_inf.same_as(&want, 1e-9));

    let p = profile(&lambda_map(0.5));
    let diag = SaSubspace::span(
        &m2(),
        &[Element::diagonal(&m2(), &[1., 0.]).unwrap(), Element::diagonal(&m2(), &[0., 1.]).unwrap()],
        &pol(),
    )
    .unwrap();
    assert!(p.m_inf.same_as(&diag, 1e-9));

    let s = AlgebraShape::new(vec![2, 1]).unwrap();
    assert_eq!(profile(&identity_map(&s)).m_inf.dim(), 5);
}

#[test]
fn restricted_maps() {
    let p = profile(&example());
    let r = &p.restricted.matrix;
    assert_eq!(r.nrows(), 2);
    assert!((r * r - DMatrix::identity(2, 2)).amax() < 1e-9);
    assert_eq!(p.restricted.diagnostics.order, Some(2));

    let p = profile(&identity_map(&AlgebraShape::full(2).unwrap()));
    assert!((&p.restricted.matrix - DMatrix::identity(4, 4)).amax() < 1e-9);
    assert_eq!(p.restricted.diagnostics.order, Some(1));

    let cycle = stochastic(&[&[0., 1., 0.], &[0., 0., 1.], &[1., 0., 0.]]);
    let p = profile(&cycle);
    let r = &p.restricted.matrix;
    assert!((r * r * r - DMatrix::identity(3, 3)).amax() < 1e-9);
    assert!((r - DMatrix::identity(3, 3)).amax() > 0.5);
    assert_eq!(p.restricted.diagnostics.order, Some(3));
    assert!(p.restricted.diagnostics.preserves_cone);
}

#[test]
fn intrinsic_products() {
    let phi = example();
    let p = profile(&phi);
    let e = p.e_map(phi.shape());
    let xa = Element::from_function(&[0.5, 1.0, 0.0]);
    let xx = intrinsic_jordan(&e, &xa, &xa, 1e-9).unwrap();
    assert!(xx.max_abs_diff(&xa) < 1e-9);
    let amb = xa.square();
    assert!(amb.max_abs_diff(&Element::from_function(&[0.25, 1.0, 0.0])) < 1e-15);
    assert!(!p.m_inf.contains(&amb, 1e-6).unwrap());
    let u = Element::unit(phi.shape());
    let xb = Element::from_function(&[0.5, 0.0, 1.0]);
    assert!(intrinsic_jordan(&e, &xb, &u, 1e-9).unwrap().max_abs_diff(&xb) < 1e-9);
    let outside = Element::from_function(&[1.0, 0.0, 0.0]);
    assert_eq!(intrinsic_jordan(&e, &outside, &u, 1e-9).unwrap_err().code(), "NOT_IN_TAIL");

    let s = m2();
    let id = SaMap::<f64>::identity(&s);
    let x = &sigma_x() + &sigma_z().scale(0.4);
    let y = sigma_z().scale(-2.0);
    let got = intrinsic_jordan(&id, &x, &y, 1e-9).unwrap();
    assert!(got.max_abs_diff(&x.jordan_product(&y).unwrap()) < 1e-15);
}

#[test]
fn decay_condition_examples() {
    let phi = example();
    let p = profile(&phi);
    let e = p.e_map(phi.shape());
    let et_one = e.adjoint().apply(&Element::unit(phi.shape())).unwrap();
    assert!(et_one.max_abs_diff(&Element::from_function(&[0.0, 1.5, 1.5])) < 1e-9);
    assert!(!check_decay_condition(&e, 1e-9));
    assert!(!p.decay_condition);

    assert!(profile(&identity_map(&m2())).decay_condition);
    let p = profile(&lambda_map(0.5));
    let et_one = p.e_map(&m2()).adjoint().apply(&Element::unit(&m2())).unwrap();
    assert!(et_one.max_abs_diff(&Element::unit(&m2())) < 1e-9);
    assert!(p.decay_condition);
}

#[test]
fn decay_at_the_predicted_power() {
    for phi in [example(), lambda_map(0.5), lambda_map(0.9)] {
        let p = profile(&phi);
        let n = decay_power(p.decay_radius, phi.shape().dim());
        let d = phi.shape().dim();
        let rest = phi.matrix().pow(n as u32) * (DMatrix::identity(d, d) - &p.e);
        assert!(rest.norm() <= 1e-6, "n = {n}, residual {}", rest.norm());
    }
}

#[test]
fn spectral_projection_matches_power_oracle() {
    for phi in [example(), lambda_map(0.5), stochastic(&[&[0., 1., 0.], &[0., 0., 1.], &[0.5, 0.25, 0.25]])] {
        let e = peripheral_idempotent(&phi, 1e-8).unwrap().e;
        let oracle = power_limit(phi.matrix(), 512);
        assert!((&e - &oracle.e).norm() < 1e-6, "{}", (&e - &oracle.e).norm());
    }
}
