mod common;

use common::*;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tailcore::asymptotics::asymptotic_profile;
use tailcore::corestruct::{b_phi, definite_set, is_jordan_closed, jordan_generated, largest_jordan_subalgebra, multiplicative_core};
use tailcore::upmap::KrausFamily;
use tailcore::{build_map, AlgebraShape, Element, MapSpec, SaMap, SaSubspace, Tolerances, UPMap};

fn unit_span(s: &AlgebraShape) -> SaSubspace<f64> {
    SaSubspace::span(s, &[Element::unit(s)], &pol()).unwrap()
}

fn diagonals() -> SaSubspace<f64> {
    let s = m2();
    SaSubspace::span(&s, &[Element::diagonal(&s, &[1., 0.]).unwrap(), Element::diagonal(&s, &[0., 1.]).unwrap()], &pol()).unwrap()
}

fn tail(phi: &UPMap<f64>) -> (SaMap<f64>, SaSubspace<f64>) {
    let p = asymptotic_profile(phi, &Tolerances::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    (p.e_map(phi.shape()), p.m_inf)
}

fn chain(phi: &SaMap<f64>) -> (SaSubspace<f64>, SaSubspace<f64>, SaSubspace<f64>) {
    let m = definite_set(phi, &pol()).unwrap();
    let b = b_phi(phi, &m, &pol()).unwrap();
    let c = multiplicative_core(phi, &b, &pol()).unwrap();
    (m, b, c)
}

fn conjugation() -> UPMap<f64> {
    let u = DMatrix::from_row_slice(2, 2, &[C::new(0.6, 0.), C::new(0., 0.8), C::new(0., 0.8), C::new(0.6, 0.)]);
    build_map(&m2(), MapSpec::Kraus(vec![KrausFamily { from: 0, to: 0, ops: vec![u] }])).unwrap()
}

#[test]
fn definite_set_of_the_three_state_map_by_grid() {
    let phi = example();
    let sa = phi.as_sa_map();
    let m = definite_set(sa, &pol()).unwrap();
    assert!(m.same_as(&unit_span(phi.shape()), 1e-10));
    // Brute force over a grid: φ(f²) = φ(f)² exactly on the constant functions.
    let g = [-1.0, 0.0, 0.5, 2.0];
    for &a in &g {
        for &b in &g {
            for &c in &g {
                let f = Element::from_function(&[a, b, c]);
                let defect = (&sa.apply(&f.square()).unwrap() - &sa.apply(&f).unwrap().square()).hs_norm();
                let constant = a == b && b == c;
                assert_eq!(defect < 1e-12, constant, "f = ({a}, {b}, {c})");
                assert_eq!(m.contains(&f, 1e-9).unwrap(), constant);
            }
        }
    }
}

#[test]
fn definite_set_of_identity_and_lambda_maps() {
    let s = AlgebraShape::new(vec![2, 1]).unwrap();
    assert_eq!(definite_set(&SaMap::identity(&s), &pol()).unwrap().dim(), 5);

    let phi = lambda_map(0.5);
    let sa = phi.as_sa_map();
    assert!(definite_set(sa, &pol()).unwrap().same_as(&diagonals(), 1e-10));
    // x = diag(a, d) + b·σx:  φ(x²) - φ(x)² = (1 - λ²) b² 𝟏, zero iff b = 0.
    for &b in &[0.0, 0.3, -1.0] {
        let x = &Element::diagonal(&m2(), &[0.7, -0.2]).unwrap() + &sigma_x().scale(b);
        let d = &sa.apply(&x.square()).unwrap() - &sa.apply(&x).unwrap().square();
        let want = Element::unit(&m2()).scale(0.75 * b * b);
        assert!(d.max_abs_diff(&want) < 1e-12);
    }
}

#[test]
fn invariant_parts() {
    let (m, b, c) = chain(example().as_sa_map());
    let one = unit_span(&AlgebraShape::commutative(3).unwrap());
    assert!(m.same_as(&one, 1e-10) && b.same_as(&one, 1e-10) && c.same_as(&one, 1e-10));

    let s = AlgebraShape::new(vec![2, 1]).unwrap();
    let (_, b, c) = chain(&SaMap::identity(&s));
    assert_eq!((b.dim(), c.dim()), (5, 5));

    let (m, b, c) = chain(conjugation().as_sa_map());
    assert_eq!((m.dim(), b.dim(), c.dim()), (4, 4, 4));

    let (_, b, c) = chain(lambda_map(0.5).as_sa_map());
    assert!(b.same_as(&diagonals(), 1e-10) && c.same_as(&diagonals(), 1e-10));
}

#[test]
fn jordan_closedness() {
    let (_, m_inf) = tail(&example());
    assert!(!is_jordan_closed(&m_inf, 1e-7));
    assert!(is_jordan_closed(&diagonals(), 1e-10));
    assert!(is_jordan_closed(&unit_span(&m2()), 1e-10));
}

#[test]
fn generated_jordan_algebras() {
    let (_, m_inf) = tail(&example());
    assert_eq!(jordan_generated(&m_inf, &pol()).unwrap().dim(), 3);
    let d = diagonals();
    assert!(jordan_generated(&d, &pol()).unwrap().same_as(&d, 1e-10));
    let one = unit_span(&m2());
    assert!(jordan_generated(&one, &pol()).unwrap().same_as(&one, 1e-10));
}

#[test]
fn largest_jordan_subalgebras() {
    let phi = example();
    let (e, m_inf) = tail(&phi);
    let l = largest_jordan_subalgebra(&m_inf, &e, &pol()).unwrap();
    assert!(l.same_as(&unit_span(phi.shape()), 1e-9));

    let (e, m_inf) = tail(&lambda_map(0.5));
    assert!(largest_jordan_subalgebra(&m_inf, &e, &pol()).unwrap().same_as(&m_inf, 1e-9));

    let s = AlgebraShape::new(vec![2, 1]).unwrap();
    let id = SaMap::identity(&s);
    assert_eq!(largest_jordan_subalgebra(&SaSubspace::full(&s), &id, &pol()).unwrap().dim(), 5);
}
