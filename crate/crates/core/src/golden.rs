//! The three-state stochastic example with its known answers.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{AlgebraShape, Element, SaSubspace};
use crate::config::Tolerances;
use crate::error::Result;
use crate::linalg;
use crate::report::{analyze, matrix_rows, AnalysisReport};
use crate::upmap::{build_map, MapSpec, UPMap};
use crate::verify::PropertyTolerances;

pub const GOLDEN_TOL: f64 = 1e-9;

/// Row-stochastic matrix of the example.
pub fn example_matrix() -> DMatrix<f64> {
    let t = 1.0 / 3.0;
    DMatrix::from_row_slice(3, 3, &[t, t, t, 0., 0., 1., 0., 1., 0.])
}

pub fn example_map() -> UPMap<f64> {
    build_map(&AlgebraShape::commutative(3).expect("3 ≥ 1"), MapSpec::Stochastic(example_matrix()))
        .expect("the example is stochastic")
}

pub fn expected_e() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0., 0.5, 0.5, 0., 1., 0., 0., 0., 1.])
}

pub fn expected_invariant_state() -> [f64; 3] {
    [0.0, 0.5, 0.5]
}

/// `φ^{2n}` and `φ^{2n+1}` in closed form, `n ≥ 1`.
pub fn closed_form_powers(n: i32) -> (DMatrix<f64>, DMatrix<f64>) {
    let q = 9f64.powi(-n);
    let even = DMatrix::from_row_slice(
        3,
        3,
        &[q, 0.5 - q / 2.0, 0.5 - q / 2.0, 0., 1., 0., 0., 0., 1.],
    );
    let odd = DMatrix::from_row_slice(
        3,
        3,
        &[q / 3.0, 0.5 - q / 6.0, 0.5 - q / 6.0, 0., 0., 1., 0., 1., 0.],
    );
    (even, odd)
}

/// One compared field.
#[derive(Debug, Clone, Serialize)]
pub struct GoldenCheck {
    pub field: &'static str,
    pub expected: Value,
    pub actual: Value,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenOutcome {
    pub passed: bool,
    pub checks: Vec<GoldenCheck>,
    pub report: AnalysisReport<f64>,
}

impl GoldenOutcome {
    pub fn mismatches(&self) -> impl Iterator<Item = &GoldenCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(field: &'static str, expected: Value, actual: Value, residual: f64) -> GoldenCheck {
    GoldenCheck {
        field,
        expected,
        actual,
        residual,
        passed: residual <= GOLDEN_TOL,
    }
}

fn flag(field: &'static str, expected: Value, actual: Value) -> GoldenCheck {
    let passed = expected == actual;
    GoldenCheck {
        field,
        expected,
        actual,
        residual: if passed { 0.0 } else { 1.0 },
        passed,
    }
}

/// Analyzes the example and compares against the known answers.
pub fn paper_example(tols: &Tolerances<f64>, seed: u64) -> Result<GoldenOutcome> {
    let phi = example_map();
    let rep = analyze(&phi, tols, PropertyTolerances::default(), seed)?;
    let shape = phi.shape().clone();
    let policy = tols.rank_policy();
    let mut checks = Vec::new();

    let e = &rep.profile.e;
    checks.push(check(
        "E",
        json!(matrix_rows(&expected_e())),
        json!(matrix_rows(e)),
        (e - expected_e()).amax(),
    ));

    let want_tail = SaSubspace::span(
        &shape,
        &[Element::from_function(&[0.5, 1.0, 0.0]), Element::from_function(&[0.5, 0.0, 1.0])],
        &policy,
    )?;
    let m = &rep.profile.m_inf;
    let dist = if m.dim() == 2 { m.projector_distance(&want_tail) } else { 1.0 };
    checks.push(check("m_inf", json!(2), json!(m.dim()), dist));

    let want_core = SaSubspace::span(&shape, &[Element::unit(&shape)], &policy)?;
    let c = &rep.core.core;
    let dist = if c.dim() == 1 { c.projector_distance(&want_core) } else { 1.0 };
    checks.push(check("core", json!(1), json!(c.dim()), dist));

    let r = &rep.profile.restricted.matrix;
    let k = r.nrows();
    checks.push(check(
        "restricted_square",
        json!("identity"),
        json!(matrix_rows(&(r * r))),
        linalg::max_abs(&(r * r - DMatrix::identity(k, k))),
    ));

    let rho = &rep.states.invariant_state.density;
    let want = Element::from_function(&expected_invariant_state());
    checks.push(check(
        "invariant_state",
        json!(expected_invariant_state()),
        json!(rho),
        rho.max_abs_diff(&want),
    ));
    checks.push(flag(
        "faithful_invariant_state",
        json!(false),
        json!(rep.verdicts.faithful_invariant_state),
    ));
    checks.push(flag(
        "m_inf_jordan_closed",
        json!(false),
        json!(rep.verdicts.m_inf_jordan_closed),
    ));

    Ok(GoldenOutcome {
        passed: checks.iter().all(|c| c.passed),
        checks,
        report: rep,
    })
}
