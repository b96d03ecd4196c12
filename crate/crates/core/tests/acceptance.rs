//! Acceptance criteria, one pass/fail line each.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use tailcore::algebra::{AlgebraShape, Element, SaSubspace};
use tailcore::golden::{closed_form_powers, example_map, paper_example};
use tailcore::linalg::RankPolicy;
use tailcore::report::analyze;
use tailcore::verify::{run_suites, PropertyTolerances, Suite, VerifySummary};
use tailcore::{build_map, MapSpec, SaMap, Tolerances};

struct Line {
    id: u32,
    name: &'static str,
    ok: bool,
    detail: String,
}

fn report(lines: &[Line]) {
    for l in lines {
        println!(
            "[{}] criterion {} {}: {}",
            if l.ok { "PASS" } else { "FAIL" },
            l.id,
            l.name,
            l.detail
        );
    }
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let el = t.elapsed();
    (el < limit, format!("{:.3}s (limit {}s)", el.as_secs_f64(), limit.as_secs()))
}

fn golden() -> Line {
    let t = Instant::now();
    let out = paper_example(&Tolerances::default(), 0).expect("example analyzes");
    let (fast, time) = within(t, Duration::from_secs(1));
    let bad: Vec<&str> = out.mismatches().map(|c| c.field).collect();
    Line {
        id: 1,
        name: "three-state example golden values",
        ok: out.passed && fast,
        detail: if bad.is_empty() { time } else { format!("mismatch {bad:?}, {time}") },
    }
}

fn lambda_example() -> Line {
    let t = Instant::now();
    let s = AlgebraShape::full(2).unwrap();
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.5, 0.5, 1.0]));
    let phi = build_map(&s, MapSpec::Asserted(a)).unwrap();
    let rep = analyze(&phi, &Tolerances::default(), PropertyTolerances::default(), 0).unwrap();
    let pol = RankPolicy::new(1e-9);
    let diag = SaSubspace::span(
        &s,
        &[Element::diagonal(&s, &[1.0, 0.0]).unwrap(), Element::diagonal(&s, &[0.0, 1.0]).unwrap()],
        &pol,
    )
    .unwrap();
    let compression = SaMap::from_fn(&s, |x| {
        let b = x.block(0);
        let d = DMatrix::from_fn(2, 2, |i, j| if i == j { b[(i, j)] } else { num_complex::Complex::new(0.0, 0.0) });
        Element::from_blocks(&s, vec![d]).unwrap()
    });
    let e_err = (&rep.profile.e - compression.matrix()).amax();
    let ok = rep.profile.m_inf.same_as(&diag, 1e-9)
        && rep.core.core.same_as(&diag, 1e-9)
        && e_err <= 1e-9
        && rep.verdicts.decay_condition
        && rep.verdicts.faithful_invariant_state;
    let (fast, time) = within(t, Duration::from_secs(1));
    Line {
        id: 2,
        name: "lambda map on M2",
        ok: ok && fast,
        detail: format!("dim M_inf {}, dim C {}, |E - compression| {e_err:.1e}, {time}", rep.profile.m_inf.dim(), rep.core.core.dim()),
    }
}

fn closed_forms() -> Line {
    let phi = example_map();
    let mut worst = 0f64;
    for n in 1..=8 {
        let (even, odd) = closed_form_powers(n);
        let pe = phi.as_sa_map().power(2 * n as u32);
        let po = phi.as_sa_map().power(2 * n as u32 + 1);
        worst = worst.max((pe.matrix() - even).amax()).max((po.matrix() - odd).amax());
    }
    Line {
        id: 3,
        name: "closed-form even and odd powers",
        ok: worst <= 1e-9,
        detail: format!("max entry error {worst:.1e} over n = 1..8"),
    }
}

fn summary_detail(s: &VerifySummary) -> String {
    let mut parts = Vec::new();
    for suite in &s.suites {
        parts.push(format!("{} {}/{} instances clean", suite.suite.name(), suite.instances - suite.failed_instances, suite.instances));
        for p in suite.properties.iter().filter(|p| p.failed > 0) {
            parts.push(format!("{} failed {}x (worst {:.1e})", p.name, p.failed, p.worst_residual));
        }
    }
    for f in s.failures.iter().take(3) {
        parts.push(format!("seed {} failed {:?}", f.seed, f.failures));
    }
    parts.join("; ")
}

fn worst(s: &VerifySummary, names: &[&str]) -> String {
    let mut parts = Vec::new();
    for suite in &s.suites {
        for n in names {
            if let Some(p) = suite.properties.iter().find(|p| p.name == *n && p.checked > 0) {
                if p.tolerance == 0.0 {
                    parts.push(format!("{}:{n} holds", suite.suite.name()));
                } else {
                    parts.push(format!("{}:{n} {:.1e} <= {:.0e}", suite.suite.name(), p.worst_residual, p.tolerance));
                }
            }
        }
    }
    parts.join(", ")
}

fn required(s: &VerifySummary, names: &[&str]) -> Vec<String> {
    let mut missing = Vec::new();
    for suite in &s.suites {
        for n in names {
            if !suite.properties.iter().any(|p| p.name == *n) {
                missing.push(format!("{}:{n}", suite.suite.name()));
            }
        }
    }
    missing
}

fn commutative_suite() -> (Line, VerifySummary) {
    let t = Instant::now();
    let s = run_suites(&[Suite::Commutative], 100, 7, 8, &Tolerances::default(), PropertyTolerances::default());
    let (fast, time) = within(t, Duration::from_secs(60));
    let names = [
        "containment_chain",
        "jordan_closed_tail_is_core",
        "complement_vanishing_iff_core_is_tail",
        "faithful_core_is_largest_jordan",
        "largest_jordan_matches_projections",
        "faithful_state_decay_core_chain",
        "core_is_tail_iff_state_faithful_on_generated",
    ];
    let missing = required(&s, &names);
    let line = Line {
        id: 4,
        name: "commutative property suite",
        ok: s.passed && fast && missing.is_empty(),
        detail: format!(
            "{}; {}; {time}{}",
            summary_detail(&s),
            worst(&s, &names),
            if missing.is_empty() { String::new() } else { format!(", missing {missing:?}") }
        ),
    };
    (line, s)
}

fn noncommutative_suite() -> (Line, VerifySummary) {
    let t = Instant::now();
    let tols = Tolerances::default();
    let pt = PropertyTolerances::default();
    let mut cp = run_suites(&[Suite::Cp], 50, 1, 4, &tols, pt);
    let mix = run_suites(&[Suite::PositiveMix], 25, 1, 4, &tols, pt);
    cp.passed &= mix.passed;
    cp.suites.extend(mix.suites);
    cp.failures.extend(mix.failures);
    let (fast, time) = within(t, Duration::from_secs(120));
    let names = [
        "e_idempotent",
        "e_commutes",
        "e_unital",
        "decay_at_predicted_power",
        "oracle_agreement",
        "schwarz_gram_psd",
        "dual_norm_identity",
    ];
    let missing = required(&cp, &names);
    (
        Line {
            id: 5,
            name: "noncommutative property suite",
            ok: cp.passed && fast && missing.is_empty(),
            detail: format!(
                "{}; {}; {time}{}",
                summary_detail(&cp),
                worst(&cp, &names),
                if missing.is_empty() { String::new() } else { format!(", missing {missing:?}") }
            ),
        },
        cp,
    )
}

fn lift_conditions(comm: &VerifySummary, nc: &VerifySummary) -> Line {
    let mut checked = 0;
    let mut failed = 0;
    for suite in comm.suites.iter().chain(&nc.suites) {
        if let Some(p) = suite.properties.iter().find(|p| p.name == "lift_conditions_simultaneous") {
            checked += p.checked;
            failed += p.failed;
        }
    }
    let total: usize = comm.suites.iter().chain(&nc.suites).map(|s| s.instances).sum();
    Line {
        id: 6,
        name: "lift characterizations hold together on every instance",
        ok: failed == 0 && checked == total,
        detail: format!("{checked}/{total} instances checked, {failed} failed"),
    }
}

fn main() {
    let mut lines = vec![golden(), lambda_example(), closed_forms()];
    let (c, comm) = commutative_suite();
    lines.push(c);
    let (nc, noncomm) = noncommutative_suite();
    lines.push(nc);
    lines.push(lift_conditions(&comm, &noncomm));
    report(&lines);
    let failed: Vec<u32> = lines.iter().filter(|l| !l.ok).map(|l| l.id).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria {failed:?}");
        std::process::exit(1);
    }
}
