use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tailcore::report::analyze;
use tailcore::verify::{generate_instance, instance_seed, PropertyTolerances, Suite};
use tailcore::{schema, Tolerances};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tailcore"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn dim(v: &Value) -> usize {
    v.as_array().unwrap().len()
}

#[test]
fn analyze_three_state_example() {
    let out = run(&["analyze", example("paper_sec5.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_of(&out);
    assert_eq!(dim(&r["profile"]["m_inf"]), 2);
    assert_eq!(dim(&r["core"]["core"]), 1);
    assert_eq!(r["profile"]["restricted"]["diagnostics"]["order"], 2);
    assert_eq!(r["verdicts"]["faithful_invariant_state"], false);
    assert_eq!(r["verdicts"]["m_inf_jordan_closed"], false);
}

#[test]
fn analyze_identity() {
    let out = run(&["analyze", example("identity_3.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    for key in [&r["profile"]["m_inf"], &r["core"]["definite_set"], &r["core"]["b_phi"], &r["core"]["core"]] {
        assert_eq!(dim(key), 9);
    }
    assert_eq!(r["verdicts"]["m_inf_equals_core"], true);
}

#[test]
fn analyze_lambda_map() {
    let out = run(&["analyze", example("lambda_half.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(dim(&r["profile"]["m_inf"]), 2);
    assert_eq!(dim(&r["core"]["core"]), 2);
    assert_eq!(r["verdicts"]["m_inf_equals_core"], true);
    assert_eq!(r["verdicts"]["faithful_invariant_state"], true);
}

#[test]
fn text_output_and_csv() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("csv_lambda");
    let _ = std::fs::remove_dir_all(&dir);
    let out = run(&[
        "analyze",
        example("lambda_half.json").to_str().unwrap(),
        "--text",
        "--csv-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dim C_phi       2"), "{text}");
    let csv = std::fs::read_to_string(dir.join("decay_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,trace_norm"));
    assert_eq!(lines.count(), 513);
}

#[test]
fn paper_example_matches() {
    let out = run(&["paper-example"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("GOLDEN_MISMATCH"));
    for field in ["E", "invariant_state", "core"] {
        assert!(text.lines().any(|l| l.starts_with("ok") && l.split_whitespace().nth(1) == Some(field)), "{text}");
    }
    let out = run(&["paper-example", "--json"]);
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn verify_smoke() {
    let out = run(&["verify", "all", "--count", "1", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with("all properties pass\n"));
}

#[test]
fn input_errors_exit_2() {
    let non_unital = scratch(
        "non_unital.json",
        r#"{"version":"tailcore/1","shape":[1,1],"map":{"mode":"stochastic","data":[[0.5,0.6],[0,1]]}}"#,
    );
    let bad_version = scratch("bad_version.json", r#"{"version":"tailcore/0","shape":[1],"map":{"mode":"stochastic","data":[[1]]}}"#);
    let not_positive = scratch(
        "not_positive.json",
        r#"{"version":"tailcore/1","shape":[2],"map":{"mode":"asserted","data":{"sa_matrix":[[1,0,0,0],[0,2,0,0],[0,0,2,0],[0,0,0,1]]}}}"#,
    );
    for p in [&non_unital, &bad_version, &not_positive, &PathBuf::from("/nonexistent/map.json")] {
        let out = run(&["analyze", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{}", p.display());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
    let out = run(&["analyze", not_positive.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("VALIDATION_FAILED"));
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "cp", "--max-dim", "1"]).status.code(), Some(2));
}

#[test]
fn unconverged_sequences_exit_3() {
    let out = run(&["analyze", example("lambda_half.json").to_str().unwrap(), "--nmax", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOT_CONVERGED"));
}

#[test]
fn reports_are_deterministic() {
    let p = example("paper_sec5.json");
    let a = run(&["analyze", p.to_str().unwrap(), "--seed", "42"]);
    let b = run(&["analyze", p.to_str().unwrap(), "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["verify", "cp", "--count", "3", "--seed", "5", "--json"]);
    let b = run(&["verify", "cp", "--count", "3", "--seed", "5", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn emitted_instances_replay() {
    for (suite, index) in [(Suite::Cp, 2), (Suite::PositiveMix, 0), (Suite::Commutative, 4)] {
        let seed = instance_seed(9, suite, index);
        let phi = generate_instance(suite, 4, seed);
        let direct = analyze(&phi, &Tolerances::default(), PropertyTolerances::default(), seed).unwrap();
        let doc = schema::document(phi.shape(), phi.spec());
        let path = scratch(&format!("replay_{}_{index}.json", suite.name()), &doc.to_string());
        let out = run(&["analyze", path.to_str().unwrap(), "--seed", &seed.to_string()]);
        let r = json_of(&out);
        let props = r["properties"].as_array().unwrap();
        assert_eq!(props.len(), direct.properties.len());
        for (p, q) in props.iter().zip(&direct.properties) {
            assert_eq!(p["name"], q.name);
            assert_eq!(p["passed"], q.passed);
            assert_eq!(p["residual"].as_f64().unwrap(), q.residual, "{}", q.name);
        }
    }
}
