use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tailcore::report::{analyze, render_text, AnalysisReport};
use tailcore::verify::{run_suites, PropertyTolerances, Suite, VerifySummary};
use tailcore::{golden, schema, Error, ErrorClass, Tolerances};

const EXIT_PROPERTY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "tailcore", version, about = "Asymptotic structure of unital positive maps")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Relative rank and subspace tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Eigenvalues with modulus at least 1 - eps-per are peripheral.
    #[arg(long, global = true, default_value_t = 1e-8)]
    eps_per: f64,
    /// Length of norm-convergence sequences.
    #[arg(long, global = true, default_value_t = 512)]
    nmax: usize,
    /// Tolerance for norm-convergence statements.
    #[arg(long, global = true, default_value_t = 1e-6)]
    conv_tol: f64,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit a plain-text summary.
    #[arg(long, global = true)]
    text: bool,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write one decay_<k>.csv per complement functional (columns n,trace_norm).
    #[arg(long, global = true)]
    csv_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze a map given as a tailcore/1 JSON document (JSON output by default).
    Analyze {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Analyze the built-in three-state example and compare with its known answers.
    PaperExample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run seeded random property suites (text output by default).
    Verify {
        /// commutative, cp, positive_mix or all
        suite: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
    },
}

enum Format {
    Json,
    Text,
}

impl Opts {
    fn tolerances(&self) -> Tolerances<f64> {
        Tolerances {
            rank: self.tol,
            eps_per: self.eps_per,
            n_max: self.nmax,
            conv: self.conv_tol,
            ..Tolerances::default()
        }
    }

    fn format(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.text {
            Format::Text
        } else {
            default
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Input => EXIT_INPUT,
            ErrorClass::Numerical => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(what: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", what.display()),
    }
}

fn emit(opts: &Opts, body: &str) -> Result<(), Failure> {
    match &opts.out {
        Some(p) => fs::write(p, body).map_err(|e| io_failure(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| io_failure(Path::new("stdout"), e))
        }
    }
}

fn to_json<S: serde::Serialize>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn write_csv(dir: &Path, rep: &AnalysisReport<f64>) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    for (k, rec) in rep.states.complement_decay.iter().enumerate() {
        let mut body = String::from("n,trace_norm\n");
        for (n, a) in rec.sequence.iter().enumerate() {
            body.push_str(&format!("{n},{a:e}\n"));
        }
        let path = dir.join(format!("decay_{k}.csv"));
        fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
    }
    Ok(())
}

fn report_exit(rep: &AnalysisReport<f64>) -> u8 {
    if !rep.all_properties_pass() {
        EXIT_PROPERTY
    } else {
        0
    }
}

fn cmd_analyze(opts: &Opts, path: &Path, seed: u64) -> Result<u8, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let phi = schema::load_map::<f64>(&text)?;
    let rep = analyze(&phi, &opts.tolerances(), PropertyTolerances::default(), seed)?;
    if let Some(dir) = &opts.csv_dir {
        write_csv(dir, &rep)?;
    }
    let body = match opts.format(Format::Json) {
        Format::Json => to_json(&rep),
        Format::Text => render_text(&rep),
    };
    emit(opts, &body)?;
    Ok(report_exit(&rep))
}

fn cmd_three_state_example(opts: &Opts, seed: u64) -> Result<u8, Failure> {
    let out = golden::paper_example(&opts.tolerances(), seed)?;
    if let Some(dir) = &opts.csv_dir {
        write_csv(dir, &out.report)?;
    }
    let body = match opts.format(Format::Text) {
        Format::Json => to_json(&out),
        Format::Text => {
            let mut s = render_text(&out.report);
            s.push('\n');
            for c in &out.checks {
                s.push_str(&format!(
                    "{:<6}{:<26}residual {:.1e}\n",
                    if c.passed { "ok" } else { "FAIL" },
                    c.field,
                    c.residual
                ));
            }
            for c in out.mismatches() {
                s.push_str(&format!("GOLDEN_MISMATCH: {}: expected {} got {}\n", c.field, c.expected, c.actual));
            }
            s
        }
    };
    emit(opts, &body)?;
    if out.passed {
        Ok(report_exit(&out.report))
    } else {
        Ok(EXIT_PROPERTY)
    }
}

fn render_summary(s: &VerifySummary) -> String {
    let mut out = String::new();
    let mut names: Vec<&str> = Vec::new();
    for suite in &s.suites {
        for p in &suite.properties {
            if !names.contains(&p.name) {
                names.push(p.name);
            }
        }
    }
    out.push_str(&format!("{:<46}", "property"));
    for suite in &s.suites {
        out.push_str(&format!("{:>22}", suite.suite.name()));
    }
    out.push('\n');
    for name in names {
        out.push_str(&format!("{name:<46}"));
        for suite in &s.suites {
            let cell = match suite.properties.iter().find(|p| p.name == name) {
                Some(p) if p.checked == 0 => "-".to_string(),
                Some(p) => format!(
                    "{} {}/{} {:.1e}",
                    if p.failed == 0 { "pass" } else { "FAIL" },
                    p.checked - p.failed,
                    p.checked,
                    p.worst_residual
                ),
                None => "-".to_string(),
            };
            out.push_str(&format!("{cell:>22}"));
        }
        out.push('\n');
    }
    for suite in &s.suites {
        out.push_str(&format!(
            "{}: {} of {} instances clean\n",
            suite.suite.name(),
            suite.instances - suite.failed_instances,
            suite.instances
        ));
    }
    for f in &s.failures {
        out.push_str(&format!(
            "failed {} #{} seed {}: {}\n  instance: {}\n",
            f.suite.name(),
            f.index,
            f.seed,
            f.failures.join(", "),
            serde_json::to_string(&f.instance).expect("instance serializes")
        ));
    }
    out.push_str(if s.passed { "all properties pass\n" } else { "FAILED\n" });
    out
}

fn cmd_verify(opts: &Opts, suite: &str, count: usize, seed: u64, max_dim: usize) -> Result<u8, Failure> {
    let suites: Vec<Suite> = Suite::parse(suite).ok_or_else(|| Failure {
        code: EXIT_INPUT,
        message: format!("unknown suite {suite:?} (expected commutative, cp, positive_mix or all)"),
    })?;
    if max_dim < 2 {
        return Err(Failure {
            code: EXIT_INPUT,
            message: "--max-dim must be at least 2".into(),
        });
    }
    let summary = run_suites(&suites, count, seed, max_dim, &opts.tolerances(), PropertyTolerances::default());
    let body = match opts.format(Format::Text) {
        Format::Json => to_json(&summary),
        Format::Text => render_summary(&summary),
    };
    emit(opts, &body)?;
    Ok(if summary.passed { 0 } else { EXIT_PROPERTY })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Analyze { path, seed } => cmd_analyze(&cli.opts, path, *seed),
        Cmd::PaperExample { seed } => cmd_three_state_example(&cli.opts, *seed),
        Cmd::Verify {
            suite,
            count,
            seed,
            max_dim,
        } => cmd_verify(&cli.opts, suite, *count, *seed, *max_dim),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
