//! The end-to-end analysis report and its JSON helpers.

use std::fmt::Write;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::Value;

use crate::asymptotics::{asymptotic_profile, AsymptoticProfile};
use crate::config::Tolerances;
use crate::corestruct::{core_report, CoreReport};
use crate::scalar::{Cx, Real};
use crate::schema;
use crate::states::{state_report, StateReport};
use crate::upmap::{is_faithful_map, validate_up, Diagnostics, UPMap};
use crate::verify::{instance_properties, PropertyResult, PropertyTolerances};

pub(crate) fn ser_complex<T: Real, S: Serializer>(z: &Cx<T>, s: S) -> Result<S::Ok, S::Error> {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()].serialize_into(s)
}

pub(crate) fn ser_complex_list<T: Real, S: Serializer>(zs: &[Cx<T>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re.to_f64_lossy(), z.im.to_f64_lossy()])?;
    }
    seq.end()
}

/// Row-major list of rows.
pub(crate) fn ser_matrix<T: Real, S: Serializer>(m: &DMatrix<T>, s: S) -> Result<S::Ok, S::Error> {
    matrix_rows(m).serialize_into(s)
}

pub fn matrix_rows<T: Real>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)].to_f64_lossy()).collect())
        .collect()
}

trait SerializeInto {
    fn serialize_into<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error>;
}

impl<V: Serialize> SerializeInto for V {
    fn serialize_into<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.serialize(s)
    }
}

/// Top-level yes/no conclusions of an analysis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verdicts {
    pub m_inf_equals_core: bool,
    pub m_inf_jordan_closed: bool,
    pub decay_condition: bool,
    pub faithful_map: bool,
    pub faithful_invariant_state: bool,
}

/// Everything computed for one map, in a stable field order.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport<T: Real> {
    pub input: Value,
    pub validation: Diagnostics<T>,
    pub profile: AsymptoticProfile<T>,
    pub core: CoreReport<T>,
    pub states: StateReport<T>,
    pub verdicts: Verdicts,
    pub properties: Vec<PropertyResult>,
    pub tolerances: Tolerances<T>,
    pub tool_version: &'static str,
    pub seed: u64,
}

impl<T: Real> AnalysisReport<T> {
    pub fn all_properties_pass(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

fn validation_failure<T: Real>(d: &Diagnostics<T>) -> String {
    let mut why = Vec::new();
    if let Some(c) = d.certificate.as_ref().filter(|c| !c.passed) {
        why.push(format!(
            "certificate fails (unitality defect {:e}, witness {:e})",
            c.unitality_defect.to_f64_lossy(),
            c.min_witness.to_f64_lossy()
        ));
    }
    if !d.sampled_positive {
        let m = d.sampled_min_output_eigenvalue.map_or(f64::NAN, |v| v.to_f64_lossy());
        why.push(format!("sampled output eigenvalue {m:e} is negative"));
    }
    if !d.sa_contraction {
        why.push(format!("contraction ratio {} exceeds 1", d.contraction_ratio.to_f64_lossy()));
    }
    why.join("; ")
}

/// Validation samples drawn by [`analyze`].
pub const VALIDATION_SAMPLES: usize = 64;

/// Runs validation, asymptotics, core structure, states and the property
/// checks on `phi`. The result depends only on `(phi, tols, pt, seed)`.
pub fn analyze<T: Real>(
    phi: &UPMap<T>,
    tols: &Tolerances<T>,
    pt: PropertyTolerances,
    seed: u64,
) -> crate::Result<AnalysisReport<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = phi.shape();
    let validation = validate_up(phi, VALIDATION_SAMPLES, tols.rank, &mut rng);
    if !validation.unital {
        return Err(crate::Error::NotUnital {
            residual: validation.unital_residual.to_f64_lossy(),
        });
    }
    if !validation.passed {
        return Err(crate::Error::ValidationFailed(validation_failure(&validation)));
    }
    let profile = asymptotic_profile(phi, tols, &mut rng)?;
    let e = profile.e_map(shape);
    let core = core_report(phi.as_sa_map(), &e, &profile.m_inf, tols)?;
    let states = state_report(
        phi.as_sa_map(),
        &profile.e,
        &profile.m_inf,
        &core.core,
        &core.jordan_generated_tail,
        tols,
    )?;
    let properties = instance_properties(phi, &profile, &core, &states, tols, pt, &mut rng);
    let verdicts = Verdicts {
        m_inf_equals_core: core.core_equals_tail,
        m_inf_jordan_closed: core.m_inf_jordan_closed,
        decay_condition: profile.decay_condition,
        faithful_map: is_faithful_map(phi.as_sa_map(), tols.rank),
        faithful_invariant_state: states.faithful_exists,
    };
    Ok(AnalysisReport {
        input: schema::document(shape, phi.spec()),
        validation,
        profile,
        core,
        states,
        verdicts,
        properties,
        tolerances: *tols,
        tool_version: crate::TOOL_VERSION,
        seed,
    })
}

/// Short human-readable summary of a report.
pub fn render_text<T: Real>(rep: &AnalysisReport<T>) -> String {
    let mut s = String::new();
    let shape: Vec<String> = rep.profile.m_inf.shape().block_dims().iter().map(|n| n.to_string()).collect();
    let _ = writeln!(s, "shape           [{}] (mode {})", shape.join(", "), rep.input["map"]["mode"].as_str().unwrap_or("?"));
    let _ = writeln!(s, "validation      {}", if rep.validation.passed { "ok" } else { "FAILED" });
    let per: Vec<String> = rep
        .profile
        .peripheral_eigenvalues
        .iter()
        .map(|z| format!("{:.6}{:+.6}i", z.re.to_f64_lossy(), z.im.to_f64_lossy()))
        .collect();
    let _ = writeln!(s, "peripheral      {}", per.join(" "));
    let _ = writeln!(s, "decay radius    {:.6}", rep.profile.decay_radius.to_f64_lossy());
    let _ = writeln!(s, "dim M_inf       {}", rep.profile.m_inf.dim());
    let _ = writeln!(s, "dim M_phi       {}", rep.core.definite_set.dim());
    let _ = writeln!(s, "dim B_phi       {}", rep.core.b_phi.dim());
    let _ = writeln!(s, "dim C_phi       {}", rep.core.core.dim());
    match rep.profile.restricted.diagnostics.order {
        Some(k) => {
            let _ = writeln!(s, "restricted map  order {k}");
        }
        None => {
            let _ = writeln!(s, "restricted map  infinite order");
        }
    }
    let st: Vec<String> = rep
        .states
        .invariant_state
        .density
        .eigenvalues()
        .iter()
        .map(|v| format!("{:.6}", v.to_f64_lossy()))
        .collect();
    let _ = writeln!(s, "invariant state spectrum {}", st.join(" "));
    let v = &rep.verdicts;
    for (name, val) in [
        ("m_inf_equals_core", v.m_inf_equals_core),
        ("m_inf_jordan_closed", v.m_inf_jordan_closed),
        ("decay_condition", v.decay_condition),
        ("faithful_map", v.faithful_map),
        ("faithful_invariant_state", v.faithful_invariant_state),
    ] {
        let _ = writeln!(s, "{name:<26}{val}");
    }
    let failed: Vec<&str> = rep.properties.iter().filter(|p| !p.passed).map(|p| p.name).collect();
    let checked = rep.properties.iter().filter(|p| p.applicable).count();
    if failed.is_empty() {
        let _ = writeln!(s, "properties      {checked} checked, all pass");
    } else {
        let _ = writeln!(s, "properties      {checked} checked, FAILED: {}", failed.join(", "));
    }
    s
}
