//! Property checks on analyzed instances and seeded random suites.
//!
//! [`instance_properties`] evaluates every structural relation the analysis
//! is expected to satisfy on one map. [`run_suite`] generates random maps,
//! analyzes them and aggregates the property results. A failing instance is
//! reported with its seed and input document, and running the analysis on
//! that document with that seed reproduces the same residuals.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::algebra::{AlgebraShape, Element, NormKind, SaSubspace};
use crate::asymptotics::{decay_power, intrinsic_jordan, peripheral_idempotent, AsymptoticProfile};
use crate::config::Tolerances;
use crate::corestruct::{definite_set_with_gram, weighted_jordan_gram, CoreReport};
use crate::linalg;
use crate::oracle;
use crate::random;
use crate::report::{analyze, AnalysisReport};
use crate::scalar::Real;
use crate::schema;
use crate::states::{norm_convergence_report, StateReport};
use crate::upmap::{build_map, is_faithful_map, validate_up, MapSpec, SaFunctional, SaMap, UPMap};

/// Random elements drawn per sampled property.
const SAMPLES: usize = 8;
/// Random densities for the dual norm identity.
const DUAL_SAMPLES: usize = 10;
/// Sequence length for the dual norm identity.
const DUAL_N: usize = 200;
/// Power search length for the oracle `E`.
const ORACLE_N: usize = 512;
/// Share of instances drawn from the structured generators.
const STRUCTURED_FRACTION: f64 = 0.5;
/// Instances with a decay radius above this are redrawn.
pub const MAX_DECAY_RADIUS: f64 = 0.9;

/// Outcome of one property on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub applicable: bool,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl PropertyResult {
    fn residual(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            applicable: true,
            passed: residual <= tolerance,
            residual,
            tolerance,
        }
    }

    fn holds(name: &'static str, ok: bool) -> Self {
        Self {
            name,
            applicable: true,
            passed: ok,
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
        }
    }

    fn skipped(name: &'static str) -> Self {
        Self {
            name,
            applicable: false,
            passed: true,
            residual: 0.0,
            tolerance: 0.0,
        }
    }
}

/// Residual tolerances. On commutative instances every residual tolerance
/// is relaxed to `commutative`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PropertyTolerances {
    pub commutative: f64,
    pub idempotent: f64,
    pub schwarz: f64,
    pub isometry: f64,
    pub multiplicative: f64,
    pub convergence: f64,
    pub subspace: f64,
    pub algebraic: f64,
}

impl Default for PropertyTolerances {
    fn default() -> Self {
        Self {
            commutative: 1e-6,
            idempotent: 1e-8,
            schwarz: 1e-8,
            isometry: 1e-8,
            multiplicative: 1e-8,
            convergence: 1e-6,
            subspace: 1e-6,
            algebraic: 1e-9,
        }
    }
}

impl PropertyTolerances {
    fn for_shape(self, shape: &AlgebraShape) -> Self {
        if shape.is_commutative() {
            let c = self.commutative;
            Self {
                commutative: c,
                idempotent: c,
                schwarz: c,
                isometry: c,
                multiplicative: c,
                convergence: c,
                subspace: c,
                algebraic: c,
            }
        } else {
            self
        }
    }
}

fn f<T: Real>(x: T) -> f64 {
    x.to_f64_lossy()
}

fn opn<T: Real>(x: &Element<T>) -> T {
    x.norm(NormKind::Operator)
}

fn random_in<T: Real, R: Rng + ?Sized>(s: &SaSubspace<T>, rng: &mut R) -> Element<T> {
    random::random_in_span(&s.basis(), s.shape(), rng)
}

fn implies(a: bool, b: bool) -> bool {
    !a || b
}

struct Ctx<'a, T: Real> {
    phi: &'a UPMap<T>,
    map: &'a SaMap<T>,
    shape: &'a AlgebraShape,
    e: SaMap<T>,
    prof: &'a AsymptoticProfile<T>,
    core: &'a CoreReport<T>,
    states: &'a StateReport<T>,
    tols: &'a Tolerances<T>,
    pt: PropertyTolerances,
}

fn algebra_properties<T: Real, R: Rng + ?Sized>(c: &Ctx<T>, rng: &mut R, out: &mut Vec<PropertyResult>) {
    let s = c.shape;
    let one = Element::<T>::unit(s);
    let mut jordan = T::zero();
    let mut spectral = T::zero();
    for _ in 0..SAMPLES {
        let x = random::random_sa::<T, R>(s, rng);
        let y = random::random_sa::<T, R>(s, rng);
        let z = random::random_sa::<T, R>(s, rng);
        let scale = T::one() + opn(&x) * (opn(&y) + opn(&z));
        let xy = x.jordan_product(&y).expect("same shape");
        let yx = y.jordan_product(&x).expect("same shape");
        let lin = (&x.scale(T::lit(2.0)) + &y).jordan_product(&z).expect("same shape");
        let lin_ref = &x.jordan_product(&z).expect("same shape").scale(T::lit(2.0)) + &y.jordan_product(&z).expect("same shape");
        jordan = jordan
            .max(opn(&(&xy - &yx)) / scale)
            .max(opn(&(&x.jordan_product(&one).expect("same shape") - &x)) / scale)
            .max(opn(&(&lin - &lin_ref)) / scale);

        let nx = T::one() + opn(&x);
        match x.spectral_projections(T::lit(1e-9)) {
            Ok(parts) => {
                let mut sum = Element::zeros(s);
                let mut recon = Element::zeros(s);
                for (lam, p) in &parts {
                    spectral = spectral
                        .max(opn(&(&p.square() - p)))
                        .max(opn(&(&p.adjoint() - p)));
                    sum = &sum + p;
                    recon = &recon + &p.scale(*lam);
                }
                spectral = spectral.max(opn(&(&sum - &one))).max(opn(&(&recon - &x)) / nx);
            }
            Err(_) => spectral = T::one(),
        }
    }
    out.push(PropertyResult::residual("jordan_product_axioms", f(jordan), c.pt.algebraic));
    out.push(PropertyResult::residual("spectral_projections", f(spectral), c.pt.algebraic));

    let d = s.dim();
    let basis = Element::<T>::canonical_basis(s);
    let gram = DMatrix::from_fn(d, d, |i, j| basis[i].hs_inner(&basis[j]).expect("same shape"));
    let hs = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .fold(T::zero(), |m, (i, j)| {
            let want = if i == j { T::one() } else { T::zero() };
            m.max((gram[(i, j)].re - want).abs()).max(gram[(i, j)].im.abs())
        });
    out.push(PropertyResult::residual("hs_basis_orthonormal", f(hs), c.pt.algebraic));

    let policy = c.tols.rank_policy();
    let m = &c.prof.m_inf;
    let respan = SaSubspace::span(s, &m.basis(), &policy)
        .map(|r| f(r.projector_distance(m)))
        .unwrap_or(1.0);
    out.push(PropertyResult::residual("span_idempotent", respan, 1e-10));

    let mut dim_ok = true;
    for _ in 0..SAMPLES {
        let ks = rng.random_range(0..=d);
        let kt = rng.random_range(0..=d);
        let sa: Vec<Element<T>> = (0..ks).map(|_| random::random_sa::<T, R>(s, rng)).collect();
        let ta: Vec<Element<T>> = (0..kt).map(|_| random::random_sa::<T, R>(s, rng)).collect();
        match (SaSubspace::span(s, &sa, &policy), SaSubspace::span(s, &ta, &policy)) {
            (Ok(ss), Ok(tt)) => match ss.intersect(&tt, &policy) {
                Ok(i) => dim_ok &= i.dim() + d >= ss.dim() + tt.dim() && i.dim() <= ss.dim().min(tt.dim()),
                Err(_) => dim_ok = false,
            },
            _ => dim_ok = false,
        }
    }
    out.push(PropertyResult::holds("intersection_dimension_bound", dim_ok));
}

fn upmap_properties<T: Real, R: Rng + ?Sized>(c: &Ctx<T>, rng: &mut R, out: &mut Vec<PropertyResult>) {
    let s = c.shape;
    let phi = c.map;

    let mut ks = T::zero();
    for _ in 0..SAMPLES {
        let x = random::random_sa::<T, R>(s, rng);
        let fx = phi.apply(&x).expect("same shape");
        let defect = &phi.apply(&x.square()).expect("same shape") - &fx.square();
        let nx = opn(&x);
        ks = ks.max((-defect.min_eigenvalue()).max(T::zero()) / (T::one() + nx * nx));
    }
    if c.phi.positivity_certified() {
        out.push(PropertyResult::residual("kadison_schwarz", f(ks), c.pt.schwarz));
    } else {
        out.push(PropertyResult::skipped("kadison_schwarz"));
    }

    let x = random::random_sa::<T, R>(s, rng);
    let mut cur = x.clone();
    let mut pow = T::zero();
    for n in 1..=64u32 {
        cur = phi.apply(&cur).expect("same shape");
        let direct = phi.power(n).apply(&x).expect("same shape");
        pow = pow.max(opn(&(&cur - &direct)) / (T::one() + opn(&x)));
    }
    out.push(PropertyResult::residual("power_consistency", f(pow), c.pt.idempotent));

    let mut dual = T::zero();
    for _ in 0..SAMPLES {
        let r = random::random_sa::<T, R>(s, rng);
        let x = random::random_sa::<T, R>(s, rng);
        let lhs = phi.adjoint().apply(&r).expect("same shape").hs_inner(&x).expect("same shape");
        let rhs = r.hs_inner(&phi.apply(&x).expect("same shape")).expect("same shape");
        dual = dual.max((lhs - rhs).norm_sqr().sqrt() / (T::one() + r.hs_norm() * x.hs_norm()));
    }
    out.push(PropertyResult::residual("adjoint_duality", f(dual), 1e-10));

    let diag = validate_up(c.phi, SAMPLES, T::lit(1e-9), rng);
    out.push(PropertyResult::holds("validate_up", diag.passed));

    if let MapSpec::Stochastic(p) = c.phi.spec() {
        let columns_nonzero = (0..p.ncols()).all(|j| p.column(j).iter().any(|&v| v > T::zero()));
        out.push(PropertyResult::holds(
            "stochastic_faithfulness_oracle",
            columns_nonzero == is_faithful_map(phi, c.tols.rank),
        ));
    } else {
        out.push(PropertyResult::skipped("stochastic_faithfulness_oracle"));
    }
}

fn asymptotic_properties<T: Real, R: Rng + ?Sized>(c: &Ctx<T>, rng: &mut R, out: &mut Vec<PropertyResult>) {
    let s = c.shape;
    let a = c.map.matrix();
    let e = c.e.matrix();
    let d = s.dim();
    let id = DMatrix::<T>::identity(d, d);
    let u = Element::<T>::unit(s).sa_coords();

    out.push(PropertyResult::residual("e_idempotent", f(linalg::op_norm(&(e * e - e))), c.pt.idempotent));
    out.push(PropertyResult::residual("e_commutes", f(linalg::op_norm(&(e * a - a * e))), c.pt.idempotent));
    out.push(PropertyResult::residual("e_unital", f((e * &u - &u).norm()), c.pt.idempotent));

    let n = decay_power(c.prof.decay_radius, d);
    let decayed = linalg::op_norm(&(c.map.power(n as u32).matrix() * (&id - e)));
    out.push(PropertyResult::residual("decay_at_predicted_power", f(decayed), c.pt.convergence));

    let pl = oracle::power_limit(a, ORACLE_N);
    out.push(PropertyResult::residual(
        "oracle_agreement",
        f(linalg::op_norm(&(e - &pl.e))),
        c.pt.convergence,
    ));

    let m = &c.prof.m_inf;
    let mut iso = T::zero();
    for _ in 0..SAMPLES {
        let x = random_in(m, rng);
        let nx = opn(&x);
        if nx > T::zero() {
            let fx = c.map.apply(&x).expect("same shape");
            iso = iso.max((opn(&fx) - nx).abs() / nx);
        }
    }
    out.push(PropertyResult::residual("tail_isometry", f(iso), c.pt.isometry));

    // dual norm identity
    let mut monotone = T::zero();
    let mut limit_gap = T::zero();
    for _ in 0..DUAL_SAMPLES {
        let r = SaFunctional {
            density: random::random_density::<T, R>(s, rng),
        };
        match norm_convergence_report(c.map, e, m, &r, DUAL_N, T::lit(c.pt.convergence)) {
            Ok(rep) => {
                monotone = monotone.max(rep.max_increase.max(T::zero()));
                let last = *rep.sequence.last().expect("nonempty");
                limit_gap = limit_gap.max((last - rep.converged_to).abs());
            }
            Err(crate::Error::NotConverged { gap, .. }) => limit_gap = limit_gap.max(T::lit(gap)),
            Err(_) => limit_gap = T::one(),
        }
    }
    out.push(PropertyResult::residual("dual_norm_monotone", f(monotone), 1e-10));
    out.push(PropertyResult::residual("dual_norm_identity", f(limit_gap), c.pt.convergence));

    // intrinsic Jordan product on M∞
    let tol = c.tols.membership;
    let mut jordan = T::zero();
    let one = Element::<T>::unit(s);
    for _ in 0..SAMPLES {
        let x = random_in(m, rng);
        let y = random_in(m, rng);
        let scale = T::one() + opn(&x) * opn(&x) * opn(&x) * opn(&y);
        let prod = |p: &Element<T>, q: &Element<T>| intrinsic_jordan(&c.e, p, q, tol);
        let r = (|| -> crate::Result<T> {
            let xy = prod(&x, &y)?;
            let yx = prod(&y, &x)?;
            let x1 = prod(&x, &one)?;
            let x2 = prod(&x, &x)?;
            let lhs = prod(&x2, &prod(&y, &x)?)?;
            let rhs = prod(&prod(&x2, &y)?, &x)?;
            Ok(opn(&(&xy - &yx)).max(opn(&(&x1 - &x))).max(opn(&(&lhs - &rhs))) / scale)
        })();
        jordan = jordan.max(r.unwrap_or_else(|_| T::one()));
    }
    out.push(PropertyResult::residual("intrinsic_jordan_axioms", f(jordan), c.pt.multiplicative));

    let diag = &c.prof.restricted.diagnostics;
    let cone = (-diag.forward_min_eigenvalue).max(-diag.inverse_min_eigenvalue).max(T::zero());
    let cone_ok = diag.invertible && f(cone) <= c.pt.isometry;
    out.push(PropertyResult::residual("restricted_order_automorphism", f(cone), c.pt.isometry));

    // three equivalent conditions on the lift: E is the identity on M∞, φ|M∞ is
    // an order automorphism, and the dual norm identity holds
    let fixes = linalg::op_norm(&(e * m.coords() - m.coords()));
    let lift = f(fixes) <= c.pt.idempotent && cone_ok && f(limit_gap) <= c.pt.convergence;
    out.push(PropertyResult {
        name: "lift_conditions_simultaneous",
        applicable: true,
        passed: lift,
        residual: f(fixes).max(f(cone)).max(f(limit_gap)),
        tolerance: c.pt.convergence,
    });
}

fn core_properties<T: Real, R: Rng + ?Sized>(c: &Ctx<T>, rng: &mut R, out: &mut Vec<PropertyResult>) {
    let s = c.shape;
    let policy = c.tols.rank_policy();
    let core = &c.core.core;
    let m = &c.prof.m_inf;
    let chain = core
        .excess_over(&c.core.b_phi)
        .max(c.core.b_phi.excess_over(&c.core.definite_set))
        .max(core.excess_over(m));
    out.push(PropertyResult::residual("containment_chain", f(chain), c.pt.subspace));

    let inv = core
        .image(c.map, &policy)
        .map(|img| if img.dim() == core.dim() { f(img.projector_distance(core)) } else { 1.0 })
        .unwrap_or(1.0);
    out.push(PropertyResult::residual("core_invariant", inv, c.pt.subspace));

    out.push(PropertyResult::holds(
        "jordan_closed_tail_is_core",
        implies(c.core.m_inf_jordan_closed, c.core.core_equals_tail),
    ));

    let faithful = is_faithful_map(c.map, c.tols.rank);
    let lj = &c.core.largest_jordan_in_tail;
    if faithful {
        out.push(PropertyResult::holds(
            "faithful_core_is_largest_jordan",
            core.same_as(lj, T::lit(c.pt.subspace)),
        ));
    } else {
        out.push(PropertyResult::skipped("faithful_core_is_largest_jordan"));
    }
    if s.is_commutative() && s.dim() <= 16 {
        let ok = oracle::projection_span(m, c.tols.membership, &policy)
            .map(|p| p.same_as(lj, T::lit(c.pt.subspace)))
            .unwrap_or(false);
        out.push(PropertyResult::holds("largest_jordan_matches_projections", ok));
    } else {
        out.push(PropertyResult::skipped("largest_jordan_matches_projections"));
    }

    let mut mult = T::zero();
    for _ in 0..SAMPLES {
        if core.dim() == 0 {
            break;
        }
        let x = random_in(core, rng);
        let y = random_in(core, rng);
        let lhs = c.map.apply(&x.jordan_product(&y).expect("same shape")).expect("same shape");
        let rhs = c
            .map
            .apply(&x)
            .expect("same shape")
            .jordan_product(&c.map.apply(&y).expect("same shape"))
            .expect("same shape");
        mult = mult.max(opn(&(&lhs - &rhs)) / (T::one() + opn(&x) * opn(&y)));
    }
    out.push(PropertyResult::residual("core_multiplicative", f(mult), c.pt.multiplicative));

    // definite set membership, inside and outside
    match definite_set_with_gram(c.map, &policy) {
        Ok(g) => {
            let scale = T::one().max(g.max_eigenvalue);
            out.push(PropertyResult::residual(
                "schwarz_gram_psd",
                f((-g.min_eigenvalue / scale).max(T::zero())),
                c.pt.schwarz,
            ));
            let mut inside = T::zero();
            let mut below = T::zero();
            for _ in 0..SAMPLES {
                if g.space.dim() > 0 {
                    let x = random_in(&g.space, rng);
                    let defect = &c.map.apply(&x.square()).expect("same shape") - &c.map.apply(&x).expect("same shape").square();
                    let nx = opn(&x);
                    inside = inside.max(opn(&defect) / (T::one() + nx * nx));
                }
                let x = random::random_sa::<T, R>(s, rng);
                let defect = &c.map.apply(&x.square()).expect("same shape") - &c.map.apply(&x).expect("same shape").square();
                let q = defect.trace().re;
                let resid = g.space.residual_coords(&x.sa_coords());
                if let Some(lmin) = g.min_positive_eigenvalue {
                    let bound = lmin * resid * resid * (T::one() - T::lit(1e-6));
                    let slack = T::lit(1e-10) * (T::one() + x.hs_norm() * x.hs_norm());
                    below = below.max((bound - q - slack).max(T::zero()));
                }
            }
            out.push(PropertyResult::residual("definite_set_membership", f(inside), c.pt.schwarz));
            out.push(PropertyResult::residual("definite_set_defect_bound", f(below), 0.0));
        }
        Err(_) => {
            out.push(PropertyResult::holds("schwarz_gram_psd", false));
            out.push(PropertyResult::holds("definite_set_membership", false));
            out.push(PropertyResult::holds("definite_set_defect_bound", false));
        }
    }

    out.push(PropertyResult::holds(
        "faithful_idempotent_tail_is_jordan",
        implies(c.prof.decay_condition, c.core.m_inf_jordan_closed),
    ));
}

fn state_properties<T: Real, R: Rng + ?Sized>(c: &Ctx<T>, rng: &mut R, out: &mut Vec<PropertyResult>) {
    let s = c.shape;
    let st = c.states;
    let core = &c.core.core;
    let a = c.map.matrix();

    out.push(PropertyResult::holds(
        "complement_vanishing_iff_core_is_tail",
        st.complement_vanishes == c.core.core_equals_tail,
    ));

    // φ|C faithful iff tr φ(x∘x) > 0 on nonzero self-adjoint x ∈ C
    let u = Element::<T>::unit(s).sa_coords();
    let t = a.transpose() * u;
    let g = weighted_jordan_gram(s, core.coords(), &t);
    let core_faithful = core.dim() == 0
        || g.symmetric_eigenvalues().iter().fold(T::lit(f64::INFINITY), |m, &v| m.min(v)) > c.tols.rank;
    if core_faithful && st.complement_vanishes {
        let mut mult = T::zero();
        let m = &c.prof.m_inf;
        for _ in 0..SAMPLES {
            let x = random_in(m, rng);
            let y = random_in(m, rng);
            let lhs = c.map.apply(&x.jordan_product(&y).expect("same shape")).expect("same shape");
            let rhs = c
                .map
                .apply(&x)
                .expect("same shape")
                .jordan_product(&c.map.apply(&y).expect("same shape"))
                .expect("same shape");
            mult = mult.max(opn(&(&lhs - &rhs)) / (T::one() + opn(&x) * opn(&y)));
        }
        let ok = c.core.core_equals_tail && f(mult) <= c.pt.multiplicative;
        out.push(PropertyResult {
            name: "faithful_core_vanishing_complement",
            applicable: true,
            passed: ok,
            residual: if c.core.core_equals_tail { f(mult) } else { 1.0 },
            tolerance: c.pt.multiplicative,
        });
    } else {
        out.push(PropertyResult::skipped("faithful_core_vanishing_complement"));
    }

    let chain = implies(st.faithful_exists, c.prof.decay_condition) && implies(c.prof.decay_condition, c.core.core_equals_tail);
    out.push(PropertyResult::holds("faithful_state_decay_core_chain", chain));

    out.push(PropertyResult::holds(
        "core_is_tail_iff_state_faithful_on_generated",
        c.core.core_equals_tail == st.faithful_on_jordan_generated_tail,
    ));

    // invariant state: fixed, PSD, trace one, and of maximal support
    let rho = &st.invariant_state.density;
    let rc = rho.sa_coords();
    let mut resid = (a.transpose() * &rc - &rc).norm();
    resid = resid.max((-rho.min_eigenvalue()).max(T::zero()));
    resid = resid.max((rho.trace().re - T::one()).abs());
    let comp = &Element::unit(s) - &st.maximal_support;
    for _ in 0..3 {
        let p = random::random_psd::<T, R>(s, rng);
        let p = p.scale(T::one() / p.trace().re);
        // late iterates of any state are supported under every invariant support
        let mut cur = p.sa_coords();
        for _ in 0..512 {
            cur = a.transpose() * cur;
        }
        let sigma = Element::from_sa_coords(s, &cur);
        let outside = comp.product(&sigma).expect("same shape").product(&comp).expect("same shape");
        resid = resid.max(opn(&outside));
    }
    out.push(PropertyResult::residual("invariant_state_maximal", f(resid), c.pt.convergence));

    if c.core.core_equals_tail {
        let worst = st
            .complement_decay
            .iter()
            .fold(T::zero(), |m, r| m.max(r.remainder));
        out.push(PropertyResult::residual("remainder_decay", f(worst), f(c.tols.conv)));
    } else {
        out.push(PropertyResult::skipped("remainder_decay"));
    }
}

/// All property checks for one analyzed map.
pub fn instance_properties<T: Real, R: Rng + ?Sized>(
    phi: &UPMap<T>,
    prof: &AsymptoticProfile<T>,
    core: &CoreReport<T>,
    states: &StateReport<T>,
    tols: &Tolerances<T>,
    pt: PropertyTolerances,
    rng: &mut R,
) -> Vec<PropertyResult> {
    let ctx = Ctx {
        phi,
        map: phi.as_sa_map(),
        shape: phi.shape(),
        e: prof.e_map(phi.shape()),
        prof,
        core,
        states,
        tols,
        pt: pt.for_shape(phi.shape()),
    };
    let mut out = Vec::new();
    algebra_properties(&ctx, rng, &mut out);
    upmap_properties(&ctx, rng, &mut out);
    asymptotic_properties(&ctx, rng, &mut out);
    core_properties(&ctx, rng, &mut out);
    state_properties(&ctx, rng, &mut out);
    out
}

/// Random instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Commutative,
    Cp,
    PositiveMix,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Commutative => "commutative",
            Suite::Cp => "cp",
            Suite::PositiveMix => "positive_mix",
        }
    }

    /// `all` expands to every family.
    pub fn parse(name: &str) -> Option<Vec<Suite>> {
        match name {
            "commutative" => Some(vec![Suite::Commutative]),
            "cp" => Some(vec![Suite::Cp]),
            "positive_mix" => Some(vec![Suite::PositiveMix]),
            "all" => Some(vec![Suite::Commutative, Suite::Cp, Suite::PositiveMix]),
            _ => None,
        }
    }

    fn tag(self) -> u64 {
        match self {
            Suite::Commutative => 1,
            Suite::Cp => 2,
            Suite::PositiveMix => 3,
        }
    }
}

/// Seed of instance `index` of `suite` under base seed `seed`.
pub fn instance_seed(seed: u64, suite: Suite, index: usize) -> u64 {
    // splitmix64 over a combined key
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(suite.tag() << 32)
        .wrapping_add(index as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn draw_spec<R: Rng + ?Sized>(suite: Suite, max_dim: usize, rng: &mut R) -> (AlgebraShape, MapSpec<f64>) {
    let structured = rng.random::<f64>() < STRUCTURED_FRACTION;
    match suite {
        Suite::Commutative => {
            let d = rng.random_range(2..=max_dim.max(2));
            let shape = AlgebraShape::commutative(d).expect("d ≥ 2");
            let p = if structured {
                random::random_structured_stochastic(d, rng)
            } else {
                random::random_stochastic(d, rng.random_range(0.25..0.75), rng)
            };
            (shape, MapSpec::Stochastic(p))
        }
        Suite::Cp => {
            let shape = random::random_shape(max_dim.max(2), rng);
            let fams = if structured {
                random::random_structured_kraus(&shape, rng)
            } else {
                random::random_kraus(&shape, 0.6, 2, 3, rng)
            };
            (shape, MapSpec::Kraus(fams))
        }
        Suite::PositiveMix => {
            let shape = random::random_shape(max_dim.max(2), rng);
            let spec = if structured {
                let w: f64 = rng.random_range(0.5..0.9);
                let a = random::random_structured_kraus(&shape, rng);
                let b = random::random_kraus(&shape, 0.7, 2, 3, rng);
                MapSpec::Mix(vec![(w, MapSpec::Kraus(a)), (1.0 - w, MapSpec::KrausTranspose(b))])
            } else {
                random::random_transpose_mix(&shape, rng)
            };
            (shape, spec)
        }
    }
}

/// Draws a random instance, redrawing until the decay radius is at most
/// [`MAX_DECAY_RADIUS`] so that fixed-length convergence checks are meaningful.
pub fn generate_instance(suite: Suite, max_dim: usize, seed: u64) -> UPMap<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    loop {
        let (shape, spec) = draw_spec(suite, max_dim, &mut rng);
        let Ok(phi) = build_map(&shape, spec) else { continue };
        match peripheral_idempotent(&phi, 1e-8) {
            Ok(pp) if pp.decay_radius <= MAX_DECAY_RADIUS => return phi,
            Ok(_) => continue,
            // numerical trouble is a finding, not a reason to redraw
            Err(_) => return phi,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertySummary {
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceFailure {
    pub suite: Suite,
    pub index: usize,
    pub seed: u64,
    /// Failed property names, or the analysis error code.
    pub failures: Vec<String>,
    pub instance: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub instances: usize,
    pub failed_instances: usize,
    pub properties: Vec<PropertySummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub count: usize,
    pub max_dim: usize,
    pub suites: Vec<SuiteSummary>,
    pub failures: Vec<InstanceFailure>,
    pub passed: bool,
}

struct InstanceOutcome {
    index: usize,
    seed: u64,
    instance: Value,
    result: std::result::Result<Vec<PropertyResult>, String>,
}

fn run_instance(suite: Suite, index: usize, base: u64, max_dim: usize, tols: &Tolerances<f64>, pt: PropertyTolerances) -> InstanceOutcome {
    let seed = instance_seed(base, suite, index);
    let phi = generate_instance(suite, max_dim, seed);
    let instance = schema::document(phi.shape(), phi.spec());
    let result = match analyze(&phi, tols, pt, seed) {
        Ok(rep) => Ok(rep.properties),
        Err(e) => Err(e.code().to_string()),
    };
    InstanceOutcome {
        index,
        seed,
        instance,
        result,
    }
}

/// Runs `count` instances of each suite, spreading instances over threads.
pub fn run_suites(
    suites: &[Suite],
    count: usize,
    seed: u64,
    max_dim: usize,
    tols: &Tolerances<f64>,
    pt: PropertyTolerances,
) -> VerifySummary {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    for &suite in suites {
        let mut outcomes: Vec<InstanceOutcome> = std::thread::scope(|sc| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    sc.spawn(move || {
                        (w..count)
                            .step_by(workers)
                            .map(|i| run_instance(suite, i, seed, max_dim, tols, pt))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        outcomes.sort_by_key(|o| o.index);

        let mut props: Vec<PropertySummary> = Vec::new();
        let mut failed_instances = 0;
        for o in outcomes {
            let failed: Vec<String> = match &o.result {
                Ok(results) => {
                    for r in results {
                        let entry = match props.iter_mut().find(|p| p.name == r.name) {
                            Some(p) => p,
                            None => {
                                props.push(PropertySummary {
                                    name: r.name,
                                    checked: 0,
                                    failed: 0,
                                    worst_residual: 0.0,
                                    tolerance: r.tolerance,
                                });
                                props.last_mut().expect("just pushed")
                            }
                        };
                        if r.applicable {
                            entry.checked += 1;
                            entry.worst_residual = entry.worst_residual.max(r.residual);
                            entry.tolerance = entry.tolerance.max(r.tolerance);
                            if !r.passed {
                                entry.failed += 1;
                            }
                        }
                    }
                    results.iter().filter(|r| !r.passed).map(|r| r.name.to_string()).collect()
                }
                Err(code) => vec![code.clone()],
            };
            if !failed.is_empty() {
                failed_instances += 1;
                failures.push(InstanceFailure {
                    suite,
                    index: o.index,
                    seed: o.seed,
                    failures: failed,
                    instance: o.instance,
                });
            }
        }
        summaries.push(SuiteSummary {
            suite,
            instances: count,
            failed_instances,
            properties: props,
        });
    }
    VerifySummary {
        seed,
        count,
        max_dim,
        passed: failures.is_empty(),
        suites: summaries,
        failures,
    }
}

/// Property results for an analysis, as reported.
pub fn failed_properties(rep: &AnalysisReport<f64>) -> Vec<&PropertyResult> {
    rep.properties.iter().filter(|p| !p.passed).collect()
}
