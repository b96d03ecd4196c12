//! Peripheral spectrum, the idempotent power limit `E`, the tail system
//! `M∞ = range E` and the action of `φ` on it.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraShape, Element, NormKind, SaSubspace};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, RankPolicy};
use crate::random;
use crate::scalar::{cx, cre, Cx, Real};
use crate::upmap::{is_faithful_map, SaMap, UPMap};

/// Eigenvalues closer than this are one cluster.
const CLUSTER_TOL: f64 = 1e-5;
/// Relative singular-value cut for geometric multiplicities.
const GEOMETRIC_TOL: f64 = 1e-6;

/// One eigenvalue cluster of the coordinate matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralCluster<T: Real> {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub value: Cx<T>,
    pub algebraic: usize,
    pub geometric: usize,
}

impl<T: Real> SpectralCluster<T> {
    pub fn modulus(&self) -> T {
        self.value.norm_sqr().sqrt()
    }

    fn is_real(&self) -> bool {
        self.value.im == T::zero()
    }
}

fn cmod<T: Real>(z: Cx<T>) -> T {
    z.norm_sqr().sqrt()
}

fn geometric_multiplicity<T: Real>(a: &DMatrix<T>, lambda: Cx<T>) -> usize {
    let d = a.nrows();
    let scale = T::one().max(linalg::op_norm(a));
    let cut = T::lit(GEOMETRIC_TOL) * scale;
    let sigma: Vec<T> = if lambda.im == T::zero() {
        linalg::singular_values(&(a - DMatrix::<T>::identity(d, d) * lambda.re))
    } else {
        let m = DMatrix::<Cx<T>>::from_fn(d, d, |i, j| {
            let diag = if i == j { lambda } else { cre(T::zero()) };
            cre(a[(i, j)]) - diag
        });
        linalg::complex_singular_values(&m)
    };
    sigma.iter().filter(|&&s| s <= cut).count()
}

/// Eigenvalue clusters of a real square matrix, sorted by `(-|λ|, arg λ)`
/// with `arg` in `[0, 2π)`.
pub fn matrix_spectrum<T: Real>(a: &DMatrix<T>) -> Vec<SpectralCluster<T>> {
    let d = a.nrows();
    if d == 0 {
        return Vec::new();
    }
    let tol = T::lit(CLUSTER_TOL);
    let eig = linalg::eigenvalues(a);

    // single-linkage clustering
    let mut label: Vec<usize> = (0..d).collect();
    fn root(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if cmod(eig[i] - eig[j]) <= tol {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                if ri != rj {
                    label[rj.max(ri)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Cx<T>>)> = Vec::new();
    for i in 0..d {
        let r = root(&mut label, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(eig[i]),
            None => groups.push((r, vec![eig[i]])),
        }
    }

    let mut out: Vec<SpectralCluster<T>> = groups
        .into_iter()
        .map(|(_, g)| {
            let n = T::from_usize_lossy(g.len());
            let sum = g.iter().fold(cre(T::zero()), |a, &z| a + z);
            let mut value = cx(sum.re / n, sum.im / n);
            if value.im.abs() <= tol {
                value.im = T::zero();
            }
            SpectralCluster {
                value,
                algebraic: g.len(),
                geometric: 0,
            }
        })
        .collect();
    for c in out.iter_mut() {
        c.geometric = geometric_multiplicity(a, c.value);
    }
    out.sort_by(|x, y| {
        let key = |c: &SpectralCluster<T>| {
            // moduli equal up to rounding must tie so the argument decides
            let m = (c.modulus().to_f64_lossy() * 1e9).round();
            let mut arg = c.value.im.to_f64_lossy().atan2(c.value.re.to_f64_lossy());
            if arg < 0.0 {
                arg += std::f64::consts::TAU;
            }
            (-m, arg)
        };
        let (a, b) = (key(x), key(y));
        a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Eigenvalues of `φ` on the self-adjoint coordinates with multiplicities.
pub fn superop_spectrum<T: Real>(phi: &UPMap<T>) -> Vec<SpectralCluster<T>> {
    matrix_spectrum(phi.matrix())
}

/// Spectral projector of `a` onto the eigenspaces of `clusters`, which must
/// be semisimple and closed under conjugation.
///
/// The eigenspaces are the null space of the real polynomial
/// `Π (a - λ)` (quadratic factors for conjugate pairs); the left null space
/// gives the kernel of the projector.
pub(crate) fn spectral_projector<T: Real>(a: &DMatrix<T>, clusters: &[SpectralCluster<T>]) -> Result<DMatrix<T>> {
    let d = a.nrows();
    let r: usize = clusters.iter().map(|c| c.algebraic).sum();
    if r == 0 {
        return Ok(DMatrix::zeros(d, d));
    }
    if r == d {
        return Ok(DMatrix::identity(d, d));
    }
    let id = DMatrix::<T>::identity(d, d);
    let mut p = id.clone();
    for c in clusters {
        let factor = if c.is_real() {
            a - &id * c.value.re
        } else if c.value.im > T::zero() {
            let two = T::lit(2.0);
            a * a - a * (two * c.value.re) + &id * c.value.norm_sqr()
        } else {
            continue;
        };
        p = factor * p;
        let n = p.norm();
        if n > T::zero() {
            p /= n;
        }
    }
    let (right, within_r, outside_r) = linalg::smallest_right_singular(&p, r);
    let (left, within_l, outside_l) = linalg::smallest_right_singular(&p.transpose(), r);
    let within = within_r.max(within_l);
    let outside = match (outside_r, outside_l) {
        (Some(x), Some(y)) => x.min(y),
        _ => T::one(),
    };
    if !(within <= outside * T::lit(1e-3)) {
        return Err(Error::RankTolAmbiguous {
            value: within.to_f64_lossy(),
            threshold: outside.to_f64_lossy(),
        });
    }
    linalg::oblique_projector(&right, &left).ok_or(Error::NotInvertible {
        smallest: 0.0,
    })
}

/// The peripheral part of the spectrum and the projector `E` onto it.
#[derive(Debug, Clone, Serialize)]
pub struct PeripheralProjector<T: Real> {
    pub spectrum: Vec<SpectralCluster<T>>,
    pub peripheral: Vec<SpectralCluster<T>>,
    /// Spectral radius of `φ` on `ker E`.
    pub decay_radius: T,
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub e: DMatrix<T>,
}

/// `E` as the spectral projection onto eigenvalues with `|λ| ≥ 1 - eps_per`.
pub fn peripheral_idempotent<T: Real>(phi: &UPMap<T>, eps_per: T) -> Result<PeripheralProjector<T>> {
    peripheral_idempotent_of(phi.as_sa_map(), eps_per)
}

pub fn peripheral_idempotent_of<T: Real>(phi: &SaMap<T>, eps_per: T) -> Result<PeripheralProjector<T>> {
    let a = phi.matrix();
    let spectrum = matrix_spectrum(a);
    let edge = T::one() - eps_per;
    let guard = T::one() - eps_per * T::lit(10.0);
    let mut peripheral = Vec::new();
    let mut decay_radius = T::zero();
    for c in &spectrum {
        let m = c.modulus();
        if m >= edge {
            if c.geometric < c.algebraic {
                return Err(Error::PeripheralDefective {
                    re: c.value.re.to_f64_lossy(),
                    im: c.value.im.to_f64_lossy(),
                    algebraic: c.algebraic,
                    geometric: c.geometric,
                });
            }
            peripheral.push(*c);
        } else if m > guard {
            return Err(Error::SpectralGapAmbiguous {
                modulus: m.to_f64_lossy(),
            });
        } else {
            decay_radius = decay_radius.max(m);
        }
    }
    let e = spectral_projector(a, &peripheral)?;
    Ok(PeripheralProjector {
        spectrum,
        peripheral,
        decay_radius,
        e,
    })
}

/// `M∞^sa` as the range of `E`.
pub fn tail_system<T: Real>(shape: &AlgebraShape, e: &DMatrix<T>, policy: &RankPolicy<T>) -> Result<SaSubspace<T>> {
    SaSubspace::from_coord_columns(shape, e, policy)
}

/// Diagnostics of `α = φ|M∞` as an order automorphism.
#[derive(Debug, Clone, Serialize)]
pub struct AutomorphismDiagnostics<T: Real> {
    pub smallest_singular_value: T,
    pub invertible: bool,
    pub cone_samples: usize,
    /// Most negative eigenvalue of `α(y)`, relative to `‖y‖`, over sampled `y ∈ M∞⁺`.
    pub forward_min_eigenvalue: T,
    /// Same for `α⁻¹(y)`.
    pub inverse_min_eigenvalue: T,
    pub preserves_cone: bool,
    /// Largest `| ‖α(x)‖ / ‖x‖ - 1 |` over sampled self-adjoint `x ∈ M∞`.
    pub isometry_defect: T,
    /// Least `k ≤ 64` with `αᵏ = id`, if any.
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictedMap<T: Real> {
    #[serde(serialize_with = "crate::report::ser_matrix")]
    pub matrix: DMatrix<T>,
    pub diagnostics: AutomorphismDiagnostics<T>,
}

pub const CONE_SAMPLES: usize = 256;
const MAX_ORDER: usize = 64;

/// Matrix of `φ|M∞` in the basis of `m_inf`, with cone-sampling
/// diagnostics. The PSD samples of `M∞` are `E(p)` for random `p ⪰ 0`.
pub fn restricted_automorphism<T: Real, R: Rng + ?Sized>(
    phi: &SaMap<T>,
    e: &DMatrix<T>,
    m_inf: &SaSubspace<T>,
    policy: &RankPolicy<T>,
    samples: usize,
    rng: &mut R,
) -> Result<RestrictedMap<T>> {
    let shape = phi.shape();
    let v = m_inf.coords();
    let k = v.ncols();
    let res = v.transpose() * phi.matrix() * v;
    let sigma = linalg::singular_values(&res);
    let smallest = sigma.iter().fold(T::lit(f64::INFINITY), |m, &s| m.min(s));
    let largest = sigma.iter().fold(T::zero(), |m, &s| m.max(s));
    let smallest = if k == 0 { T::one() } else { smallest };
    if k > 0 && smallest <= policy.threshold(largest) {
        return Err(Error::NotInvertible {
            smallest: smallest.to_f64_lossy(),
        });
    }
    let inv = res.clone().try_inverse().ok_or(Error::NotInvertible {
        smallest: smallest.to_f64_lossy(),
    })?;

    let tol = T::lit(1e-8);
    let mut fwd = T::lit(f64::INFINITY);
    let mut bwd = T::lit(f64::INFINITY);
    let mut iso = T::zero();
    for _ in 0..samples {
        if k == 0 {
            break;
        }
        let p = random::random_psd::<T, R>(shape, rng).sa_coords();
        let y = e * p;
        let yc = v.transpose() * &y;
        let norm_y = Element::from_sa_coords(shape, &y).norm(NormKind::Operator);
        if norm_y <= T::zero() {
            continue;
        }
        let fy = Element::from_sa_coords(shape, &(v * (&res * &yc)));
        let by = Element::from_sa_coords(shape, &(v * (&inv * &yc)));
        fwd = fwd.min(fy.min_eigenvalue() / norm_y);
        bwd = bwd.min(by.min_eigenvalue() / norm_y);

        let xc = DVector::from_fn(k, |_, _| T::lit(rng.random::<f64>() * 2.0 - 1.0));
        let x = Element::from_sa_coords(shape, &(v * &xc));
        let nx = x.norm(NormKind::Operator);
        if nx > T::zero() {
            let ax = Element::from_sa_coords(shape, &(v * (&res * &xc)));
            iso = iso.max((ax.norm(NormKind::Operator) / nx - T::one()).abs());
        }
    }
    if !fwd.is_finite() {
        fwd = T::zero();
    }
    if !bwd.is_finite() {
        bwd = T::zero();
    }

    let id = DMatrix::<T>::identity(k, k);
    let mut pow = id.clone();
    let mut order = None;
    if k > 0 {
        for n in 1..=MAX_ORDER {
            pow = &res * pow;
            if linalg::max_abs(&(&pow - &id)) <= tol {
                order = Some(n);
                break;
            }
        }
    }
    Ok(RestrictedMap {
        matrix: res,
        diagnostics: AutomorphismDiagnostics {
            smallest_singular_value: smallest,
            invertible: true,
            cone_samples: samples,
            forward_min_eigenvalue: fwd,
            inverse_min_eigenvalue: bwd,
            preserves_cone: fwd >= -tol && bwd >= -tol,
            isometry_defect: iso,
            order,
        },
    })
}

/// `E((xy + yx)/2)` for `x, y ∈ range E`.
pub fn intrinsic_jordan<T: Real>(e: &SaMap<T>, x: &Element<T>, y: &Element<T>, tol: T) -> Result<Element<T>> {
    for z in [x, y] {
        let ez = e.apply(z)?;
        let residual = (&ez - z).hs_norm();
        if residual > tol * (T::one() + z.hs_norm()) {
            return Err(Error::NotInTail {
                residual: residual.to_f64_lossy(),
            });
        }
    }
    e.apply(&x.jordan_product(y)?)
}

/// `‖φⁿ(x)‖ → 0` forces `x = 0` exactly when `E` is faithful.
pub fn check_decay_condition<T: Real>(e: &SaMap<T>, tol: T) -> bool {
    is_faithful_map(e, tol)
}

/// Power at which `‖φⁿ(I - E)‖` is predicted to be below `1e-9`
/// relative to the decay radius; at least `D` so nilpotent parts are gone.
pub fn decay_power<T: Real>(decay_radius: T, dim: usize) -> usize {
    let r = decay_radius.to_f64_lossy();
    let n = if r <= 0.0 {
        1
    } else {
        ((1e9f64).ln() / (1.0 / r).ln()).ceil() as usize
    };
    n.max(dim).max(1)
}

/// Full asymptotic profile of `φ`.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticProfile<T: Real> {
    pub spectrum: Vec<SpectralCluster<T>>,
    #[serde(serialize_with = "crate::report::ser_complex_list")]
    pub peripheral_eigenvalues: Vec<Cx<T>>,
    pub decay_radius: T,
    #[serde(rename = "E", serialize_with = "crate::report::ser_matrix")]
    pub e: DMatrix<T>,
    pub m_inf: SaSubspace<T>,
    pub restricted: RestrictedMap<T>,
    pub decay_condition: bool,
}

impl<T: Real> AsymptoticProfile<T> {
    pub fn e_map(&self, shape: &AlgebraShape) -> SaMap<T> {
        SaMap::new(shape, self.e.clone()).expect("E has the map's dimension")
    }
}

pub fn asymptotic_profile<T: Real, R: Rng + ?Sized>(
    phi: &UPMap<T>,
    tols: &Tolerances<T>,
    rng: &mut R,
) -> Result<AsymptoticProfile<T>> {
    let policy = tols.rank_policy();
    let pp = peripheral_idempotent(phi, tols.eps_per)?;
    let m_inf = tail_system(phi.shape(), &pp.e, &policy)?;
    let restricted = restricted_automorphism(phi.as_sa_map(), &pp.e, &m_inf, &policy, CONE_SAMPLES, rng)?;
    let e_map = SaMap::new(phi.shape(), pp.e.clone())?;
    let decay_condition = check_decay_condition(&e_map, tols.rank);
    Ok(AsymptoticProfile {
        peripheral_eigenvalues: pp.peripheral.iter().map(|c| c.value).collect(),
        spectrum: pp.spectrum,
        decay_radius: pp.decay_radius,
        e: pp.e,
        m_inf,
        restricted,
        decay_condition,
    })
}
