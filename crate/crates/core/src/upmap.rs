//! Unital positive maps represented on self-adjoint coordinates, their
//! certificates, duality and faithfulness.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraShape, Element, NormKind};
use crate::error::{Error, Result};
use crate::random;
use crate::scalar::{cre, Cx, Real};

/// Unitality tolerance applied when building maps.
pub const UNITAL_TOL: f64 = 1e-10;

/// A hermiticity-preserving linear map, as a real `D x D` matrix on the
/// canonical self-adjoint coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SaMap<T: Real> {
    shape: AlgebraShape,
    matrix: DMatrix<T>,
}

impl<T: Real> SaMap<T> {
    pub fn new(shape: &AlgebraShape, matrix: DMatrix<T>) -> Result<Self> {
        let d = shape.dim();
        if matrix.shape() != (d, d) {
            return Err(Error::BlockMismatch(format!(
                "map matrix is {}x{}, algebra dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            shape: shape.clone(),
            matrix,
        })
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let d = shape.dim();
        Self {
            shape: shape.clone(),
            matrix: DMatrix::identity(d, d),
        }
    }

    /// Builds the coordinate matrix from the action on the canonical basis.
    /// `f` must map self-adjoint elements to self-adjoint elements.
    pub fn from_fn(shape: &AlgebraShape, f: impl Fn(&Element<T>) -> Element<T>) -> Self {
        let d = shape.dim();
        let mut matrix = DMatrix::zeros(d, d);
        for k in 0..d {
            let img = f(&Element::basis_element(shape, k));
            matrix.set_column(k, &img.sa_coords());
        }
        Self {
            shape: shape.clone(),
            matrix,
        }
    }

    /// Blockwise transpose `x ↦ xᵀ`.
    pub fn transpose_map(shape: &AlgebraShape) -> Self {
        Self::from_fn(shape, |x| x.transpose())
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn apply_coords(&self, v: &DVector<T>) -> DVector<T> {
        &self.matrix * v
    }

    /// Applies the map to an arbitrary element through its Hermitian parts.
    pub fn apply(&self, x: &Element<T>) -> Result<Element<T>> {
        self.shape.ensure_same(x.shape())?;
        let (h, k) = x.hermitian_parts();
        let fh = Element::from_sa_coords(&self.shape, &self.apply_coords(&h.sa_coords()));
        if k.hs_norm() == T::zero() {
            return Ok(fh);
        }
        let fk = Element::from_sa_coords(&self.shape, &self.apply_coords(&k.sa_coords()));
        Ok(&fh + &fk.scale_complex(crate::scalar::cx(T::zero(), T::one())))
    }

    /// Hilbert–Schmidt adjoint; on orthonormal real coordinates it is the transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            matrix: self.matrix.transpose(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Self {
            shape: self.shape.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn power(&self, n: u32) -> Self {
        let d = self.shape.dim();
        let mut acc = DMatrix::identity(d, d);
        let mut base = self.matrix.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Self {
            shape: self.shape.clone(),
            matrix: acc,
        }
    }

    /// HS norm of `L(𝟏) - 𝟏`.
    pub fn unital_residual(&self) -> T {
        let u = Element::<T>::unit(&self.shape).sa_coords();
        (self.apply_coords(&u) - u).norm()
    }

    /// The density of the functional `tr ∘ L`, i.e. `L†(𝟏)`.
    pub fn trace_density(&self) -> Element<T> {
        let u = Element::<T>::unit(&self.shape).sa_coords();
        Element::from_sa_coords(&self.shape, &(self.matrix.transpose() * u))
    }
}

/// `L` is faithful iff `L†(𝟏)` is positive definite, since `tr ∘ L` is then a
/// faithful positive functional and `tr` is faithful.
pub fn is_faithful_map<T: Real>(map: &SaMap<T>, tol: T) -> bool {
    faithfulness_margin(map, tol).0
}

/// `(faithful, min eigenvalue of L†(𝟏))`.
pub fn faithfulness_margin<T: Real>(map: &SaMap<T>, tol: T) -> (bool, T) {
    let density = map.trace_density();
    let min = density.min_eigenvalue();
    let scale = T::one().max(density.norm(NormKind::Operator));
    (min > tol * scale, min)
}

/// Kraus operators `A_k : C^{n_from} → C^{n_to}` realizing
/// `φ(x)_to += Σ_k A_k x_from A_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily<T: Real> {
    pub from: usize,
    pub to: usize,
    pub ops: Vec<DMatrix<Cx<T>>>,
}

/// Construction payload; it doubles as the positivity certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec<T: Real> {
    /// Row-stochastic matrix acting on column vectors of `C^d`.
    Stochastic(DMatrix<T>),
    Kraus(Vec<KrausFamily<T>>),
    /// Blockwise transpose applied after a Kraus map.
    KrausTranspose(Vec<KrausFamily<T>>),
    Mix(Vec<(T, MapSpec<T>)>),
    /// Any unital coordinate matrix; positivity is not verified.
    Asserted(DMatrix<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertMode {
    Stochastic,
    CpKraus,
    CpComposedTranspose,
    ConvexMix,
    Asserted,
}

impl<T: Real> MapSpec<T> {
    pub fn mode(&self) -> CertMode {
        match self {
            MapSpec::Stochastic(_) => CertMode::Stochastic,
            MapSpec::Kraus(_) => CertMode::CpKraus,
            MapSpec::KrausTranspose(_) => CertMode::CpComposedTranspose,
            MapSpec::Mix(_) => CertMode::ConvexMix,
            MapSpec::Asserted(_) => CertMode::Asserted,
        }
    }

    /// True when positivity follows from the payload itself.
    pub fn positivity_certified(&self) -> bool {
        match self {
            MapSpec::Asserted(_) => false,
            MapSpec::Mix(parts) => parts.iter().all(|(_, s)| s.positivity_certified()),
            _ => true,
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            MapSpec::Stochastic(_) => "stochastic",
            MapSpec::Kraus(_) => "kraus",
            MapSpec::KrausTranspose(_) => "kraus_transpose",
            MapSpec::Mix(_) => "mix",
            MapSpec::Asserted(_) => "asserted",
        }
    }
}

/// A unital positive map with the payload that certifies (or asserts) it.
#[derive(Debug, Clone, PartialEq)]
pub struct UPMap<T: Real> {
    map: SaMap<T>,
    spec: MapSpec<T>,
}

impl<T: Real> UPMap<T> {
    pub fn shape(&self) -> &AlgebraShape {
        self.map.shape()
    }

    pub fn as_sa_map(&self) -> &SaMap<T> {
        &self.map
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        self.map.matrix()
    }

    pub fn spec(&self) -> &MapSpec<T> {
        &self.spec
    }

    pub fn cert_mode(&self) -> CertMode {
        self.spec.mode()
    }

    pub fn positivity_certified(&self) -> bool {
        self.spec.positivity_certified()
    }

    pub fn apply(&self, x: &Element<T>) -> Result<Element<T>> {
        self.map.apply(x)
    }

    pub fn adjoint(&self) -> SaMap<T> {
        self.map.adjoint()
    }

    pub fn faithfulness(&self, tol: T) -> FaithfulCheck<T> {
        let (faithful, min_eigenvalue) = faithfulness_margin(&self.map, tol);
        FaithfulCheck {
            faithful,
            min_eigenvalue,
            not_certified_positive: !self.positivity_certified(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FaithfulCheck<T> {
    pub faithful: bool,
    pub min_eigenvalue: T,
    /// Warning flag: the map is only asserted positive.
    pub not_certified_positive: bool,
}

fn stochastic_matrix<T: Real>(shape: &AlgebraShape, p: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !shape.is_commutative() {
        return Err(Error::BlockMismatch(
            "stochastic maps require all blocks to be 1x1".into(),
        ));
    }
    let d = shape.dim();
    if p.shape() != (d, d) {
        return Err(Error::BlockMismatch(format!(
            "stochastic matrix is {}x{}, expected {d}x{d}",
            p.nrows(),
            p.ncols()
        )));
    }
    for r in 0..d {
        for c in 0..d {
            if p[(r, c)] < T::zero() || !p[(r, c)].is_finite() {
                return Err(Error::NegativeEntry {
                    row: r,
                    col: c,
                    value: p[(r, c)].to_f64_lossy(),
                });
            }
        }
    }
    // 1x1 blocks: the canonical coordinates are exactly the function values.
    Ok(p.clone())
}

fn kraus_matrix<T: Real>(shape: &AlgebraShape, families: &[KrausFamily<T>]) -> Result<DMatrix<T>> {
    let dims = shape.block_dims();
    for f in families {
        if f.from >= dims.len() || f.to >= dims.len() {
            return Err(Error::BlockMismatch(format!(
                "Kraus family {}→{} references a missing block",
                f.from, f.to
            )));
        }
        for a in &f.ops {
            if a.nrows() != dims[f.to] || a.ncols() != dims[f.from] {
                return Err(Error::BlockMismatch(format!(
                    "Kraus operator for {}→{} is {}x{}, expected {}x{}",
                    f.from,
                    f.to,
                    a.nrows(),
                    a.ncols(),
                    dims[f.to],
                    dims[f.from]
                )));
            }
        }
    }
    for (t, &n) in dims.iter().enumerate() {
        let mut acc = DMatrix::<Cx<T>>::zeros(n, n);
        for f in families.iter().filter(|f| f.to == t) {
            for a in &f.ops {
                acc += a * a.adjoint();
            }
        }
        let resid = (acc - DMatrix::<Cx<T>>::identity(n, n)).norm();
        if resid > T::lit(UNITAL_TOL) {
            return Err(Error::KrausNotUnital {
                block: t,
                residual: resid.to_f64_lossy(),
            });
        }
    }
    let map = SaMap::from_fn(shape, |x| {
        let mut blocks: Vec<DMatrix<Cx<T>>> =
            dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for f in families {
            let src = x.block(f.from);
            for a in &f.ops {
                blocks[f.to] += a * src * a.adjoint();
            }
        }
        Element::from_blocks(shape, blocks).expect("block sizes checked")
    });
    Ok(map.matrix)
}

fn spec_matrix<T: Real>(shape: &AlgebraShape, spec: &MapSpec<T>) -> Result<DMatrix<T>> {
    match spec {
        MapSpec::Stochastic(p) => stochastic_matrix(shape, p),
        MapSpec::Kraus(f) => kraus_matrix(shape, f),
        MapSpec::KrausTranspose(f) => {
            let k = kraus_matrix(shape, f)?;
            Ok(SaMap::<T>::transpose_map(shape).matrix * k)
        }
        MapSpec::Mix(parts) => {
            if parts.is_empty() {
                return Err(Error::NotUnital {
                    residual: f64::INFINITY,
                });
            }
            let d = shape.dim();
            let mut acc = DMatrix::zeros(d, d);
            let mut total = T::zero();
            for (w, s) in parts {
                if *w < T::zero() {
                    return Err(Error::NegativeEntry {
                        row: 0,
                        col: 0,
                        value: w.to_f64_lossy(),
                    });
                }
                total += *w;
                acc += spec_matrix(shape, s)? * *w;
            }
            if (total - T::one()).abs() > T::lit(UNITAL_TOL) {
                return Err(Error::NotUnital {
                    residual: (total - T::one()).abs().to_f64_lossy(),
                });
            }
            Ok(acc)
        }
        MapSpec::Asserted(m) => {
            let d = shape.dim();
            if m.shape() != (d, d) {
                return Err(Error::BlockMismatch(format!(
                    "asserted matrix is {}x{}, expected {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(m.clone())
        }
    }
}

/// Builds and checks a unital positive map from its payload.
pub fn build_map<T: Real>(shape: &AlgebraShape, spec: MapSpec<T>) -> Result<UPMap<T>> {
    let matrix = spec_matrix(shape, &spec)?;
    let map = SaMap::new(shape, matrix)?;
    let resid = map.unital_residual();
    if !(resid <= T::lit(UNITAL_TOL)) {
        return Err(Error::NotUnital {
            residual: resid.to_f64_lossy(),
        });
    }
    Ok(UPMap { map, spec })
}

/// Result of checking a positivity certificate.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateCheck<T> {
    pub mode: CertMode,
    pub passed: bool,
    /// Stochastic: worst row-sum defect. Kraus: worst unitality defect.
    pub unitality_defect: T,
    /// Stochastic: smallest entry. Kraus: smallest Choi eigenvalue.
    pub min_witness: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics<T> {
    pub unital_residual: T,
    pub unital: bool,
    pub certificate: Option<CertificateCheck<T>>,
    pub positivity_certified: bool,
    /// Most negative eigenvalue of `φ(p)` over sampled PSD `p` with `‖p‖ = 1`.
    pub sampled_min_output_eigenvalue: Option<T>,
    pub sampled_positive: bool,
    /// Largest sampled `‖φ(x)‖ / ‖x‖` over self-adjoint `x`.
    pub contraction_ratio: T,
    pub sa_contraction: bool,
    pub passed: bool,
}

fn choi_min_eigenvalue<T: Real>(family: &KrausFamily<T>, n_from: usize, n_to: usize) -> T {
    let size = n_from * n_to;
    let mut choi = DMatrix::<Cx<T>>::zeros(size, size);
    for i in 0..n_from {
        for j in 0..n_from {
            let mut eij = DMatrix::<Cx<T>>::zeros(n_from, n_from);
            eij[(i, j)] = cre(T::one());
            let mut img = DMatrix::<Cx<T>>::zeros(n_to, n_to);
            for a in &family.ops {
                img += a * &eij * a.adjoint();
            }
            choi.view_mut((i * n_to, j * n_to), (n_to, n_to)).copy_from(&img);
        }
    }
    let eig = SymmetricEigen::new(choi);
    eig.eigenvalues
        .iter()
        .fold(T::lit(f64::INFINITY), |m, &v| m.min(v))
}

fn check_certificate<T: Real>(shape: &AlgebraShape, spec: &MapSpec<T>, tol: T) -> Option<CertificateCheck<T>> {
    let dims = shape.block_dims();
    match spec {
        MapSpec::Stochastic(p) => {
            let mut defect = T::zero();
            let mut min_entry = T::lit(f64::INFINITY);
            for r in 0..p.nrows() {
                let s = p.row(r).iter().fold(T::zero(), |a, &v| a + v);
                defect = defect.max((s - T::one()).abs());
                for &v in p.row(r).iter() {
                    min_entry = min_entry.min(v);
                }
            }
            Some(CertificateCheck {
                mode: CertMode::Stochastic,
                passed: defect <= tol && min_entry >= T::zero(),
                unitality_defect: defect,
                min_witness: min_entry,
            })
        }
        MapSpec::Kraus(fams) | MapSpec::KrausTranspose(fams) => {
            let mut defect = T::zero();
            for (t, &n) in dims.iter().enumerate() {
                let mut acc = DMatrix::<Cx<T>>::zeros(n, n);
                for f in fams.iter().filter(|f| f.to == t) {
                    for a in &f.ops {
                        acc += a * a.adjoint();
                    }
                }
                defect = defect.max((acc - DMatrix::<Cx<T>>::identity(n, n)).norm());
            }
            let min_choi = fams
                .iter()
                .map(|f| choi_min_eigenvalue(f, dims[f.from], dims[f.to]))
                .fold(T::lit(f64::INFINITY), |m, v| m.min(v));
            let min_choi = if min_choi.is_finite() { min_choi } else { T::zero() };
            Some(CertificateCheck {
                mode: spec.mode(),
                passed: defect <= tol && min_choi >= -tol,
                unitality_defect: defect,
                min_witness: min_choi,
            })
        }
        MapSpec::Mix(parts) => {
            let mut passed = true;
            let mut defect = T::zero();
            let mut min_w = T::lit(f64::INFINITY);
            let total = parts.iter().fold(T::zero(), |a, (w, _)| a + *w);
            defect = defect.max((total - T::one()).abs());
            for (w, s) in parts {
                min_w = min_w.min(*w);
                match check_certificate(shape, s, tol) {
                    Some(c) => {
                        passed &= c.passed;
                        defect = defect.max(c.unitality_defect);
                        min_w = min_w.min(c.min_witness);
                    }
                    None => passed = false,
                }
            }
            Some(CertificateCheck {
                mode: CertMode::ConvexMix,
                passed: passed && defect <= tol && min_w >= -tol,
                unitality_defect: defect,
                min_witness: min_w,
            })
        }
        MapSpec::Asserted(_) => None,
    }
}

/// Unitality, certificate and sampled positivity/contraction diagnostics.
pub fn validate_up<T: Real, R: Rng + ?Sized>(
    phi: &UPMap<T>,
    samples: usize,
    tol: T,
    rng: &mut R,
) -> Diagnostics<T> {
    let shape = phi.shape();
    let unital_residual = phi.map.unital_residual();
    let unital = unital_residual <= tol.max(T::lit(UNITAL_TOL));
    let certificate = check_certificate(shape, &phi.spec, tol);
    let positivity_certified = phi.positivity_certified();

    let mut min_out = None;
    let mut sampled_positive = true;
    if !positivity_certified {
        let mut worst = T::lit(f64::INFINITY);
        for _ in 0..samples {
            let p = random::random_psd(shape, rng);
            let scale = p.norm(NormKind::Operator);
            let img = phi.apply(&p).expect("same shape");
            worst = worst.min(img.min_eigenvalue() / scale);
        }
        if samples > 0 {
            sampled_positive = worst >= -tol;
            min_out = Some(worst);
        }
    }

    let mut ratio = T::zero();
    for _ in 0..samples {
        let x = random::random_sa(shape, rng);
        let nx = x.norm(NormKind::Operator);
        if nx > T::zero() {
            let img = phi.apply(&x).expect("same shape");
            ratio = ratio.max(img.norm(NormKind::Operator) / nx);
        }
    }
    let sa_contraction = ratio <= T::one() + tol;
    let cert_ok = certificate.as_ref().is_none_or(|c| c.passed);
    Diagnostics {
        unital_residual,
        unital,
        certificate,
        positivity_certified,
        sampled_min_output_eigenvalue: min_out,
        sampled_positive,
        contraction_ratio: ratio,
        sa_contraction,
        passed: unital && cert_ok && sampled_positive && sa_contraction,
    }
}

/// A functional `x ↦ ⟨R, x⟩_HS` represented by its self-adjoint density `R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaFunctional<T: Real> {
    pub density: Element<T>,
}

impl<T: Real> SaFunctional<T> {
    pub fn new(density: Element<T>, tol: T) -> Result<Self> {
        density.ensure_self_adjoint(tol)?;
        Ok(Self { density })
    }

    pub fn from_coords(shape: &AlgebraShape, v: &DVector<T>) -> Self {
        Self {
            density: Element::from_sa_coords(shape, v),
        }
    }

    pub fn evaluate(&self, x: &Element<T>) -> Result<Cx<T>> {
        self.density.hs_inner(x)
    }

    pub fn is_state(&self, tol: T) -> bool {
        self.density.is_psd(tol) && (self.density.trace().re - T::one()).abs() <= tol
    }

    /// Norm over the self-adjoint unit ball: the trace norm of the density.
    pub fn sa_norm(&self) -> T {
        self.density.norm(NormKind::Trace)
    }
}

/// Norm of `x ↦ ⟨R, x⟩` restricted to self-adjoint operators of norm ≤ 1.
pub fn sa_functional_norm<T: Real>(r: &SaFunctional<T>, tol: T) -> Result<T> {
    r.density.ensure_self_adjoint(tol)?;
    Ok(r.sa_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn three_state_matrix() -> DMatrix<f64> {
        let t = 1.0 / 3.0;
        DMatrix::from_row_slice(3, 3, &[t, t, t, 0., 0., 1., 0., 1., 0.])
    }

    fn c3() -> AlgebraShape {
        AlgebraShape::commutative(3).unwrap()
    }

    fn lambda_map(l: f64) -> UPMap<f64> {
        let s = AlgebraShape::full(2).unwrap();
        build_map(&s, MapSpec::Asserted(DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, l, l, 1.0]))))
            .unwrap()
    }

    #[test]
    fn stochastic_build_and_apply() {
        let phi = build_map(&c3(), MapSpec::Stochastic(three_state_matrix())).unwrap();
        let y = phi.apply(&Element::from_function(&[3.0, 0.0, 0.0])).unwrap();
        assert!(y.max_abs_diff(&Element::from_function(&[1.0, 0.0, 0.0])) < 1e-15);
        assert_eq!(phi.cert_mode(), CertMode::Stochastic);
    }

    #[test]
    fn identity_kraus() {
        let s = AlgebraShape::full(2).unwrap();
        let fam = KrausFamily { from: 0, to: 0, ops: vec![DMatrix::identity(2, 2)] };
        let phi = build_map(&s, MapSpec::Kraus(vec![fam])).unwrap();
        assert!((phi.matrix() - DMatrix::<f64>::identity(4, 4)).norm() < 1e-15);
        let x = Element::from_blocks(
            &s,
            vec![DMatrix::from_row_slice(2, 2, &[cx(1., 2.), cx(0., 1.), cx(3., 0.), cx(-1., 0.)])],
        )
        .unwrap();
        assert!(phi.apply(&x).unwrap().max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn lambda_map_is_kraus_certifiable() {
        let l = 0.5;
        let s = AlgebraShape::full(2).unwrap();
        let a = DMatrix::<Cx<f64>>::identity(2, 2) * cre(((1.0 + l) / 2.0_f64).sqrt());
        let mut z = DMatrix::<Cx<f64>>::zeros(2, 2);
        z[(0, 0)] = cre(((1.0 - l) / 2.0_f64).sqrt());
        z[(1, 1)] = cre(-((1.0 - l) / 2.0_f64).sqrt());
        let phi = build_map(&s, MapSpec::Kraus(vec![KrausFamily { from: 0, to: 0, ops: vec![a, z] }])).unwrap();
        assert!((phi.matrix() - lambda_map(l).matrix()).norm() < 1e-14);
        let sx = Element::from_blocks(
            &s,
            vec![DMatrix::from_row_slice(2, 2, &[cre(0.), cre(1.), cre(1.), cre(0.)])],
        )
        .unwrap();
        let img = lambda_map(l).apply(&sx).unwrap();
        assert!(img.max_abs_diff(&sx.scale(0.5)) < 1e-15);
    }

    #[test]
    fn build_errors() {
        let mut bad = three_state_matrix();
        bad[(0, 0)] = -0.1;
        bad[(0, 1)] = 0.7666666666666667;
        assert_eq!(build_map(&c3(), MapSpec::Stochastic(bad)).unwrap_err().code(), "NEGATIVE_ENTRY");
        let mut nonunital = three_state_matrix();
        nonunital[(1, 2)] = 0.5;
        assert_eq!(build_map(&c3(), MapSpec::Stochastic(nonunital)).unwrap_err().code(), "NOT_UNITAL");
        let s = AlgebraShape::full(2).unwrap();
        let fam = KrausFamily { from: 0, to: 0, ops: vec![DMatrix::identity(2, 2) * cre(0.5)] };
        assert_eq!(build_map(&s, MapSpec::Kraus(vec![fam])).unwrap_err().code(), "KRAUS_NOT_UNITAL");
        let fam = KrausFamily { from: 0, to: 1, ops: vec![DMatrix::<Cx<f64>>::identity(2, 2)] };
        assert_eq!(build_map(&s, MapSpec::Kraus(vec![fam])).unwrap_err().code(), "BLOCK_MISMATCH");
        assert_eq!(
            build_map(&s, MapSpec::Stochastic(DMatrix::<f64>::identity(4, 4))).unwrap_err().code(),
            "BLOCK_MISMATCH"
        );
    }

    #[test]
    fn adjoint_examples() {
        let phi = build_map(&c3(), MapSpec::Stochastic(three_state_matrix())).unwrap();
        let adj = phi.adjoint();
        assert_eq!(adj.matrix(), &three_state_matrix().transpose());
        let r = DVector::from_column_slice(&[0.0, 0.5, 0.5]);
        assert!((adj.apply_coords(&r) - &r).norm() < 1e-15);
        assert_eq!(&adj.adjoint(), phi.as_sa_map());
        let id = SaMap::<f64>::identity(&c3());
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn faithful_examples() {
        let phi = build_map(&c3(), MapSpec::Stochastic(three_state_matrix())).unwrap();
        let density = phi.as_sa_map().trace_density();
        assert!(density.max_abs_diff(&Element::from_function(&[1. / 3., 4. / 3., 4. / 3.])) < 1e-15);
        assert!(is_faithful_map(phi.as_sa_map(), 1e-9));
        let c2 = AlgebraShape::commutative(2).unwrap();
        let first = build_map(&c2, MapSpec::Stochastic(DMatrix::from_row_slice(2, 2, &[1., 0., 1., 0.]))).unwrap();
        assert!(!is_faithful_map(first.as_sa_map(), 1e-9));
        let swap = build_map(&c2, MapSpec::Stochastic(DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.]))).unwrap();
        assert!(is_faithful_map(swap.as_sa_map(), 1e-9));
        assert!(lambda_map(0.5).faithfulness(1e-9).not_certified_positive);
    }

    #[test]
    fn validate_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = build_map(&c3(), MapSpec::Stochastic(three_state_matrix())).unwrap();
        let d = validate_up(&phi, 64, 1e-9, &mut rng);
        assert!(d.passed, "{d:?}");
        let id = build_map(&c3(), MapSpec::Stochastic(DMatrix::<f64>::identity(3, 3))).unwrap();
        let d = validate_up(&id, 64, 1e-9, &mut rng);
        assert!(d.passed && d.unital_residual == 0.0);
        assert_eq!(d.certificate.unwrap().unitality_defect, 0.0);
    }

    #[test]
    fn reduction_map_passes_sampling() {
        let s = AlgebraShape::full(2).unwrap();
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[0., 0., 0., 1., 0., -1., 0., 0., 0., 0., -1., 0., 1., 0., 0., 0.],
        );
        let phi = build_map(&s, MapSpec::Asserted(m)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = validate_up(&phi, 256, 1e-9, &mut rng);
        assert!(d.passed, "{d:?}");
        assert!(d.sampled_min_output_eigenvalue.is_some());
    }

    #[test]
    fn functional_norm_examples() {
        let s = AlgebraShape::full(2).unwrap();
        let r = SaFunctional::new(Element::<f64>::diagonal(&s, &[1.0, -1.0]).unwrap(), 1e-9).unwrap();
        assert!((sa_functional_norm(&r, 1e-9).unwrap() - 2.0).abs() < 1e-14);
        let z = SaFunctional::new(Element::<f64>::zeros(&s), 1e-9).unwrap();
        assert_eq!(sa_functional_norm(&z, 1e-9).unwrap(), 0.0);
        let c = SaFunctional::new(Element::<f64>::from_function(&[0.5, -1. / 3., 1. / 6.]), 1e-9).unwrap();
        assert!((sa_functional_norm(&c, 1e-9).unwrap() - 1.0).abs() < 1e-14);
    }
}
