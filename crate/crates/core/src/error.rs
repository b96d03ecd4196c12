use thiserror::Error;

/// Broad class of a failure; the CLI maps these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input is malformed or violates a documented precondition.
    Input,
    /// A tolerance decision could not be made reliably.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("BLOCK_MISMATCH: {0}")]
    BlockMismatch(String),
    #[error("NOT_SELF_ADJOINT: residual {residual:e} exceeds tolerance")]
    NotSelfAdjoint { residual: f64 },
    #[error("NOT_UNITAL: unit residual {residual:e}")]
    NotUnital { residual: f64 },
    #[error("NEGATIVE_ENTRY: stochastic entry ({row}, {col}) = {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("KRAUS_NOT_UNITAL: target block {block} has residual {residual:e}")]
    KrausNotUnital { block: usize, residual: f64 },
    #[error("RANK_TOL_AMBIGUOUS: singular value {value:e} is within a decade of threshold {threshold:e}")]
    RankTolAmbiguous { value: f64, threshold: f64 },
    #[error("PERIPHERAL_DEFECTIVE: eigenvalue {re}+{im}i has algebraic multiplicity {algebraic} but geometric {geometric}")]
    PeripheralDefective {
        re: f64,
        im: f64,
        algebraic: usize,
        geometric: usize,
    },
    #[error("SPECTRAL_GAP_AMBIGUOUS: eigenvalue modulus {modulus} lies inside the peripheral guard band")]
    SpectralGapAmbiguous { modulus: f64 },
    #[error("NOT_INVERTIBLE: smallest singular value {smallest:e} of the restricted map")]
    NotInvertible { smallest: f64 },
    #[error("NOT_IN_TAIL: operand is not in the tail system (residual {residual:e})")]
    NotInTail { residual: f64 },
    #[error("GRAM_NOT_PSD: minimum eigenvalue {min_eigenvalue:e} of a Schwarz-defect Gram matrix")]
    GramNotPsd { min_eigenvalue: f64 },
    #[error("ITERATION_OVERFLOW: {what} did not stabilize within {steps} steps")]
    IterationOverflow { what: &'static str, steps: usize },
    #[error("NO_UNIT_EIGENVALUE: adjoint has no eigenvalue at 1")]
    NoUnitEigenvalue,
    #[error("NOT_JORDAN_CLOSED: subspace is not closed under the Jordan product")]
    NotJordanClosed,
    #[error("NOT_CONVERGED: |a_n - limit| = {gap:e} after {n_max} steps")]
    NotConverged { gap: f64, n_max: usize },
    #[error("SCHEMA: {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("VALIDATION_FAILED: {0}")]
    ValidationFailed(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::BlockMismatch(_)
            | Error::NotSelfAdjoint { .. }
            | Error::NotUnital { .. }
            | Error::NegativeEntry { .. }
            | Error::KrausNotUnital { .. }
            | Error::NotInTail { .. }
            | Error::NotJordanClosed
            | Error::Schema { .. }
            | Error::ValidationFailed(_)
            | Error::InvalidShape(_) => ErrorClass::Input,
            Error::RankTolAmbiguous { .. }
            | Error::PeripheralDefective { .. }
            | Error::SpectralGapAmbiguous { .. }
            | Error::NotInvertible { .. }
            | Error::GramNotPsd { .. }
            | Error::IterationOverflow { .. }
            | Error::NoUnitEigenvalue
            | Error::NotConverged { .. } => ErrorClass::Numerical,
        }
    }

    /// Stable upper-case code, as printed at the start of the message.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BlockMismatch(_) => "BLOCK_MISMATCH",
            Error::NotSelfAdjoint { .. } => "NOT_SELF_ADJOINT",
            Error::NotUnital { .. } => "NOT_UNITAL",
            Error::NegativeEntry { .. } => "NEGATIVE_ENTRY",
            Error::KrausNotUnital { .. } => "KRAUS_NOT_UNITAL",
            Error::RankTolAmbiguous { .. } => "RANK_TOL_AMBIGUOUS",
            Error::PeripheralDefective { .. } => "PERIPHERAL_DEFECTIVE",
            Error::SpectralGapAmbiguous { .. } => "SPECTRAL_GAP_AMBIGUOUS",
            Error::NotInvertible { .. } => "NOT_INVERTIBLE",
            Error::NotInTail { .. } => "NOT_IN_TAIL",
            Error::GramNotPsd { .. } => "GRAM_NOT_PSD",
            Error::IterationOverflow { .. } => "ITERATION_OVERFLOW",
            Error::NoUnitEigenvalue => "NO_UNIT_EIGENVALUE",
            Error::NotJordanClosed => "NOT_JORDAN_CLOSED",
            Error::NotConverged { .. } => "NOT_CONVERGED",
            Error::Schema { .. } => "SCHEMA",
            Error::ValidationFailed(_) => "VALIDATION_FAILED",
            Error::InvalidShape(_) => "INVALID_SHAPE",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
