//! Asymptotic structure of unital positive maps on finite-dimensional
//! *-algebras.
//!
//! A map `φ` on `M = M_{n_1} ⊕ … ⊕ M_{n_B}` is held as a real matrix on
//! self-adjoint coordinates. From it the crate computes the idempotent
//! power limit `E`, the tail system `M∞ = range E`, the definite set,
//! the multiplicative core `C_φ`, invariant states and the Jordan
//! structure of `M∞`, and checks the relations between them.
//!
//! All numerics are generic over [`Real`]; the `*64` aliases below fix `f64`.

pub mod algebra;
pub mod asymptotics;
pub mod config;
pub mod corestruct;
pub mod error;
pub mod golden;
pub mod linalg;
pub mod oracle;
pub mod random;
pub mod report;
pub mod scalar;
pub mod schema;
pub mod states;
pub mod upmap;
pub mod verify;

pub use algebra::{AlgebraShape, Element, NormKind, SaSubspace};
pub use config::Tolerances;
pub use error::{Error, ErrorClass, Result};
pub use scalar::Real;
pub use upmap::{build_map, MapSpec, SaFunctional, SaMap, UPMap};

pub type Element64 = Element<f64>;
pub type SaSubspace64 = SaSubspace<f64>;
pub type SaMap64 = SaMap<f64>;
pub type UPMap64 = UPMap<f64>;
pub type MapSpec64 = MapSpec<f64>;
pub type SaFunctional64 = SaFunctional<f64>;
pub type Tolerances64 = Tolerances<f64>;
pub type AsymptoticProfile64 = asymptotics::AsymptoticProfile<f64>;
pub type CoreReport64 = corestruct::CoreReport<f64>;
pub type StateReport64 = states::StateReport<f64>;
pub type AnalysisReport64 = report::AnalysisReport<f64>;

/// Version string embedded in every report.
pub const TOOL_VERSION: &str = concat!("tailcore ", env!("CARGO_PKG_VERSION"));
