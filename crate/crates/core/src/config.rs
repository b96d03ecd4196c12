use serde::Serialize;

use crate::linalg::RankPolicy;
use crate::scalar::Real;

/// Numerical tolerances threaded through the analysis pipeline.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances<T> {
    /// Relative rank / subspace tolerance.
    pub rank: T,
    /// Absolute floor under the relative rank threshold.
    pub rank_floor: T,
    /// Relative residual allowed for subspace membership and equality.
    pub membership: T,
    /// Eigenvalues with `|λ| ≥ 1 - eps_per` are peripheral.
    pub eps_per: T,
    /// Length of norm-convergence sequences.
    pub n_max: usize,
    /// Tolerance for norm-convergence statements.
    pub conv: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rank: T::lit(1e-9),
            rank_floor: T::lit(1e-12),
            membership: T::lit(1e-7),
            eps_per: T::lit(1e-8),
            n_max: 512,
            conv: T::lit(1e-6),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn rank_policy(&self) -> RankPolicy<T> {
        RankPolicy {
            rel: self.rank,
            floor: self.rank_floor,
        }
    }
}
