use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block structure of a finite-dimensional *-algebra `M_{n_1} ⊕ … ⊕ M_{n_B}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraShape {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidShape("at least one block is required".into()));
        }
        if let Some(i) = block_dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("block {i} has size 0")));
        }
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut at = 0;
        for &n in &block_dims {
            offsets.push(at);
            at += n * n;
        }
        Ok(Self {
            block_dims,
            offsets,
        })
    }

    /// The commutative algebra `C^d`.
    pub fn commutative(d: usize) -> Result<Self> {
        Self::new(vec![1; d])
    }

    /// A single full matrix block `M_n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Complex dimension `D = Σ n_i²`, which is also the self-adjoint real dimension.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    /// Size `Σ n_i` of the ambient matrix algebra, i.e. the trace of the unit.
    pub fn ambient_size(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&n| n == 1)
    }

    /// First self-adjoint coordinate belonging to block `b`.
    pub fn offset(&self, b: usize) -> usize {
        self.offsets[b]
    }

    pub(crate) fn ensure_same(&self, other: &AlgebraShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BlockMismatch(format!(
                "{:?} vs {:?}",
                self.block_dims, other.block_dims
            )))
        }
    }
}

impl TryFrom<Vec<usize>> for AlgebraShape {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AlgebraShape> for Vec<usize> {
    fn from(s: AlgebraShape) -> Self {
        s.block_dims
    }
}
