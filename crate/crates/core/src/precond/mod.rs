//! Preconditioners `M ≈ A` applied as `z = M⁻¹ r` and `z = M⁻ᴴ r`.

pub mod ilu;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use ilu::{ilu0_factorize_demoted, IluFactors, MixedIlu0};

use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrecondError {
    #[error("structurally missing diagonal entry in row {row}")]
    MissingDiagonal { row: usize },
    #[error("zero pivot at step {row}")]
    SingularPivot { row: usize },
    #[error("non-finite value during {stage} at index {index}")]
    NumericBreakdown { stage: &'static str, index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub trait Preconditioner<S: Scalar>: Send + Sync {
    /// `z = M⁻¹ r`.
    fn apply(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError>;
    /// `z = M⁻ᴴ r`.
    fn apply_adjoint(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError>;
}

/// `M = I`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl<S: Scalar> Preconditioner<S> for Identity {
    fn apply(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        if r.len() != z.len() {
            return Err(PrecondError::DimensionMismatch {
                expected: r.len(),
                found: z.len(),
            });
        }
        z.copy_from_slice(r);
        Ok(())
    }

    fn apply_adjoint(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        self.apply(r, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecondMode {
    None,
    /// ILU(0) factors and sweeps in the working precision.
    Ilu0,
    /// ILU(0) factors and sweeps in binary64.
    Ilu0Mixed,
}

impl PrecondMode {
    pub const ALL: [PrecondMode; 3] = [Self::None, Self::Ilu0, Self::Ilu0Mixed];

    pub const fn label(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Ilu0 => "ilu0",
            Self::Ilu0Mixed => "ilu0_mixed",
        }
    }

    /// Builds the preconditioner for `a`.
    pub fn build<S: Scalar>(
        self,
        a: &CsrMatrix<S>,
    ) -> Result<Box<dyn Preconditioner<S>>, PrecondError> {
        Ok(match self {
            Self::None => Box::new(Identity),
            Self::Ilu0 => Box::new(IluFactors::factorize(a)?),
            Self::Ilu0Mixed => Box::new(MixedIlu0::factorize(a)?),
        })
    }
}

impl fmt::Display for PrecondMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown preconditioner {0:?} (expected none, ilu0 or ilu0_mixed)")]
pub struct UnknownPrecond(pub String);

impl FromStr for PrecondMode {
    type Err = UnknownPrecond;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "none" | "plain" => Ok(Self::None),
            "ilu0" | "ilu0_full" => Ok(Self::Ilu0),
            "ilu0_mixed" | "ilu0_d" => Ok(Self::Ilu0Mixed),
            _ => Err(UnknownPrecond(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_labels_round_trip() {
        for m in PrecondMode::ALL {
            assert_eq!(m.label().parse::<PrecondMode>().unwrap(), m);
        }
        assert!("ilu1".parse::<PrecondMode>().is_err());
    }

    #[test]
    fn identity_copies() {
        let mut z = [0.0; 2];
        Identity.apply(&[1.0, 2.0], &mut z).unwrap();
        assert_eq!(z, [1.0, 2.0]);
        assert!(Identity.apply(&[1.0], &mut z).is_err());
    }
}
