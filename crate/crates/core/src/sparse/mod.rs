//! Sparse storage, Matrix Market input and the dense vector kernels.

pub mod coo;
pub mod csr;
pub mod market;
pub mod vector;

use thiserror::Error;

pub use coo::{CooEntry, CooMatrix, Field, Symmetry};
pub use csr::{CsrMatrix, CsrPattern};
pub use market::{parse_matrix_market, read_matrix_market, write_matrix_market, MarketError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparseError {
    #[error("matrix is {rows}x{cols}, a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("{matrix} matrix cannot be loaded into a {} scalar type", if *.scalar_is_complex { "complex" } else { "real" })]
    FieldMismatch { matrix: Field, scalar_is_complex: bool },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({row}, {col}) outside an {n}x{n} matrix")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("invalid CSR structure: {0}")]
    Structure(String),
}
