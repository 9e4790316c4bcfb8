use std::path::{Path, PathBuf};

use mpkrylov::sparse::{read_matrix_market, CooMatrix, Field};
use mpkrylov::{CsrMatrix, Real, Scalar};

use crate::BenchError;

/// A matrix file loaded once and converted to each working precision on
/// demand.
#[derive(Debug, Clone)]
pub struct MatrixSource {
    pub name: String,
    pub path: PathBuf,
    pub coo: CooMatrix,
}

impl MatrixSource {
    /// Loads `path`; the matrix is named after the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let path = path.as_ref();
        let coo = read_matrix_market(path).map_err(|source| BenchError::Matrix {
            path: path.display().to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Self {
            name,
            path: path.to_path_buf(),
            coo,
        })
    }

    pub fn from_coo(name: impl Into<String>, coo: CooMatrix) -> Self {
        Self {
            name: name.into(),
            path: PathBuf::new(),
            coo,
        }
    }

    pub fn n(&self) -> usize {
        self.coo.n_rows
    }

    pub fn field(&self) -> Field {
        self.coo.field
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSpec<S: Scalar> {
    pub name: String,
    pub a: CsrMatrix<S>,
    pub x_exact: Vec<S>,
    pub b: Vec<S>,
}

impl<S: Scalar> ProblemSpec<S> {
    pub fn n(&self) -> usize {
        self.a.n()
    }
}

/// `x*_i = √2·i` for real and `√(2+3i)·i` for complex scalars, `i = 1…n`.
pub fn exact_solution<S: Scalar>(n: usize) -> Vec<S> {
    let two = S::Real::from_binary64(2.0);
    let base = if S::IS_COMPLEX {
        S::from_parts(two, S::Real::from_binary64(3.0)).sqrt()
    } else {
        S::from_real(two).sqrt()
    };
    (1..=n)
        .map(|i| base * S::from_real(S::Real::from_binary64(i as f64)))
        .collect()
}

/// Pairs `A` with the exact solution above and `b = A x*` computed in the
/// working precision.
pub fn build_problem<S: Scalar>(name: impl Into<String>, a: CsrMatrix<S>) -> ProblemSpec<S> {
    let x_exact = exact_solution::<S>(a.n());
    let b = a.mul_vec(&x_exact).expect("square matrix");
    ProblemSpec {
        name: name.into(),
        a,
        x_exact,
        b,
    }
}
