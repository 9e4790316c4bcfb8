use std::marker::PhantomData;

use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// `y = A x` and `y = A^H x` on vectors of length [`dim`](Self::dim).
/// Callers guarantee the lengths.
pub trait LinearOperator<S: Scalar>: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[S], y: &mut [S]);
    fn apply_adjoint(&self, x: &[S], y: &mut [S]);
}

impl<S: Scalar> LinearOperator<S> for CsrMatrix<S> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        self.spmv(x, y).expect("operator dimensions")
    }

    fn apply_adjoint(&self, x: &[S], y: &mut [S]) {
        self.spmv_adjoint(x, y).expect("operator dimensions")
    }
}

/// Binary64 matrix acting on working-precision vectors.
pub struct MixedOperator<'a, S: Scalar> {
    matrix: &'a CsrMatrix<S::Lowered>,
    _working: PhantomData<fn() -> S>,
}

impl<'a, S: Scalar> MixedOperator<'a, S> {
    pub fn new(matrix: &'a CsrMatrix<S::Lowered>) -> Self {
        Self {
            matrix,
            _working: PhantomData,
        }
    }
}

impl<S: Scalar> LinearOperator<S> for MixedOperator<'_, S> {
    fn dim(&self) -> usize {
        self.matrix.n()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        self.matrix.spmv_mixed(x, y).expect("operator dimensions")
    }

    fn apply_adjoint(&self, x: &[S], y: &mut [S]) {
        self.matrix.spmv_adjoint_mixed(x, y).expect("operator dimensions")
    }
}

/// Row-parallel forward product; the adjoint stays serial.
pub struct ParallelOperator<'a, S>(pub &'a CsrMatrix<S>);

impl<S: Scalar> LinearOperator<S> for ParallelOperator<'_, S> {
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        self.0.spmv_parallel(x, y).expect("operator dimensions")
    }

    fn apply_adjoint(&self, x: &[S], y: &mut [S]) {
        self.0.spmv_adjoint(x, y).expect("operator dimensions")
    }
}
