use std::sync::Arc;

use rayon::prelude::*;

use super::coo::{CooMatrix, Field};
use super::SparseError;
use crate::scalar::{Complex, Real, Scalar};

/// Sparsity structure of a square CSR matrix. Shared between a matrix, its
/// demoted copy and its ILU(0) factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrPattern {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    diag: Vec<Option<usize>>,
}

impl CsrPattern {
    /// Validates the arrays and records the diagonal positions.
    pub fn new(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>) -> Result<Self, SparseError> {
        if row_ptr.len() != n + 1 || row_ptr[0] != 0 || row_ptr[n] != col_idx.len() {
            return Err(SparseError::Structure("row_ptr does not describe col_idx".into()));
        }
        let mut diag = vec![None; n];
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(SparseError::Structure(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for (k, &j) in cols.iter().enumerate() {
                if j >= n {
                    return Err(SparseError::Structure(format!(
                        "column {j} out of range in row {i}"
                    )));
                }
                if k > 0 && cols[k - 1] >= j {
                    return Err(SparseError::Structure(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
                if j == i {
                    diag[i] = Some(row_ptr[i] + k);
                }
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            diag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    /// Storage index of `(i, i)`, `None` if structurally absent.
    pub fn diag(&self, i: usize) -> Option<usize> {
        self.diag[i]
    }

    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    /// Storage index of `(i, j)`.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.row_range(i);
        self.col_idx[r.clone()]
            .binary_search(&j)
            .ok()
            .map(|k| r.start + k)
    }
}

/// Square sparse matrix in compressed row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<S> {
    pattern: Arc<CsrPattern>,
    values: Vec<S>,
}

impl<S: Scalar> CsrMatrix<S> {
    pub fn from_parts(pattern: Arc<CsrPattern>, values: Vec<S>) -> Result<Self, SparseError> {
        if values.len() != pattern.nnz() {
            return Err(SparseError::DimensionMismatch {
                expected: pattern.nnz(),
                found: values.len(),
            });
        }
        Ok(Self { pattern, values })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed in `S`.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Result<Self, SparseError> {
        let mut t: Vec<(usize, usize, S)> = triplets.into_iter().collect();
        for &(i, j, _) in &t {
            if i >= n || j >= n {
                return Err(SparseError::IndexOutOfRange { row: i, col: j, n });
            }
        }
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(t.len());
        let mut values: Vec<S> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let pattern = CsrPattern::new(n, row_ptr, col_idx)?;
        Ok(Self {
            pattern: Arc::new(pattern),
            values,
        })
    }

    /// Expands symmetric storage, sums duplicates in binary64 and embeds the
    /// values exactly into `S`. The matrix field must match the scalar field.
    pub fn from_coo(coo: &CooMatrix) -> Result<Self, SparseError> {
        if !coo.is_square() {
            return Err(SparseError::NotSquare {
                rows: coo.n_rows,
                cols: coo.n_cols,
            });
        }
        let complex_matrix = coo.field == Field::Complex;
        if complex_matrix != S::IS_COMPLEX {
            return Err(SparseError::FieldMismatch {
                matrix: coo.field,
                scalar_is_complex: S::IS_COMPLEX,
            });
        }
        let lowered = CsrMatrix::<Complex<f64>>::from_triplets(
            coo.n_rows,
            coo.expanded_entries()
                .into_iter()
                .map(|e| (e.row, e.col, e.value)),
        )?;
        let values = lowered
            .values
            .iter()
            .map(|z| S::promote(<S::Lowered as Scalar>::from_parts(z.re, z.im)))
            .collect();
        Ok(Self {
            pattern: lowered.pattern,
            values,
        })
    }

    /// Row-major dense matrix; absent entries are zero.
    pub fn from_dense(rows: &[Vec<S>]) -> Result<Self, SparseError> {
        let n = rows.len();
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SparseError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            t.extend(
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, &v)| (i, j, v)),
            );
        }
        Self::from_triplets(n, t)
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let n = self.n();
        let mut out = vec![vec![S::zero(); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for k in self.pattern.row_range(i) {
                row[self.pattern.col_idx[k]] = self.values[k];
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.pattern.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn pattern(&self) -> &Arc<CsrPattern> {
        &self.pattern
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.pattern.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.pattern.col_idx
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<S> {
        self.pattern.find(i, j).map(|k| self.values[k])
    }

    /// Same pattern, values mapped through `f`.
    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> CsrMatrix<T> {
        CsrMatrix {
            pattern: Arc::clone(&self.pattern),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Binary64 copy (leading components) on the shared pattern.
    pub fn demote(&self) -> CsrMatrix<S::Lowered> {
        self.map(S::demote)
    }

    /// Explicit conjugate transpose.
    pub fn adjoint(&self) -> CsrMatrix<S> {
        let n = self.n();
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..n {
            for k in self.pattern.row_range(i) {
                t.push((self.pattern.col_idx[k], i, self.values[k].conj()));
            }
        }
        Self::from_triplets(n, t).expect("transpose of a valid matrix")
    }

    pub fn frobenius_norm(&self) -> S::Real {
        self.values
            .iter()
            .map(|v| v.abs_sqr())
            .sum::<S::Real>()
            .sqrt()
    }

    fn check(&self, x: usize, y: usize) -> Result<(), SparseError> {
        let n = self.n();
        if x != n {
            return Err(SparseError::DimensionMismatch { expected: n, found: x });
        }
        if y != n {
            return Err(SparseError::DimensionMismatch { expected: n, found: y });
        }
        Ok(())
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[S]) -> S {
        let mut acc = S::zero();
        for k in self.pattern.row_range(i) {
            acc += self.values[k] * x[self.pattern.col_idx[k]];
        }
        acc
    }

    /// `y = A x`, rows accumulated in ascending column order.
    pub fn spmv(&self, x: &[S], y: &mut [S]) -> Result<(), SparseError> {
        self.check(x.len(), y.len())?;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_dot(i, x);
        }
        Ok(())
    }

    pub fn mul_vec(&self, x: &[S]) -> Result<Vec<S>, SparseError> {
        let mut y = vec![S::zero(); self.n()];
        self.spmv(x, &mut y)?;
        Ok(y)
    }

    /// Row-partitioned parallel `y = A x`. Each row is summed in the same
    /// order as [`spmv`](Self::spmv).
    pub fn spmv_parallel(&self, x: &[S], y: &mut [S]) -> Result<(), SparseError> {
        self.check(x.len(), y.len())?;
        y.par_iter_mut()
            .with_min_len(256)
            .enumerate()
            .for_each(|(i, yi)| *yi = self.row_dot(i, x));
        Ok(())
    }

    /// `y = A^H x` by scattering rows in ascending order.
    pub fn spmv_adjoint(&self, x: &[S], y: &mut [S]) -> Result<(), SparseError> {
        self.check(x.len(), y.len())?;
        y.fill(S::zero());
        for (i, &xi) in x.iter().enumerate() {
            for k in self.pattern.row_range(i) {
                y[self.pattern.col_idx[k]] += self.values[k].conj() * xi;
            }
        }
        Ok(())
    }
}

impl<L: Scalar<Real = f64>> CsrMatrix<L> {
    /// Binary64 matrix applied to a vector of a wider format `S`: each stored
    /// value is embedded exactly before the product, so the result is
    /// bitwise that of [`spmv`](CsrMatrix::spmv) on the promoted matrix.
    pub fn spmv_mixed<S: Scalar<Lowered = L>>(&self, x: &[S], y: &mut [S]) -> Result<(), SparseError> {
        self.check(x.len(), y.len())?;
        let p = &self.pattern;
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = S::zero();
            for k in p.row_range(i) {
                acc += S::promote(self.values[k]) * x[p.col_idx[k]];
            }
            *yi = acc;
        }
        Ok(())
    }

    /// Mixed counterpart of [`spmv_adjoint`](CsrMatrix::spmv_adjoint).
    pub fn spmv_adjoint_mixed<S: Scalar<Lowered = L>>(
        &self,
        x: &[S],
        y: &mut [S],
    ) -> Result<(), SparseError> {
        self.check(x.len(), y.len())?;
        let p = &self.pattern;
        y.fill(S::zero());
        for (i, &xi) in x.iter().enumerate() {
            for k in p.row_range(i) {
                y[p.col_idx[k]] += S::promote(self.values[k]).conj() * xi;
            }
        }
        Ok(())
    }

    /// Exact embedding of every value into `S`.
    pub fn promote<S: Scalar<Lowered = L>>(&self) -> CsrMatrix<S> {
        self.map(S::promote)
    }
}
