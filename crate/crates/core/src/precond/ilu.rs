//! Zero fill-in incomplete LU on the sparsity pattern of `A`.

use std::marker::PhantomData;
use std::sync::Arc;

use super::{PrecondError, Preconditioner};
use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, CsrPattern};

/// `L̃` (unit lower, diagonal implicit) and `Ũ` (upper with diagonal) stored
/// together on the pattern of `A`: position `(i, j)` holds `L̃_ij` for
/// `j < i` and `Ũ_ij` for `j >= i`.
#[derive(Debug, Clone)]
pub struct IluFactors<S> {
    pattern: Arc<CsrPattern>,
    values: Vec<S>,
}

impl<S: Scalar> IluFactors<S> {
    /// Row-wise (IKJ) elimination restricted to the pattern. `A` is not
    /// modified. A missing or zero pivot is fatal.
    pub fn factorize(a: &CsrMatrix<S>) -> Result<Self, PrecondError> {
        let pattern = Arc::clone(a.pattern());
        let n = pattern.n();
        if let Some(row) = (0..n).find(|&i| pattern.diag(i).is_none()) {
            return Err(PrecondError::MissingDiagonal { row });
        }
        let row_ptr = pattern.row_ptr();
        let col = pattern.col_idx();
        let mut vals = a.values().to_vec();
        let mut marker = vec![usize::MAX; n];

        for i in 0..n {
            let (start, end) = (row_ptr[i], row_ptr[i + 1]);
            for k in start..end {
                marker[col[k]] = k;
            }
            let di = pattern.diag(i).unwrap();
            for kk in start..di {
                let j = col[kk];
                let dj = pattern.diag(j).unwrap();
                let l = vals[kk] / vals[dj];
                vals[kk] = l;
                for m in dj + 1..row_ptr[j + 1] {
                    let target = marker[col[m]];
                    if target != usize::MAX {
                        let u = vals[m];
                        vals[target] -= l * u;
                    }
                }
            }
            for k in start..end {
                marker[col[k]] = usize::MAX;
            }
            let pivot = vals[di];
            if pivot.is_zero() {
                return Err(PrecondError::SingularPivot { row: i });
            }
            if !pivot.is_finite() {
                return Err(PrecondError::NumericBreakdown {
                    stage: "factorization",
                    index: i,
                });
            }
        }
        Ok(Self {
            pattern,
            values: vals,
        })
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    /// The shared pattern of `A`; `L̃ + Ũ` has exactly these positions.
    pub fn pattern(&self) -> &Arc<CsrPattern> {
        &self.pattern
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `L̃_ij`, including the implicit unit diagonal.
    pub fn lower(&self, i: usize, j: usize) -> S {
        match j.cmp(&i) {
            std::cmp::Ordering::Greater => S::zero(),
            std::cmp::Ordering::Equal => S::one(),
            std::cmp::Ordering::Less => self.entry(i, j),
        }
    }

    /// `Ũ_ij`.
    pub fn upper(&self, i: usize, j: usize) -> S {
        if j < i {
            S::zero()
        } else {
            self.entry(i, j)
        }
    }

    fn entry(&self, i: usize, j: usize) -> S {
        self.pattern
            .find(i, j)
            .map_or_else(S::zero, |k| self.values[k])
    }

    /// Binary64 copy of the factors.
    pub fn demote(&self) -> IluFactors<S::Lowered> {
        IluFactors {
            pattern: Arc::clone(&self.pattern),
            values: self.values.iter().map(|v| v.demote()).collect(),
        }
    }

    fn check(&self, r: usize, z: usize) -> Result<(), PrecondError> {
        let n = self.n();
        for found in [r, z] {
            if found != n {
                return Err(PrecondError::DimensionMismatch { expected: n, found });
            }
        }
        Ok(())
    }

    /// Forward sweep with `L̃`, then backward sweep with `Ũ`.
    pub fn solve(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        self.check(r.len(), z.len())?;
        let p = &*self.pattern;
        let (row_ptr, col, v) = (p.row_ptr(), p.col_idx(), &self.values);
        let n = p.n();
        for i in 0..n {
            let mut acc = r[i];
            let di = p.diag(i).unwrap();
            for k in row_ptr[i]..di {
                acc -= v[k] * z[col[k]];
            }
            z[i] = acc;
        }
        for i in (0..n).rev() {
            let di = p.diag(i).unwrap();
            let mut acc = z[i];
            for k in di + 1..row_ptr[i + 1] {
                acc -= v[k] * z[col[k]];
            }
            z[i] = acc / v[di];
        }
        finite_or_breakdown(z, "substitution")
    }

    /// Solves `(L̃Ũ)^H z = r`: forward with `Ũ^H`, backward with `L̃^H`,
    /// both as row scatters over the stored rows.
    pub fn solve_adjoint(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        self.check(r.len(), z.len())?;
        let p = &*self.pattern;
        let (row_ptr, col, v) = (p.row_ptr(), p.col_idx(), &self.values);
        let n = p.n();
        z.copy_from_slice(r);
        for i in 0..n {
            let di = p.diag(i).unwrap();
            let zi = z[i] / v[di].conj();
            z[i] = zi;
            for k in di + 1..row_ptr[i + 1] {
                z[col[k]] -= v[k].conj() * zi;
            }
        }
        for i in (0..n).rev() {
            let zi = z[i];
            let di = p.diag(i).unwrap();
            for k in row_ptr[i]..di {
                z[col[k]] -= v[k].conj() * zi;
            }
        }
        finite_or_breakdown(z, "adjoint substitution")
    }
}

fn finite_or_breakdown<S: Scalar>(z: &[S], stage: &'static str) -> Result<(), PrecondError> {
    match z.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(index) => Err(PrecondError::NumericBreakdown { stage, index }),
    }
}

impl<S: Scalar> Preconditioner<S> for IluFactors<S> {
    fn apply(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        self.solve(r, z)
    }

    fn apply_adjoint(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        self.solve_adjoint(r, z)
    }
}

/// ILU(0) of the binary64 rounding of `A`, factorized in binary64.
pub fn ilu0_factorize_demoted<S: Scalar>(
    a: &CsrMatrix<S>,
) -> Result<IluFactors<S::Lowered>, PrecondError> {
    IluFactors::factorize(&a.demote())
}

/// Binary64 factors applied to a wider vector: the residual is rounded to
/// binary64, both sweeps run in binary64 and the result is embedded back.
#[derive(Debug, Clone)]
pub struct MixedIlu0<S: Scalar> {
    factors: IluFactors<S::Lowered>,
    _working: PhantomData<fn() -> S>,
}

impl<S: Scalar> MixedIlu0<S> {
    pub fn new(factors: IluFactors<S::Lowered>) -> Self {
        Self {
            factors,
            _working: PhantomData,
        }
    }

    pub fn factorize(a: &CsrMatrix<S>) -> Result<Self, PrecondError> {
        Ok(Self::new(ilu0_factorize_demoted(a)?))
    }

    pub fn factors(&self) -> &IluFactors<S::Lowered> {
        &self.factors
    }

    fn run(
        &self,
        r: &[S],
        z: &mut [S],
        sweep: fn(&IluFactors<S::Lowered>, &[S::Lowered], &mut [S::Lowered]) -> Result<(), PrecondError>,
    ) -> Result<(), PrecondError> {
        self.factors.check(r.len(), z.len())?;
        let low: Vec<S::Lowered> = r.iter().map(|v| v.demote()).collect();
        let mut out = vec![<S::Lowered as num_traits::Zero>::zero(); low.len()];
        sweep(&self.factors, &low, &mut out)?;
        for (zi, &o) in z.iter_mut().zip(&out) {
            *zi = S::promote(o);
        }
        Ok(())
    }
}

impl<S: Scalar> Preconditioner<S> for MixedIlu0<S> {
    fn apply(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        self.run(r, z, IluFactors::solve)
    }

    fn apply_adjoint(&self, r: &[S], z: &mut [S]) -> Result<(), PrecondError> {
        self.run(r, z, IluFactors::solve_adjoint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex, MultiFloat};

    type Dd = MultiFloat<2>;

    fn tridiag() -> CsrMatrix<Dd> {
        let d = |x: f64| Dd::from(x);
        CsrMatrix::from_dense(&[
            vec![d(2.0), d(-1.0), d(0.0)],
            vec![d(-1.0), d(2.0), d(-1.0)],
            vec![d(0.0), d(-1.0), d(2.0)],
        ])
        .unwrap()
    }

    #[test]
    fn identity_factors() {
        let eye = CsrMatrix::<f64>::from_triplets(4, (0..4).map(|i| (i, i, 1.0))).unwrap();
        let f = IluFactors::factorize(&eye).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
        let r = [0.1, -3.0, 7.5, 1e-300];
        let mut z = [0.0; 4];
        f.apply(&r, &mut z).unwrap();
        assert_eq!(z, r);
        f.apply_adjoint(&r, &mut z).unwrap();
        assert_eq!(z, r);
    }

    #[test]
    fn tridiagonal_factors_are_exact_lu() {
        let f = IluFactors::factorize(&tridiag()).unwrap();
        let third = Dd::from(2.0) / Dd::from(3.0);
        assert_eq!(f.upper(0, 0), Dd::from(2.0));
        assert_eq!(f.lower(1, 0), Dd::from(-0.5));
        assert_eq!(f.upper(1, 1), Dd::from(1.5));
        assert_eq!(f.lower(2, 1), -third);
        assert_eq!(f.upper(0, 1), Dd::from(-1.0));
        assert_eq!(f.upper(1, 2), Dd::from(-1.0));
        let u33 = f.upper(2, 2) - Dd::from(4.0) / Dd::from(3.0);
        assert!(u33.abs().leading() < 1e-31);
    }

    #[test]
    fn tridiagonal_solve_recovers_ones() {
        let f = IluFactors::factorize(&tridiag()).unwrap();
        let r = [Dd::from(1.0), Dd::from(0.0), Dd::from(1.0)];
        let mut z = [Dd::ZERO; 3];
        f.apply(&r, &mut z).unwrap();
        for zi in z {
            assert!((zi - Dd::from(1.0)).abs().leading() < 1e-31);
        }
    }

    #[test]
    fn missing_and_zero_pivots_are_fatal() {
        let a = CsrMatrix::<f64>::from_dense(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            IluFactors::factorize(&a),
            Err(PrecondError::MissingDiagonal { row: 1 })
        ));
        let a = CsrMatrix::<f64>::from_triplets(2, [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            IluFactors::factorize(&a),
            Err(PrecondError::SingularPivot { row: 1 })
        ));
    }

    #[test]
    fn mixed_path_rounds_through_binary64() {
        let a = tridiag();
        let mixed = MixedIlu0::factorize(&a).unwrap();
        let plain64 = IluFactors::factorize(&a.demote()).unwrap();
        let r = [Dd::from(0.1).sqrt(), Dd::from(3.0), Dd::from(2.0).sqrt()];
        let mut z = [Dd::ZERO; 3];
        mixed.apply(&r, &mut z).unwrap();
        let low: Vec<f64> = r.iter().map(|v| v.leading()).collect();
        let mut z64 = [0.0; 3];
        plain64.apply(&low, &mut z64).unwrap();
        for (a, b) in z.iter().zip(z64) {
            assert_eq!(*a, Dd::from(b));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let f = IluFactors::factorize(&tridiag()).unwrap();
        let mut z = [Dd::ZERO; 2];
        assert!(f.apply(&[Dd::ZERO; 3], &mut z).is_err());
    }

    #[test]
    fn complex_adjoint_on_diagonal() {
        let c = |a: f64, b: f64| Complex::new(a, b);
        let a = CsrMatrix::from_triplets(2, [(0, 0, c(0.0, 2.0)), (1, 1, c(1.0, 1.0))]).unwrap();
        let f = IluFactors::factorize(&a).unwrap();
        let mut z = [c(0.0, 0.0); 2];
        f.apply_adjoint(&[c(2.0, 0.0), c(2.0, 0.0)], &mut z).unwrap();
        // conj(2i) = -2i, 2 / -2i = i; conj(1+i) = 1-i, 2/(1-i) = 1+i
        assert_eq!(z, [c(0.0, 1.0), c(1.0, 1.0)]);
    }
}
