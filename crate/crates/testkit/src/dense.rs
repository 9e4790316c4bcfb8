//! Dense row-major reference kernels, written independently of the sparse
//! code under test.

use mpkrylov::{Real, Scalar};
use num_traits::Zero;

pub type Dense<S> = Vec<Vec<S>>;

pub fn identity<S: Scalar>(n: usize) -> Dense<S> {
    let mut a = vec![vec![S::zero(); n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = S::one();
    }
    a
}

/// `A x`, skipping structural zeros and summing each row left to right.
pub fn matvec<S: Scalar>(a: &Dense<S>, x: &[S]) -> Vec<S> {
    a.iter()
        .map(|row| {
            let mut acc = S::zero();
            for (j, &v) in row.iter().enumerate() {
                if !v.is_zero() {
                    acc += v * x[j];
                }
            }
            acc
        })
        .collect()
}

pub fn adjoint<S: Scalar>(a: &Dense<S>) -> Dense<S> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn matmul<S: Scalar>(a: &Dense<S>, b: &Dense<S>) -> Dense<S> {
    let n = a.len();
    let mut c = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

pub fn frobenius<S: Scalar>(a: &Dense<S>) -> S::Real {
    let mut acc = <S::Real as Zero>::zero();
    for row in a {
        for v in row {
            acc += v.abs_sqr();
        }
    }
    acc.sqrt()
}

pub fn sub<S: Scalar>(a: &Dense<S>, b: &Dense<S>) -> Dense<S> {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(&u, &v)| u - v).collect())
        .collect()
}

/// Gaussian elimination with partial pivoting. `None` if a pivot is zero.
pub fn lu_solve<S: Scalar>(a: &Dense<S>, b: &[S]) -> Option<Vec<S>> {
    let n = a.len();
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs_sqr().partial_cmp(&m[j][k].abs_sqr()).unwrap())
            .unwrap();
        if m[p][k].is_zero() {
            return None;
        }
        m.swap(k, p);
        x.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = m[k][j];
                m[i][j] -= f * t;
            }
            let t = x[k];
            x[i] -= f * t;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

/// Unpivoted dense LU (Doolittle), `L` unit lower. `None` on a zero pivot.
pub fn lu_nopivot<S: Scalar>(a: &Dense<S>) -> Option<(Dense<S>, Dense<S>)> {
    let n = a.len();
    let mut l = identity::<S>(n);
    let mut u = a.clone();
    for k in 0..n {
        if u[k][k].is_zero() {
            return None;
        }
        for i in k + 1..n {
            let f = u[i][k] / u[k][k];
            l[i][k] = f;
            for j in k..n {
                let t = u[k][j];
                u[i][j] -= f * t;
            }
        }
    }
    for (i, row) in u.iter_mut().enumerate() {
        for v in row.iter_mut().take(i) {
            *v = S::zero();
        }
    }
    Some((l, u))
}

/// ILU(0) exactly as the textbook KIJ loop states it: for each pivot row
/// `k`, eliminate column `k` from the rows below that have an entry there,
/// updating only positions in the original pattern `mask`.
pub fn ilu0_kij<S: Scalar>(a: &Dense<S>, mask: &[Vec<bool>]) -> (Dense<S>, Dense<S>) {
    let n = a.len();
    let mut w = a.clone();
    let mut l = identity::<S>(n);
    let mut u = vec![vec![S::zero(); n]; n];
    for k in 0..n {
        if w[k][k].is_zero() {
            continue;
        }
        u[k][k] = w[k][k];
        for i in k + 1..n {
            if !mask[i][k] {
                continue;
            }
            l[i][k] = w[i][k] / u[k][k];
            for j in k + 1..n {
                if mask[k][j] && mask[i][j] {
                    let t = l[i][k] * w[k][j];
                    w[i][j] -= t;
                }
            }
        }
        for j in k + 1..n {
            if mask[k][j] {
                u[k][j] = w[k][j];
            }
        }
    }
    (l, u)
}
