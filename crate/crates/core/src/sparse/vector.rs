//! Dense vector kernels. Reductions accumulate in ascending index order.
//!
//! All kernels panic when the slice lengths differ.

use num_traits::Zero;

use crate::scalar::{Real, Scalar};

#[inline]
fn same_len(a: usize, b: usize) {
    assert_eq!(a, b, "vector length mismatch");
}

/// `Σ conj(x_i)·y_i`, conjugate-linear in `x`.
pub fn hdot<S: Scalar>(x: &[S], y: &[S]) -> S {
    same_len(x.len(), y.len());
    let mut acc = S::zero();
    for (&a, &b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

/// `Σ x_i·y_i` without conjugation.
pub fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    same_len(x.len(), y.len());
    let mut acc = S::zero();
    for (&a, &b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

pub fn norm2<S: Scalar>(x: &[S]) -> S::Real {
    let mut acc = <S::Real as Zero>::zero();
    for &a in x {
        acc += a.abs_sqr();
    }
    acc.sqrt()
}

/// `y += alpha·x`.
pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    same_len(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `y = x + beta·y`.
pub fn xpby<S: Scalar>(x: &[S], beta: S, y: &mut [S]) {
    same_len(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = xi + beta * *yi;
    }
}

pub fn scale<S: Scalar>(alpha: S, x: &mut [S]) {
    for xi in x {
        *xi *= alpha;
    }
}

pub fn copy<S: Scalar>(src: &[S], dst: &mut [S]) {
    same_len(src.len(), dst.len());
    dst.copy_from_slice(src);
}

/// `out = x - y`.
pub fn sub<S: Scalar>(x: &[S], y: &[S], out: &mut [S]) {
    same_len(x.len(), y.len());
    same_len(x.len(), out.len());
    for ((o, &a), &b) in out.iter_mut().zip(x).zip(y) {
        *o = a - b;
    }
}

pub fn all_finite<S: Scalar>(x: &[S]) -> bool {
    x.iter().all(|v| v.is_finite())
}
