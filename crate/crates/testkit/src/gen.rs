//! Seeded generators for values, vectors and matrices.

use mpkrylov::{MultiFloat, Real, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dense::Dense;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sign, full 52-bit mantissa and binary exponent in `exp`.
pub fn f64_with_exp(rng: &mut TestRng, exp: std::ops::RangeInclusive<i32>) -> f64 {
    let m: f64 = rng.gen_range(1.0..2.0);
    let e = rng.gen_range(exp);
    let s = if rng.gen::<bool>() { -1.0 } else { 1.0 };
    s * m * 2f64.powi(e)
}

/// A fully populated multi-component value: each component sits roughly
/// 53 bits below the previous one, then the sum is renormalized.
pub fn multi<const N: usize>(rng: &mut TestRng, exp: std::ops::RangeInclusive<i32>) -> MultiFloat<N> {
    let lead = f64_with_exp(rng, exp);
    let mut c = [0.0; N];
    c[0] = lead;
    let e0 = lead.abs().log2().floor() as i32;
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        let e = e0 - 53 * k as i32 - rng.gen_range(1..4);
        *ck = f64_with_exp(rng, e..=e);
    }
    MultiFloat::from_components(c)
}

/// A real of any precision with all its bits populated, magnitude in
/// `[lo, hi)`, random sign.
pub fn real<R: Real>(rng: &mut TestRng, lo: f64, hi: f64) -> R {
    let mut v = R::from_binary64(rng.gen_range(lo..hi));
    let mut scale = 1.0;
    for _ in 1..R::PRECISION.components() {
        scale *= 2f64.powi(-53);
        v += R::from_binary64(rng.gen_range(-1.0..1.0) * scale * hi);
    }
    if rng.gen::<bool>() {
        -v
    } else {
        v
    }
}

/// Random scalar with real and (for complex types) imaginary parts of
/// magnitude below `hi`.
pub fn scalar<S: Scalar>(rng: &mut TestRng, hi: f64) -> S {
    let re = real::<S::Real>(rng, 0.0, hi);
    if S::IS_COMPLEX {
        S::from_parts(re, real::<S::Real>(rng, 0.0, hi))
    } else {
        S::from_real(re)
    }
}

/// Binary64 scalar, for matrices that must be exactly representable in
/// the mixed-precision paths.
pub fn scalar_b64<S: Scalar>(rng: &mut TestRng, lo: f64, hi: f64) -> S {
    let part = |rng: &mut TestRng| {
        let v: f64 = rng.gen_range(lo..hi);
        let v = if rng.gen::<bool>() { -v } else { v };
        S::Real::from_binary64(v)
    };
    let re = part(rng);
    if S::IS_COMPLEX {
        S::from_parts(re, part(rng))
    } else {
        S::from_real(re)
    }
}

pub fn vector<S: Scalar>(rng: &mut TestRng, n: usize) -> Vec<S> {
    (0..n).map(|_| scalar(rng, 1.0)).collect()
}

/// Random pattern with a full diagonal and off-diagonal density `p`.
pub fn pattern(rng: &mut TestRng, n: usize, p: f64) -> Vec<Vec<bool>> {
    (0..n)
        .map(|i| (0..n).map(|j| i == j || rng.gen_bool(p)).collect())
        .collect()
}

/// Fills `mask` with binary64-representable values and makes the matrix
/// strictly row diagonally dominant.
pub fn fill_dominant<S: Scalar>(rng: &mut TestRng, mask: &[Vec<bool>]) -> Dense<S> {
    let n = mask.len();
    let mut a = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if mask[i][j] && i != j {
                let v: S = scalar_b64(rng, 0.1, 1.0);
                off += v.abs_sqr().to_binary64().sqrt();
                a[i][j] = v;
            }
        }
        let d = off + rng.gen_range(1.0..2.0);
        let d = if rng.gen::<bool>() { -d } else { d };
        a[i][i] = S::from_real(S::Real::from_binary64(d));
    }
    a
}

/// Random sparse, strictly diagonally dominant matrix.
pub fn dominant<S: Scalar>(rng: &mut TestRng, n: usize, p: f64) -> Dense<S> {
    let mask = pattern(rng, n, p);
    fill_dominant(rng, &mask)
}

/// Random tridiagonal matrix with nonzero sub/super-diagonals, diagonally
/// dominant so that unpivoted LU is stable.
pub fn tridiagonal<S: Scalar>(rng: &mut TestRng, n: usize) -> Dense<S> {
    let mask: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i.abs_diff(j) <= 1).collect())
        .collect();
    fill_dominant(rng, &mask)
}

pub fn mask_of<S: Scalar>(a: &Dense<S>) -> Vec<Vec<bool>> {
    a.iter()
        .map(|row| row.iter().map(|v| !v.is_zero()).collect())
        .collect()
}
