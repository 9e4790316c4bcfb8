//! Exact rational view of floating-point values.

use mpkrylov::MultiFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Exact value of an unevaluated sum.
pub fn value<const N: usize>(x: MultiFloat<N>) -> BigRational {
    x.components()
        .iter()
        .fold(BigRational::zero(), |acc, &c| acc + rational(c))
}

/// Nearest binary64 to a rational, good to a couple of ulps, for any
/// magnitude representable as a normal double.
pub fn to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let neg = q.is_negative();
    let num = q.numer().abs();
    let den = q.denom().clone();
    // shift so that num/den has ~64 significant bits in the integer part
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let scaled: BigInt = if shift >= 0 {
        num / (den << shift as usize)
    } else {
        (num << (-shift) as usize) / den
    };
    // two steps so neither power of two over- or underflows
    let half = shift / 2;
    let mag = scaled.to_f64().unwrap() * 2f64.powi(half as i32) * 2f64.powi((shift - half) as i32);
    if neg {
        -mag
    } else {
        mag
    }
}

/// `|approx − exact| / |exact|`, or the absolute error when `exact` is 0.
pub fn rel_error(approx: &BigRational, exact: &BigRational) -> f64 {
    let diff = (approx - exact).abs();
    if exact.is_zero() {
        to_f64(&diff)
    } else {
        to_f64(&(diff / exact.abs()))
    }
}


/// Exact dyadic rational `m · 2^e`. Cheaper than [`BigRational`] for sums
/// and products of binary64 values because it never needs a gcd.
#[derive(Debug, Clone)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
        let m = BigInt::from(if x.is_sign_negative() { -m } else { m });
        Self { m, e }
    }

    fn aligned(&self, e: i64) -> BigInt {
        &self.m << (self.e - e) as usize
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = self.e.min(other.e);
        Self {
            m: self.aligned(e) + other.aligned(e),
            e,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            m: &self.m * &other.m,
            e: self.e + other.e,
        }
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        let e = self.e.min(other.e);
        self.aligned(e) == other.aligned(e)
    }
}
