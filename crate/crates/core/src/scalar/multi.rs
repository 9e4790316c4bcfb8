//! Multi-component floating-point numbers: an unevaluated sum of `N`
//! binary64 values, most significant first.
//!
//! `N = 1` is plain binary64 (and every operation is bitwise identical to
//! the native one), `N = 2` double-double, `N = 3` triple-double and
//! `N = 4` quad-double.
//!
//! Every value produced by a public operation is kept in canonical form:
//! for adjacent components `fl(c[i] + c[i+1]) == c[i]`, which implies
//! `|c[i+1]| <= ulp(c[i]) / 2`, and zero components only appear at the tail.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use super::decimal::{self, ParseDecimalError};
use super::eft::{two_prod, two_sum};

/// Sum of `N` non-overlapping binary64 components.
#[derive(Clone, Copy, PartialEq)]
pub struct MultiFloat<const N: usize>([f64; N]);

// Fixed scratch sizes; large enough for N <= 4.
const LEVELS: usize = 5;
const CARRY: usize = 24;

impl<const N: usize> MultiFloat<N> {
    const VALID: () = assert!(N >= 1 && N <= 4, "MultiFloat supports 1 to 4 components");

    /// Nominal significand width: 53 bits per component.
    pub const MANTISSA_BITS: u32 = 53 * N as u32;

    /// Newton iterations needed to lift a binary64 seed to full width.
    const NEWTON_STEPS: usize = match N {
        1 => 0,
        2 => 1,
        _ => 2,
    };

    pub const ZERO: Self = Self([0.0; N]);

    /// Exact embedding of a binary64 value.
    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::VALID;
        let mut c = [0.0; N];
        c[0] = x;
        Self(c)
    }

    /// Builds a value from arbitrary components, renormalizing them.
    pub fn from_components(components: [f64; N]) -> Self {
        renormalize(&components)
    }

    /// Wraps components that are already canonical. Callers must uphold the
    /// invariant; use [`MultiFloat::from_components`] otherwise.
    pub const fn from_canonical_unchecked(components: [f64; N]) -> Self {
        Self(components)
    }

    #[inline]
    pub const fn components(&self) -> &[f64; N] {
        &self.0
    }

    /// Most significant component, i.e. the value rounded to binary64.
    #[inline]
    pub const fn leading(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0[0]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn is_nan(&self) -> bool {
        self.0.iter().any(|c| c.is_nan())
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0[0].is_sign_negative()
    }

    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplies by a power of two. Exact unless the result leaves the
    /// normal range.
    pub fn mul_pow2(self, p: f64) -> Self {
        debug_assert!(p != 0.0 && p.to_bits() & ((1u64 << 52) - 1) == 0);
        let mut c = self.0;
        for x in c.iter_mut() {
            *x *= p;
        }
        Self(c)
    }

    /// Converts to a different component count: exact when widening, rounded
    /// to the top `M` components when narrowing.
    pub fn convert<const M: usize>(self) -> MultiFloat<M> {
        if M >= N {
            let mut c = [0.0; M];
            c[..N].copy_from_slice(&self.0);
            MultiFloat(c)
        } else {
            renormalize(&self.0)
        }
    }

    /// True when the components satisfy the canonical (non-overlapping) form.
    pub fn is_canonical(&self) -> bool {
        is_canonical(&self.0)
    }

    #[inline]
    fn single(x: f64) -> Self {
        Self::from_f64(x)
    }

    /// `1 / self` by Newton iteration seeded with the binary64 reciprocal.
    pub fn recip(self) -> Self {
        let r0 = 1.0 / self.0[0];
        if N == 1 || !r0.is_finite() || !self.is_finite() {
            return Self::single(r0);
        }
        let one = Self::one();
        let mut r = Self::from_f64(r0);
        for _ in 0..Self::NEWTON_STEPS {
            let e = one - self * r;
            r += r * e;
        }
        r
    }

    /// Square root. Negative input yields NaN; see [`MultiFloat::try_sqrt`].
    pub fn sqrt(self) -> Self {
        let x0 = self.0[0];
        if N == 1 || x0 == 0.0 || x0 < 0.0 || !self.is_finite() {
            return Self::single(x0.sqrt());
        }
        let one = Self::one();
        let mut r = Self::from_f64(1.0 / x0.sqrt());
        for _ in 0..Self::NEWTON_STEPS {
            let e = one - (self * r) * r;
            r += (r * e).mul_pow2(0.5);
        }
        let s = self * r;
        (s + (r * (self - s * s)).mul_pow2(0.5)).trim_noise()
    }

    /// Drops trailing components below the format's resolution. Newton
    /// iterations leave such noise behind; removing it keeps exact
    /// quotients and roots exact.
    fn trim_noise(mut self) -> Self {
        let floor = self.0[0].abs() * super::eft::ldexp(1.0, -(Self::MANTISSA_BITS as i32));
        if let Some(k) = (1..N).find(|&k| self.0[k].abs() < floor) {
            self.0[k..].fill(0.0);
        }
        self
    }

    /// Square root that rejects negative operands.
    pub fn try_sqrt(self) -> Result<Self, crate::scalar::DomainError> {
        if self.0[0] < 0.0 {
            Err(crate::scalar::DomainError::NegativeSqrt(self.0[0]))
        } else {
            Ok(self.sqrt())
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        decimal::format_components(&self.0, digits, false)
    }

    /// Significant digits needed for a decimal round trip.
    pub fn round_trip_digits() -> usize {
        decimal::round_trip_digits(Self::MANTISSA_BITS)
    }
}

/// Restores canonical form for an arbitrary list of binary64 terms.
///
/// The result equals the exact sum of `raw` to within one ulp of the
/// `N`-component format.
pub fn renormalize<const N: usize>(raw: &[f64]) -> MultiFloat<N> {
    if raw.is_empty() {
        return MultiFloat::ZERO;
    }
    let mut stack = [0.0; 2 * CARRY];
    let mut heap;
    let buf: &mut [f64] = if raw.len() <= stack.len() {
        stack[..raw.len()].copy_from_slice(raw);
        &mut stack[..raw.len()]
    } else {
        heap = raw.to_vec();
        &mut heap
    };
    MultiFloat(renorm_in_place::<N>(buf))
}

#[inline]
fn is_canonical<const N: usize>(c: &[f64; N]) -> bool {
    (0..N - 1).all(|i| c[i] + c[i + 1] == c[i])
}

/// Error-free bottom-up accumulation: afterwards `buf[0]` carries the
/// rounded total and the remaining slots the exact rounding errors.
#[inline]
fn vec_sum(buf: &mut [f64]) {
    let m = buf.len();
    if m < 2 {
        return;
    }
    let mut s = buf[m - 1];
    for i in (0..m - 1).rev() {
        let (hi, lo) = two_sum(buf[i], s);
        buf[i + 1] = lo;
        s = hi;
    }
    buf[0] = s;
}

/// Top-down compression with zero elimination into `N` components. Exact
/// until `N - 1` components have been emitted; the remainder is folded into
/// the last one.
#[inline]
fn compress<const N: usize>(e: &[f64]) -> [f64; N] {
    let mut out = [0.0; N];
    let mut j = 0;
    let mut acc = e[0];
    for &t in &e[1..] {
        if j == N - 1 {
            acc += t;
            continue;
        }
        let (hi, lo) = two_sum(acc, t);
        if lo != 0.0 {
            out[j] = hi;
            j += 1;
            acc = lo;
        } else {
            acc = hi;
        }
    }
    out[j] = acc;
    out
}

fn renorm_in_place<const N: usize>(buf: &mut [f64]) -> [f64; N] {
    vec_sum(buf);
    let mut c = compress::<N>(buf);
    if !c[0].is_finite() {
        let mut out = [0.0; N];
        out[0] = c[0];
        return out;
    }
    // A second pass is only needed when the terms arrived badly ordered.
    let mut rounds = 0;
    while !is_canonical(&c) && rounds < 8 {
        let mut tmp = c;
        vec_sum(&mut tmp);
        c = compress::<N>(&tmp);
        rounds += 1;
    }
    c
}

impl<const N: usize> Default for MultiFloat<N> {
    fn default() -> Self {
        Self::ZERO
    }
}

impl<const N: usize> Neg for MultiFloat<N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let mut c = self.0;
        for x in c.iter_mut() {
            *x = -*x;
        }
        Self(c)
    }
}

impl<const N: usize> Add for MultiFloat<N> {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (x, y) = (&self.0, &rhs.0);
        let s0 = x[0] + y[0];
        if N == 1 || !s0.is_finite() {
            return Self::single(s0);
        }
        // Level-by-level summation; rounding errors of level l are carried
        // down to level l + 1.
        let mut levels = [0.0; LEVELS];
        let mut carry = [0.0; 8];
        let mut n_carry = 0;
        for l in 0..N {
            let mut next = [0.0; 8];
            let mut n_next = 0;
            let (mut v, e) = two_sum(x[l], y[l]);
            if e != 0.0 {
                next[n_next] = e;
                n_next += 1;
            }
            for &c in &carry[..n_carry] {
                let (s, e) = two_sum(v, c);
                v = s;
                if e != 0.0 {
                    next[n_next] = e;
                    n_next += 1;
                }
            }
            levels[l] = v;
            carry = next;
            n_carry = n_next;
        }
        levels[N] = carry[..n_carry].iter().sum();
        Self(renorm_in_place::<N>(&mut levels[..=N]))
    }
}

impl<const N: usize> Sub for MultiFloat<N> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Mul for MultiFloat<N> {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (x, y) = (&self.0, &rhs.0);
        let p0 = x[0] * y[0];
        if N == 1 || !p0.is_finite() {
            return Self::single(p0);
        }
        // Products x[i]*y[j] with i + j = l form level l; their errors and
        // the summation errors move to level l + 1. Level N is summed plainly.
        let mut levels = [0.0; LEVELS];
        let mut carry = [0.0; CARRY];
        let mut n_carry = 0;
        for l in 0..N {
            let mut next = [0.0; CARRY];
            let mut n_next = 0;
            let mut v = 0.0;
            for i in 0..=l {
                let (p, e) = two_prod(x[i], y[l - i]);
                if e != 0.0 {
                    next[n_next] = e;
                    n_next += 1;
                }
                if i == 0 {
                    v = p;
                } else {
                    let (s, e) = two_sum(v, p);
                    v = s;
                    if e != 0.0 {
                        next[n_next] = e;
                        n_next += 1;
                    }
                }
            }
            for &c in &carry[..n_carry] {
                let (s, e) = two_sum(v, c);
                v = s;
                if e != 0.0 {
                    next[n_next] = e;
                    n_next += 1;
                }
            }
            levels[l] = v;
            carry = next;
            n_carry = n_next;
        }
        let mut tail: f64 = carry[..n_carry].iter().sum();
        for i in 1..N {
            tail += x[i] * y[N - i];
        }
        levels[N] = tail;
        Self(renorm_in_place::<N>(&mut levels[..=N]))
    }
}

impl<const N: usize> Div for MultiFloat<N> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        let q0 = self.0[0] / rhs.0[0];
        if N == 1 || !q0.is_finite() || !self.is_finite() || !rhs.is_finite() {
            return Self::single(q0);
        }
        if self.0[0] == 0.0 {
            return Self::single(q0);
        }
        let r = rhs.recip();
        let q = self * r;
        let residual = self - rhs * q;
        (q + r * residual).trim_noise()
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl<const N: usize> $tr for MultiFloat<N> {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl<const N: usize> PartialOrd for MultiFloat<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if N == 1 {
            return self.0[0].partial_cmp(&other.0[0]);
        }
        if self.is_nan() || other.is_nan() {
            return None;
        }
        if !self.is_finite() || !other.is_finite() {
            return self.0[0].partial_cmp(&other.0[0]);
        }
        (*self - *other).0[0].partial_cmp(&0.0)
    }
}

impl<const N: usize> Zero for MultiFloat<N> {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0
    }
}

impl<const N: usize> One for MultiFloat<N> {
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl<const N: usize> Sum for MultiFloat<N> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl<const N: usize> Product for MultiFloat<N> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| a * b)
    }
}

impl<const N: usize> From<f64> for MultiFloat<N> {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl<const N: usize> FromPrimitive for MultiFloat<N> {
    fn from_i64(n: i64) -> Option<Self> {
        // i64 needs up to two binary64 components
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(renormalize(&[hi, lo]))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(renormalize(&[hi, lo]))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Self::from_f64(x))
    }
}

impl<const N: usize> ToPrimitive for MultiFloat<N> {
    fn to_i64(&self) -> Option<i64> {
        let t = self.0.iter().fold(0i128, |acc, c| acc + c.trunc() as i128);
        i64::try_from(t).ok()
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().and_then(|v| u64::try_from(v).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0[0])
    }
}

impl<const N: usize> fmt::Debug for MultiFloat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiFloat{:?}", self.0)
    }
}

impl<const N: usize> fmt::Display for MultiFloat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match f.precision() {
            Some(p) => decimal::format_components(&self.0, p + 1, false),
            None => decimal::format_components(&self.0, Self::round_trip_digits(), true),
        };
        f.pad_integral(true, "", &s)
    }
}

impl<const N: usize> FromStr for MultiFloat<N> {
    type Err = ParseDecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = decimal::parse_components(s, N)?;
        Ok(renormalize(&parts))
    }
}
