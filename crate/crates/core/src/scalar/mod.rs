//! Scalar types: binary64, multi-component reals and complex numbers over
//! them, unified by the [`Real`] and [`Scalar`] traits so that every kernel
//! above this module is written once for all precisions and both fields.

pub mod complex;
pub mod decimal;
pub mod eft;
pub mod multi;

use std::fmt::{self, Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use thiserror::Error;

pub use complex::Complex;
pub use multi::{renormalize, MultiFloat};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
}

/// The precision ladder: binary64 and its 2/3/4-component extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrecisionKind {
    F64,
    Dd,
    Td,
    Qd,
}

impl PrecisionKind {
    pub const ALL: [PrecisionKind; 4] = [Self::F64, Self::Dd, Self::Td, Self::Qd];

    pub const fn components(self) -> usize {
        match self {
            Self::F64 => 1,
            Self::Dd => 2,
            Self::Td => 3,
            Self::Qd => 4,
        }
    }

    pub const fn mantissa_bits(self) -> u32 {
        53 * self.components() as u32
    }

    /// `2^-mantissa_bits`, the relative spacing of the format.
    pub fn unit_roundoff(self) -> f64 {
        eft::ldexp(1.0, -(self.mantissa_bits() as i32))
    }

    pub const fn label(self) -> &'static str {
        match self {
            Self::F64 => "f64",
            Self::Dd => "dd",
            Self::Td => "td",
            Self::Qd => "qd",
        }
    }

    pub const fn from_components(k: usize) -> Option<Self> {
        match k {
            1 => Some(Self::F64),
            2 => Some(Self::Dd),
            3 => Some(Self::Td),
            4 => Some(Self::Qd),
            _ => None,
        }
    }
}

impl Display for PrecisionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown precision {0:?} (expected f64, dd, td or qd)")]
pub struct UnknownPrecision(pub String);

impl FromStr for PrecisionKind {
    type Err = UnknownPrecision;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f64" | "d" | "double" | "binary64" => Ok(Self::F64),
            "dd" => Ok(Self::Dd),
            "td" => Ok(Self::Td),
            "qd" => Ok(Self::Qd),
            _ => Err(UnknownPrecision(s.to_string())),
        }
    }
}

/// A real field element at some point of the precision ladder.
pub trait Real:
    Copy
    + Debug
    + Display
    + Default
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    const PRECISION: PrecisionKind;

    /// Exact embedding of a binary64 value.
    fn from_binary64(x: f64) -> Self;
    /// Leading component; binary64 rounding of the value.
    fn to_binary64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn is_finite(self) -> bool;
    /// Exact multiplication by 1/2.
    fn half(self) -> Self;
}

impl Real for f64 {
    const PRECISION: PrecisionKind = PrecisionKind::F64;

    #[inline]
    fn from_binary64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_binary64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn half(self) -> Self {
        self * 0.5
    }
}

impl<const N: usize> Real for MultiFloat<N> {
    const PRECISION: PrecisionKind = match PrecisionKind::from_components(N) {
        Some(p) => p,
        None => panic!("unsupported component count"),
    };

    #[inline]
    fn from_binary64(x: f64) -> Self {
        MultiFloat::from_f64(x)
    }
    #[inline]
    fn to_binary64(self) -> f64 {
        self.leading()
    }
    #[inline]
    fn sqrt(self) -> Self {
        MultiFloat::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        MultiFloat::abs(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        MultiFloat::is_finite(&self)
    }
    #[inline]
    fn half(self) -> Self {
        self.mul_pow2(0.5)
    }
}

/// Element type of vectors and matrices: a [`Real`] or a [`Complex`] over one.
pub trait Scalar:
    Copy
    + Debug
    + Display
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    type Real: Real;
    /// The same field in binary64 (`f64` or `Complex<f64>`).
    type Lowered: Scalar<Real = f64>;
    const IS_COMPLEX: bool;

    fn from_real(r: Self::Real) -> Self;
    /// Builds `re + i·im`; real scalars ignore `im`.
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    /// `|x|²`.
    fn abs_sqr(self) -> Self::Real;
    /// Principal square root.
    fn sqrt(self) -> Self;
    fn is_finite(self) -> bool;
    /// Rounds to binary64 (leading components).
    fn demote(self) -> Self::Lowered;
    /// Exact embedding of the binary64 counterpart.
    fn promote(x: Self::Lowered) -> Self;
    fn scale(self, r: Self::Real) -> Self;

    fn precision() -> PrecisionKind {
        <Self::Real as Real>::PRECISION
    }
}

macro_rules! real_scalar {
    ($ty:ty) => {
        type Real = Self;
        type Lowered = f64;
        const IS_COMPLEX: bool = false;

        #[inline]
        fn from_real(r: Self) -> Self {
            r
        }
        #[inline]
        fn from_parts(re: Self, im: Self) -> Self {
            debug_assert!(im == Self::zero(), "imaginary part dropped by a real scalar");
            re
        }
        #[inline]
        fn re(self) -> Self {
            self
        }
        #[inline]
        fn im(self) -> Self {
            Self::zero()
        }
        #[inline]
        fn conj(self) -> Self {
            self
        }
        #[inline]
        fn abs_sqr(self) -> Self {
            self * self
        }
        #[inline]
        fn sqrt(self) -> Self {
            <Self as Real>::sqrt(self)
        }
        #[inline]
        fn is_finite(self) -> bool {
            <Self as Real>::is_finite(self)
        }
        #[inline]
        fn demote(self) -> f64 {
            self.to_binary64()
        }
        #[inline]
        fn promote(x: f64) -> Self {
            <$ty as Real>::from_binary64(x)
        }
        #[inline]
        fn scale(self, r: Self) -> Self {
            self * r
        }
    };
}

impl Scalar for f64 {
    real_scalar!(f64);
}

impl<const N: usize> Scalar for MultiFloat<N> {
    real_scalar!(MultiFloat<N>);
}

impl<R: Real> Scalar for Complex<R> {
    type Real = R;
    type Lowered = Complex<f64>;
    const IS_COMPLEX: bool = true;

    #[inline]
    fn from_real(r: R) -> Self {
        Complex::from_real(r)
    }
    #[inline]
    fn from_parts(re: R, im: R) -> Self {
        Complex::new(re, im)
    }
    #[inline]
    fn re(self) -> R {
        self.re
    }
    #[inline]
    fn im(self) -> R {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(self)
    }
    #[inline]
    fn abs_sqr(self) -> R {
        self.norm_sqr()
    }
    fn sqrt(self) -> Self {
        Complex::sqrt(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        Complex::is_finite(self)
    }
    #[inline]
    fn demote(self) -> Complex<f64> {
        Complex::new(self.re.to_binary64(), self.im.to_binary64())
    }
    #[inline]
    fn promote(x: Complex<f64>) -> Self {
        Complex::new(R::from_binary64(x.re), R::from_binary64(x.im))
    }
    #[inline]
    fn scale(self, r: R) -> Self {
        Complex::scale(self, r)
    }
}
