//! Complex numbers over any [`Real`] component type.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Complex<R> {
    pub const fn new(re: R, im: R) -> Self {
        Self { re, im }
    }

    pub fn i() -> Self {
        Self::new(R::zero(), R::one())
    }

    pub fn from_real(re: R) -> Self {
        Self::new(re, R::zero())
    }

    /// Negates the imaginary part; exact.
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// `re² + im²`.
    pub fn norm_sqr(self) -> R {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> R {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, r: R) -> Self {
        Self::new(self.re * r, self.im * r)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Principal square root: the result has `re >= 0`, and `im >= 0`
    /// whenever `re == 0`.
    pub fn sqrt(self) -> Self {
        let zero = R::zero();
        if self.re == zero && self.im == zero {
            return Self::new(zero, zero);
        }
        let modulus = self.abs();
        if self.re >= zero {
            let t = (modulus + self.re).half().sqrt();
            Self::new(t, self.im / (t + t))
        } else {
            let t = (modulus - self.re).half().sqrt();
            let im = if self.im >= zero { t } else { -t };
            Self::new(self.im.abs() / (t + t), im)
        }
    }

    /// `self / rhs` with Smith's scaling.
    fn smith_div(self, rhs: Self) -> Self {
        let zero = R::zero();
        let (a, b, c, d) = (self.re, self.im, rhs.re, rhs.im);
        if c == zero && d == zero {
            return Self::new(a / c, b / c);
        }
        if c.abs() >= d.abs() {
            let ratio = d / c;
            let den = c + d * ratio;
            Self::new((a + b * ratio) / den, (b - a * ratio) / den)
        } else {
            let ratio = c / d;
            let den = d + c * ratio;
            Self::new((a * ratio + b) / den, (b * ratio - a) / den)
        }
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<R: Real> Add for Complex<R> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<R: Real> Sub for Complex<R> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<R: Real> Mul for Complex<R> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl<R: Real> Div for Complex<R> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.smith_div(rhs)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl<R: Real> $tr for Complex<R> {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl<R: Real> Zero for Complex<R> {
    fn zero() -> Self {
        Self::new(R::zero(), R::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl<R: Real> One for Complex<R> {
    fn one() -> Self {
        Self::new(R::one(), R::zero())
    }
}

impl<R: Real> Sum for Complex<R> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<R: Real> fmt::Display for Complex<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_neg = self.im < R::zero();
        let im = if im_neg { -self.im } else { self.im };
        let sign = if im_neg { '-' } else { '+' };
        match f.precision() {
            Some(p) => write!(f, "{:.*}{}{:.*}i", p, self.re, sign, p, im),
            None => write!(f, "{}{}{}i", self.re, sign, im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::MultiFloat;

    type Cdd = Complex<MultiFloat<2>>;

    fn c(re: f64, im: f64) -> Cdd {
        Complex::new(re.into(), im.into())
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(Cdd::i() * Cdd::i(), c(-1.0, 0.0));
    }

    #[test]
    fn conj_is_an_involution() {
        let z = Cdd::new(MultiFloat::from_f64(2.0).sqrt(), -MultiFloat::from_f64(3.0).sqrt());
        assert_eq!(z.conj().conj(), z);
    }

    #[test]
    fn principal_roots() {
        assert_eq!(c(-1.0, 0.0).sqrt(), Cdd::i());
        assert_eq!(c(-1.0, -0.0).sqrt(), Cdd::i());
        assert_eq!(c(4.0, 0.0).sqrt(), c(2.0, 0.0));
        assert_eq!(c(0.0, 0.0).sqrt(), c(0.0, 0.0));
        let r = c(-4.0, -1e-300).sqrt();
        assert!(r.im.leading() < 0.0);
    }

    #[test]
    fn smith_division_small_case() {
        // (2+3i)/(1-i) = -1/2 + 5i/2, exactly representable
        assert_eq!(c(2.0, 3.0) / c(1.0, -1.0), c(-0.5, 2.5));
        // the other branch of the scaling
        assert_eq!(c(2.0, 3.0) / c(0.0, 1.0), c(3.0, -2.0));
    }

    #[test]
    fn division_by_zero_gives_non_finite_parts() {
        let q = c(1.0, 1.0) / c(0.0, 0.0);
        assert!(!q.is_finite());
        assert_eq!(q.re.leading(), f64::INFINITY);
    }

    #[test]
    fn display_shows_sign_of_imaginary_part() {
        assert_eq!(format!("{:.2}", c(1.5, -2.0)), "1.50e0-2.00e0i");
    }
}
