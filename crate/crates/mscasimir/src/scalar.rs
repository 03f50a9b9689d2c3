//! Scalar backends: complex floats for numerics, Gaussian rationals for exact tables.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

pub type C64 = Complex<f64>;
pub type Q = BigRational;
/// Rationals with a formal imaginary unit.
pub type CQ = Complex<BigRational>;

pub trait Field: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    const EXACT: bool;
    fn from_i64(v: i64) -> Self;
    /// Rough size, used for pivoting and residuals.
    fn mag(&self) -> f64;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> C64;

    fn negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.mag() <= tol
        }
    }
}

/// Fields containing a square root of −1.
pub trait ComplexField: Field {
    fn i() -> Self;
    fn re_im(re: Self::Real, im: Self::Real) -> Self;
    type Real: Clone;
}

impl Field for f64 {
    const EXACT: bool = false;
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn mag(&self) -> f64 {
        self.abs()
    }
    fn conj(&self) -> Self {
        *self
    }
    fn to_c64(&self) -> C64 {
        C64::new(*self, 0.0)
    }
}

impl Field for C64 {
    const EXACT: bool = false;
    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }
    fn mag(&self) -> f64 {
        self.norm()
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
}

impl Field for Q {
    const EXACT: bool = true;
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn mag(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Field for CQ {
    const EXACT: bool = true;
    fn from_i64(v: i64) -> Self {
        Complex::new(Q::from_i64(v), Q::zero())
    }
    fn mag(&self) -> f64 {
        self.re.mag().max(self.im.mag())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl ComplexField for C64 {
    type Real = f64;
    fn i() -> Self {
        C64::new(0.0, 1.0)
    }
    fn re_im(re: f64, im: f64) -> Self {
        C64::new(re, im)
    }
}

impl ComplexField for CQ {
    type Real = Q;
    fn i() -> Self {
        Complex::new(Q::zero(), Q::one())
    }
    fn re_im(re: Q, im: Q) -> Self {
        Complex::new(re, im)
    }
}

pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn cq(re: Q, im: Q) -> CQ {
    Complex::new(re, im)
}

pub fn cq_int(re: i64, im: i64) -> CQ {
    Complex::new(Q::from_i64(re), Q::from_i64(im))
}

/// Nearest rational with denominator at most `max_den`, if it is within `tol`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<Q> {
    for den in 1..=max_den {
        let num = (x * den as f64).round();
        if (num / den as f64 - x).abs() <= tol {
            return Some(q(num as i64, den));
        }
    }
    None
}

pub fn rationalize_c(z: C64, max_den: i64, tol: f64) -> Option<CQ> {
    Some(cq(rationalize(z.re, max_den, tol)?, rationalize(z.im, max_den, tol)?))
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
