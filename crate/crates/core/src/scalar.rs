use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::C64;

/// Field of series arguments: `f64` or `C64`.
///
/// Real-only code paths (lattice sums, measures) stay in `f64`; the complex
/// paths share the same series code.
pub trait Scalar:
    Copy
    + PartialEq
    + core::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
    fn scale(self, x: f64) -> Self;
    fn to_complex(self) -> C64;
}

impl Scalar for f64 {
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn modulus(self) -> f64 {
        num_traits::Float::abs(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn to_complex(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Scalar for C64 {
    #[inline]
    fn from_real(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn modulus(self) -> f64 {
        libm_hypot(self.re, self.im)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn to_complex(self) -> C64 {
        self
    }
}

#[inline]
fn libm_hypot(a: f64, b: f64) -> f64 {
    num_traits::Float::hypot(a, b)
}
