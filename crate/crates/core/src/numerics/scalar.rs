//! Scalar abstractions shared by the grid, quadrature, linear-algebra and
//! transform layers.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Zero};

/// Real floating-point type usable on grids and in transforms.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + rustfft::FftNum + Default + Display + Debug + Send + Sync + 'static
{
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("representable constant")
    }
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("representable count")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field element for dense linear algebra: a real or complex float.
pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + NumAssign
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    type Real: Real;
    fn modulus(self) -> Self::Real;
    fn conjugate(self) -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn scale(self, r: Self::Real) -> Self;
    fn exp(self) -> Self;
    fn is_finite(self) -> bool;
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            fn modulus(self) -> $t {
                self.abs()
            }
            fn conjugate(self) -> $t {
                self
            }
            fn from_real(r: $t) -> $t {
                r
            }
            fn scale(self, r: $t) -> $t {
                self * r
            }
            fn exp(self) -> $t {
                Float::exp(self)
            }
            fn is_finite(self) -> bool {
                Float::is_finite(self)
            }
        }

        impl Scalar for Complex<$t> {
            type Real = $t;
            fn modulus(self) -> $t {
                self.norm()
            }
            fn conjugate(self) -> Self {
                self.conj()
            }
            fn from_real(r: $t) -> Self {
                Complex::new(r, 0.0)
            }
            fn scale(self, r: $t) -> Self {
                Complex::new(self.re * r, self.im * r)
            }
            fn exp(self) -> Self {
                Complex::exp(self)
            }
            fn is_finite(self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
        }
    };
}

real_scalar!(f32);
real_scalar!(f64);
