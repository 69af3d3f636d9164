//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::{Complex, DMatrix, DVector, RealField};
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the simulation is generic over (`f32` or `f64`).
pub trait Real: RealField + Copy + FloatConst + FromPrimitive + ToPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over `T`.
pub type Cx<T> = Complex<T>;

/// Dense complex matrix; used for operators, density matrices and superoperators.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Dense complex column vector.
pub type CVector<T> = DVector<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Cx<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
