//! Scalar abstraction shared by every numerical module.
//!
//! All linear algebra is written against [`Scalar`], which is implemented for
//! `f64` (the reference precision) and `f32`. Tolerances scale with the
//! precision of the underlying type.

use nalgebra::{Complex, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// A real floating point type usable as the field of the complex matrices.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + serde::Serialize + Send + Sync + 'static
{
    /// Absolute PSD slack, multiplied by `max(1, trace)`.
    const TOL_PSD: f64;
    /// Relative interior margin, multiplied by `trace / dim`.
    const TOL_INTERIOR: f64;
    /// Hermiticity residual accepted for maps and Choi matrices.
    const TOL_HERMITIAN: f64;
    /// Trace normalization slack for states and traceless tangents.
    const TOL_TRACE: f64;

    /// Converts an `f64` literal. Panics only for values the type cannot represent at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const TOL_PSD: f64 = 1e-10;
    const TOL_INTERIOR: f64 = 1e-8;
    const TOL_HERMITIAN: f64 = 1e-10;
    const TOL_TRACE: f64 = 1e-12;
}

impl Scalar for f32 {
    const TOL_PSD: f64 = 1e-5;
    const TOL_INTERIOR: f64 = 1e-4;
    const TOL_HERMITIAN: f64 = 1e-5;
    const TOL_TRACE: f64 = 1e-6;
}

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub(crate) fn cplx<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn creal<T: Scalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn modulus<T: Scalar>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Numerical thresholds used to decide PSD membership and interior-ness.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Tolerances<T> {
    pub psd: T,
    pub interior: T,
    pub hermitian: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            psd: T::lit(T::TOL_PSD),
            interior: T::lit(T::TOL_INTERIOR),
            hermitian: T::lit(T::TOL_HERMITIAN),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    /// `tol_psd · max(1, trace)`.
    pub fn psd_threshold(&self, trace: T) -> T {
        self.psd * trace.abs().max(T::one())
    }

    /// `tol_interior · trace / dim`.
    pub fn interior_threshold(&self, trace: T, dim: usize) -> T {
        self.interior * trace.abs() / T::lit(dim as f64)
    }
}
