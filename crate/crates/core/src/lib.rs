//! Monotone quantum Fisher metrics, contrast functions and contraction-based
//! certification of Hermitian-preserving linear maps.
//!
//! The numerical core is generic over [`Scalar`] (`f64` and `f32`); the
//! aliases at the crate root pin the reference `f64` precision used by the
//! command-line tool and the acceptance suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certifier;
pub mod error;
pub mod geometry;
pub mod io;
pub mod maps;
pub mod matcore;
pub mod monotone;
pub mod scalar;

pub use error::{Error, Result};
pub use monotone::{ContrastGenerator, MonotoneFunction};
pub use scalar::{CMatrix, CVector, Scalar, Tolerances};

pub type HermitianMatrix64 = matcore::HermitianMatrix<f64>;
pub type PsdMatrix64 = matcore::PsdMatrix<f64>;
pub type DensityMatrix64 = matcore::DensityMatrix<f64>;
pub type TangentVector64 = matcore::TangentVector<f64>;
pub type LinearMap64 = maps::LinearMap<f64>;
pub type StochasticMap64 = maps::StochasticMap<f64>;
pub type CertConfig64 = certifier::CertConfig<f64>;
pub type CertReport64 = certifier::CertReport<f64>;
pub type ExpansionWitness64 = certifier::ExpansionWitness<f64>;

pub type HermitianMatrix32 = matcore::HermitianMatrix<f32>;
pub type DensityMatrix32 = matcore::DensityMatrix<f32>;
pub type LinearMap32 = maps::LinearMap<f32>;

