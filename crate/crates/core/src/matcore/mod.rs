//! Complex Hermitian linear algebra: matrix types, eigendecomposition,
//! column-stacking vectorization, multiplication superoperators and seeded
//! samplers for states, tangents and unitaries.

mod hermitian;
mod sampling;
mod spectral;
mod superop;

pub use hermitian::{DensityMatrix, HermitianMatrix, PsdMatrix, TangentVector};
pub use sampling::{
    derive_seed, ginibre, random_density, random_density_with, random_pure_state,
    random_tangent, random_tangent_with, random_unitary, random_unitary_with, seeded_rng,
};
pub use spectral::{eig_hermitian, Spectral};
pub use superop::{devectorize, left_mult_superop, right_mult_superop, superop_dim, vectorize, Superoperator};
