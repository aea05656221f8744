use nalgebra::DVector;

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::scalar::{CMatrix, CVector, Scalar};

/// Column-stacking vectorization: column `j` of `A` occupies slots
/// `j·d .. j·d + d − 1`.
pub fn vectorize<T: Scalar>(a: &CMatrix<T>) -> CVector<T> {
    // nalgebra storage is column-major, which is exactly column stacking.
    DVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vectorize`]. Fails when the length is not a perfect square.
pub fn devectorize<T: Scalar>(v: &CVector<T>) -> Result<CMatrix<T>> {
    let n = v.len();
    let d = isqrt(n).ok_or(Error::NotPerfectSquare(n))?;
    Ok(CMatrix::from_column_slice(d, d, v.as_slice()))
}

pub(crate) fn isqrt(n: usize) -> Option<usize> {
    let d = (n as f64).sqrt().round() as usize;
    (d * d == n).then_some(d)
}

/// `d` for a square `d²×d²` matrix.
pub fn superop_dim<T: Scalar>(m: &CMatrix<T>) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    isqrt(m.nrows()).ok_or(Error::NotPerfectSquare(m.nrows()))
}

/// A d²×d² matrix acting on column-stacked d×d matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<T: Scalar> {
    dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Scalar> Superoperator<T> {
    pub fn from_matrix(matrix: CMatrix<T>) -> Result<Self> {
        let dim = superop_dim(&matrix)?;
        Ok(Superoperator { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.nrows(),
            });
        }
        devectorize(&(&self.matrix * vectorize(a)))
    }

    pub fn compose(&self, other: &Self) -> Self {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }
}

/// `𝕃_ρ[A] = ρA`, i.e. `𝟙 ⊗ ρ` under column stacking.
pub fn left_mult_superop<T: Scalar>(rho: &HermitianMatrix<T>) -> Superoperator<T> {
    let d = rho.dim();
    Superoperator {
        dim: d,
        matrix: CMatrix::<T>::identity(d, d).kronecker(rho.as_matrix()),
    }
}

/// `ℝ_ρ[A] = Aρ`, i.e. `ρᵀ ⊗ 𝟙` under column stacking.
pub fn right_mult_superop<T: Scalar>(rho: &HermitianMatrix<T>) -> Superoperator<T> {
    let d = rho.dim();
    Superoperator {
        dim: d,
        matrix: rho.as_matrix().transpose().kronecker(&CMatrix::<T>::identity(d, d)),
    }
}
