use nalgebra::linalg::SymmetricEigen;
use nalgebra::DVector;

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::scalar::{modulus, CMatrix, CVector, Scalar};

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending. Each eigenvector column is phase-fixed so its
/// largest-magnitude component (lowest index on ties) is real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectral<T: Scalar> {
    pub eigenvalues: DVector<T>,
    pub eigenvectors: CMatrix<T>,
}

impl<T: Scalar> Spectral<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        self.eigenvalues[self.dim() - 1]
    }

    /// Eigenvector of the smallest eigenvalue.
    pub fn bottom_vector(&self) -> CVector<T> {
        self.eigenvectors.column(0).into_owned()
    }

    /// `V · diag(λ) · V†`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= crate::scalar::creal(self.eigenvalues[j]);
        }
        scaled * v.adjoint()
    }

    /// Applies a scalar function to the spectrum: `V · diag(h(λ)) · V†`.
    pub fn map_spectrum(&self, mut h: impl FnMut(T) -> T) -> CMatrix<T> {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= crate::scalar::creal(h(self.eigenvalues[j]));
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues and fixed phases.
pub fn eig_hermitian<T: Scalar>(h: &HermitianMatrix<T>) -> Result<Spectral<T>> {
    let m = h.as_matrix();
    let d = m.nrows();
    let dump = || Error::EigenNonConvergence {
        dump: format!("{m:?}"),
    };
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(dump());
    }
    let se = SymmetricEigen::try_new(m.clone(), T::default_epsilon(), 100_000).ok_or_else(dump)?;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let eigenvalues = DVector::from_iterator(d, order.iter().map(|&i| se.eigenvalues[i]));
    let mut eigenvectors = CMatrix::<T>::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        let mut v = se.eigenvectors.column(i).into_owned();
        let mut best = 0;
        let mut best_mod = T::zero();
        for (k, z) in v.iter().enumerate() {
            let m = modulus(*z);
            if m > best_mod {
                best = k;
                best_mod = m;
            }
        }
        if best_mod > T::zero() {
            let phase = v[best].conj() / crate::scalar::creal(best_mod);
            v *= phase;
            v[best].im = T::zero();
        }
        eigenvectors.set_column(col, &v);
    }
    Ok(Spectral {
        eigenvalues,
        eigenvectors,
    })
}
