use std::ops::{Add, Deref, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use super::{eig_hermitian, Spectral};
use crate::error::{Error, Result};
use crate::scalar::{creal, CMatrix, Scalar, Tolerances};

/// A d×d complex Hermitian operator.
///
/// Construction symmetrizes the input as `(H + H†)/2`, so accumulated
/// round-off asymmetry from upstream arithmetic is absorbed rather than
/// rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Scalar> {
    data: CMatrix<T>,
}

impl<T: Scalar> HermitianMatrix<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(m: CMatrix<T>) -> Self {
        let half = creal(T::lit(0.5));
        let adj = m.adjoint();
        let mut data = (m + adj) * half;
        for i in 0..data.nrows() {
            data[(i, i)].im = T::zero();
        }
        HermitianMatrix { data }
    }

    pub fn zeros(d: usize) -> Self {
        HermitianMatrix {
            data: CMatrix::zeros(d, d),
        }
    }

    pub fn identity(d: usize) -> Self {
        HermitianMatrix {
            data: CMatrix::identity(d, d),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let d = diag.len();
        let mut data = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            data[(i, i)] = creal(x);
        }
        HermitianMatrix { data }
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` (not normalized).
    pub fn projector(psi: &crate::scalar::CVector<T>) -> Self {
        Self::symmetrized(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.data
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.data[(i, i)].re)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Hilbert-Schmidt inner product `Tr(A B)`, real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b).re)
    }

    pub fn scale(&self, c: T) -> Self {
        HermitianMatrix {
            data: &self.data * creal(c),
        }
    }

    /// `A − (Tr A / d)·𝟙`.
    pub fn traceless_part(&self) -> Self {
        let shift = self.trace() / T::lit(self.dim() as f64);
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[(i, i)].re -= shift;
        }
        HermitianMatrix { data }
    }

    pub fn eig(&self) -> Result<Spectral<T>> {
        eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eig()?.min())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        HermitianMatrix {
            data: self.data.kronecker(&other.data),
        }
    }
}

impl<T: Scalar> Add for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn add(self, rhs: Self) -> HermitianMatrix<T> {
        HermitianMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl<T: Scalar> Sub for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn sub(self, rhs: Self) -> HermitianMatrix<T> {
        HermitianMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl<T: Scalar> Neg for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn neg(self) -> HermitianMatrix<T> {
        HermitianMatrix {
            data: -&self.data,
        }
    }
}

impl<T: Scalar> Mul<T> for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn mul(self, rhs: T) -> HermitianMatrix<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Serialize for HermitianMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::io::serialize_cmatrix(&self.data, s)
    }
}

/// A positive semidefinite matrix with its (cached) spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdMatrix<T: Scalar> {
    herm: HermitianMatrix<T>,
    spectral: Spectral<T>,
}

impl<T: Scalar> PsdMatrix<T> {
    /// Accepts `h` when its smallest eigenvalue is at least `−tol_psd·max(1, Tr h)`.
    pub fn new(h: HermitianMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let spectral = h.eig()?;
        if spectral.min() < -tol.psd_threshold(h.trace()) {
            return Err(Error::NotPsd {
                min_eigenvalue: spectral.min().as_f64(),
            });
        }
        Ok(PsdMatrix { herm: h, spectral })
    }

    pub fn min_eigenvalue(&self) -> T {
        self.spectral.min()
    }

    pub fn spectral(&self) -> &Spectral<T> {
        &self.spectral
    }

    pub fn hermitian(&self) -> &HermitianMatrix<T> {
        &self.herm
    }

    pub fn into_hermitian(self) -> HermitianMatrix<T> {
        self.herm
    }

    pub fn interior_threshold(&self, tol: &Tolerances<T>) -> T {
        tol.interior_threshold(self.herm.trace(), self.herm.dim())
    }

    /// `min eigenvalue > tol_interior · trace / dim`.
    pub fn is_interior(&self, tol: &Tolerances<T>) -> bool {
        self.min_eigenvalue() > self.interior_threshold(tol)
    }

    pub fn require_interior(&self, tol: &Tolerances<T>) -> Result<()> {
        if self.is_interior(tol) {
            Ok(())
        } else {
            Err(Error::SingularBasepoint {
                min_eigenvalue: self.min_eigenvalue().as_f64(),
                threshold: self.interior_threshold(tol).as_f64(),
            })
        }
    }
}

impl<T: Scalar> Deref for PsdMatrix<T> {
    type Target = HermitianMatrix<T>;
    fn deref(&self) -> &HermitianMatrix<T> {
        &self.herm
    }
}

impl<T: Scalar> Serialize for PsdMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.herm.serialize(s)
    }
}

/// A unit-trace PSD matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar>(PsdMatrix<T>);

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(h: HermitianMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let trace = h.trace();
        if (trace - T::one()).abs() > T::lit(T::TOL_TRACE) {
            return Err(Error::InvalidTrace {
                trace: trace.as_f64(),
            });
        }
        Ok(DensityMatrix(PsdMatrix::new(h, tol)?))
    }

    /// Normalizes a PSD matrix to unit trace.
    pub fn normalized(h: HermitianMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let trace = h.trace();
        if trace <= T::zero() {
            return Err(Error::InvalidTrace {
                trace: trace.as_f64(),
            });
        }
        Self::new(h.scale(T::one() / trace), tol)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let h = HermitianMatrix::identity(d).scale(T::one() / T::lit(d as f64));
        let spectral = h.eig().expect("identity spectrum");
        DensityMatrix(PsdMatrix { herm: h, spectral })
    }

    pub fn psd(&self) -> &PsdMatrix<T> {
        &self.0
    }

    pub fn into_psd(self) -> PsdMatrix<T> {
        self.0
    }
}

impl<T: Scalar> Deref for DensityMatrix<T> {
    type Target = PsdMatrix<T>;
    fn deref(&self) -> &PsdMatrix<T> {
        &self.0
    }
}

impl<T: Scalar> Serialize for DensityMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// A Hermitian perturbation δρ, optionally restricted to the traceless
/// (state-manifold) tangent space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentVector<T: Scalar> {
    matrix: HermitianMatrix<T>,
    traceless: bool,
}

impl<T: Scalar> TangentVector<T> {
    /// Unrestricted tangent to the PSD cone.
    pub fn general(h: HermitianMatrix<T>) -> Self {
        TangentVector {
            matrix: h,
            traceless: false,
        }
    }

    /// Traceless tangent; fails when `|Tr h|` exceeds the trace tolerance.
    pub fn traceless(h: HermitianMatrix<T>) -> Result<Self> {
        let tr = h.trace();
        let scale = h.frobenius_norm().max(T::one());
        if tr.abs() > T::lit(T::TOL_TRACE) * scale {
            return Err(Error::NotTraceless { trace: tr.as_f64() });
        }
        Ok(TangentVector {
            matrix: h,
            traceless: true,
        })
    }

    /// Projects onto the traceless subspace.
    pub fn project_traceless(h: &HermitianMatrix<T>) -> Self {
        TangentVector {
            matrix: h.traceless_part(),
            traceless: true,
        }
    }

    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    /// Rescales to unit Frobenius norm; `None` for the zero matrix.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.matrix.frobenius_norm();
        if n <= T::zero() || !n.is_finite() {
            return None;
        }
        Some(TangentVector {
            matrix: self.matrix.scale(T::one() / n),
            traceless: self.traceless,
        })
    }
}

impl<T: Scalar> Deref for TangentVector<T> {
    type Target = HermitianMatrix<T>;
    fn deref(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }
}
