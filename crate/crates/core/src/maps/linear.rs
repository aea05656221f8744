use crate::error::{Error, Result};
use crate::matcore::{devectorize, superop_dim, vectorize, HermitianMatrix};
use crate::scalar::{creal, CMatrix, Scalar};

/// One term `w·K X K†` of a (possibly signed) Kraus decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausTerm<T: Scalar> {
    pub weight: T,
    pub op: CMatrix<T>,
}

/// The representation a map was constructed from.
#[derive(Clone, Debug, PartialEq)]
pub enum MapRepr<T: Scalar> {
    Kraus(Vec<KrausTerm<T>>),
    Transfer(CMatrix<T>),
    Choi(CMatrix<T>),
}

impl<T: Scalar> MapRepr<T> {
    pub fn name(&self) -> &'static str {
        match self {
            MapRepr::Kraus(_) => "kraus",
            MapRepr::Transfer(_) => "transfer",
            MapRepr::Choi(_) => "choi",
        }
    }
}

/// A linear map `ℳ_d(ℂ) → ℳ_d(ℂ)`.
///
/// The transfer matrix (acting on column-stacked matrices) is computed once at
/// construction and backs every conversion. The Choi matrix has block `(i, j)`
/// equal to `Φ(E_ij)`, i.e. `C[i·d + a, j·d + b] = Φ(E_ij)[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<T: Scalar> {
    dim: usize,
    repr: MapRepr<T>,
    transfer: CMatrix<T>,
}

fn kraus_transfer<T: Scalar>(d: usize, terms: &[KrausTerm<T>]) -> CMatrix<T> {
    let mut t = CMatrix::zeros(d * d, d * d);
    for term in terms {
        let conj = term.op.map(|z| z.conj());
        t += conj.kronecker(&term.op) * creal(term.weight);
    }
    t
}

/// `C[i·d + a, j·d + b] = T[b·d + a, j·d + i]`. The reshuffle is an involution
/// up to relabelling, so the same index map converts back.
fn reshuffle<T: Scalar>(d: usize, m: &CMatrix<T>, to_choi: bool) -> CMatrix<T> {
    let mut out = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let (c, t) = ((i * d + a, j * d + b), (b * d + a, j * d + i));
                    if to_choi {
                        out[c] = m[t];
                    } else {
                        out[t] = m[c];
                    }
                }
            }
        }
    }
    out
}

fn frobenius<T: Scalar>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

impl<T: Scalar> LinearMap<T> {
    pub fn from_kraus(ops: Vec<CMatrix<T>>) -> Result<Self> {
        Self::from_weighted_kraus(
            ops.into_iter()
                .map(|op| KrausTerm {
                    weight: T::one(),
                    op,
                })
                .collect(),
        )
    }

    /// Kraus form with real weights `Σ w_k K_k X K_k†`. Negative weights give
    /// Hermitian-preserving maps that are not completely positive.
    pub fn from_weighted_kraus(terms: Vec<KrausTerm<T>>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::param("kraus", "at least one operator is required"))?;
        let d = first.op.nrows();
        for term in &terms {
            if !term.op.is_square() {
                return Err(Error::NotSquare {
                    rows: term.op.nrows(),
                    cols: term.op.ncols(),
                });
            }
            if term.op.nrows() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: term.op.nrows(),
                });
            }
        }
        let transfer = kraus_transfer(d, &terms);
        Ok(LinearMap {
            dim: d,
            repr: MapRepr::Kraus(terms),
            transfer,
        })
    }

    pub fn from_transfer(m: CMatrix<T>) -> Result<Self> {
        let d = superop_dim(&m)?;
        Ok(LinearMap {
            dim: d,
            repr: MapRepr::Transfer(m.clone()),
            transfer: m,
        })
    }

    pub fn from_choi(m: CMatrix<T>) -> Result<Self> {
        let d = superop_dim(&m)?;
        let transfer = reshuffle(d, &m, false);
        Ok(LinearMap {
            dim: d,
            repr: MapRepr::Choi(m),
            transfer,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &MapRepr<T> {
        &self.repr
    }

    pub fn transfer(&self) -> &CMatrix<T> {
        &self.transfer
    }

    pub fn choi(&self) -> CMatrix<T> {
        match &self.repr {
            MapRepr::Choi(c) => c.clone(),
            _ => reshuffle(self.dim, &self.transfer, true),
        }
    }

    /// Kraus decomposition. Kraus-built maps return their own terms; otherwise
    /// the Choi matrix is diagonalized, `K[a, i] = √|λ|·v[i·d + a]` with weight
    /// `sign(λ)`, and components with `|λ| < 1e-12` are dropped.
    pub fn to_kraus(&self) -> Result<Vec<KrausTerm<T>>> {
        if let MapRepr::Kraus(terms) = &self.repr {
            return Ok(terms.clone());
        }
        let residual = self.hp_residual();
        if residual >= T::lit(T::TOL_HERMITIAN) {
            return Err(Error::NotHermitianPreserving {
                residual: residual.as_f64(),
            });
        }
        let d = self.dim;
        let spec = HermitianMatrix::new(self.choi())?.eig()?;
        let cutoff = T::lit(1e-12);
        let mut terms = Vec::new();
        for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
            if lambda.abs() < cutoff {
                continue;
            }
            let s = creal(lambda.abs().sqrt());
            let v = spec.eigenvectors.column(k);
            let op = CMatrix::from_fn(d, d, |a, i| v[i * d + a] * s);
            let weight = if lambda > T::zero() { T::one() } else { -T::one() };
            terms.push(KrausTerm { weight, op });
        }
        if terms.is_empty() {
            terms.push(KrausTerm {
                weight: T::zero(),
                op: CMatrix::zeros(d, d),
            });
        }
        Ok(terms)
    }

    fn check_input(&self, x: &CMatrix<T>) -> Result<()> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.nrows(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_input(x)?;
        match &self.repr {
            MapRepr::Kraus(terms) => {
                let mut out = CMatrix::zeros(self.dim, self.dim);
                for term in terms {
                    out += &term.op * x * term.op.adjoint() * creal(term.weight);
                }
                Ok(out)
            }
            _ => self.apply_transfer(x),
        }
    }

    /// Application through the transfer matrix regardless of representation.
    pub fn apply_transfer(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_input(x)?;
        devectorize(&(&self.transfer * vectorize(x)))
    }

    /// Image of a Hermitian input, symmetrized. Meaningful for
    /// Hermitian-preserving maps.
    pub fn apply_hermitian(&self, h: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
        HermitianMatrix::new(self.apply(h.as_matrix())?)
    }

    /// Hilbert-Schmidt adjoint: `Tr(A† Φ(X)) = Tr(Φ†(A)† X)`.
    pub fn adjoint(&self) -> Self {
        match &self.repr {
            MapRepr::Kraus(terms) => {
                let terms: Vec<_> = terms
                    .iter()
                    .map(|t| KrausTerm {
                        weight: t.weight,
                        op: t.op.adjoint(),
                    })
                    .collect();
                let transfer = kraus_transfer(self.dim, &terms);
                LinearMap {
                    dim: self.dim,
                    repr: MapRepr::Kraus(terms),
                    transfer,
                }
            }
            _ => {
                let t = self.transfer.adjoint();
                LinearMap {
                    dim: self.dim,
                    repr: MapRepr::Transfer(t.clone()),
                    transfer: t,
                }
            }
        }
    }

    /// `c·Φ`, keeping the representation kind.
    pub fn scaled(&self, c: T) -> Self {
        let repr = match &self.repr {
            MapRepr::Kraus(terms) => MapRepr::Kraus(
                terms
                    .iter()
                    .map(|t| KrausTerm {
                        weight: t.weight * c,
                        op: t.op.clone(),
                    })
                    .collect(),
            ),
            MapRepr::Transfer(t) => MapRepr::Transfer(t * creal(c)),
            MapRepr::Choi(m) => MapRepr::Choi(m * creal(c)),
        };
        LinearMap {
            dim: self.dim,
            repr,
            transfer: &self.transfer * creal(c),
        }
    }

    /// Real linear combination `Σ w_k Φ_k`. Kraus inputs stay in Kraus form.
    pub fn combination(parts: &[(T, &LinearMap<T>)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::param("mixture", "at least one component is required"))?;
        let d = first.dim;
        if let Some((_, bad)) = parts.iter().find(|(_, m)| m.dim != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim,
            });
        }
        if parts.iter().all(|(_, m)| matches!(m.repr, MapRepr::Kraus(_))) {
            let mut terms = Vec::new();
            for (w, m) in parts {
                if let MapRepr::Kraus(ts) = &m.scaled(*w).repr {
                    terms.extend(ts.iter().cloned());
                }
            }
            return Self::from_weighted_kraus(terms);
        }
        let mut t = CMatrix::zeros(d * d, d * d);
        for (w, m) in parts {
            t += &m.transfer * creal(*w);
        }
        Self::from_transfer(t)
    }

    /// `Φ ⊗ 𝟙_n` on `ℂ^d ⊗ ℂ^n`, system factor first in the Kronecker order.
    pub fn tensor_identity(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("ancilla", "ancilla dimension must be positive"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        if let MapRepr::Kraus(terms) = &self.repr {
            let eye = CMatrix::<T>::identity(n, n);
            return Self::from_weighted_kraus(
                terms
                    .iter()
                    .map(|t| KrausTerm {
                        weight: t.weight,
                        op: t.op.kronecker(&eye),
                    })
                    .collect(),
            );
        }
        let d = self.dim;
        let big = d * n;
        let mut t = CMatrix::zeros(big * big, big * big);
        let mut unit = CMatrix::<T>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                unit[(i, j)] = creal(T::one());
                let image = self.apply_transfer(&unit)?;
                unit[(i, j)] = creal(T::zero());
                for alpha in 0..n {
                    for beta in 0..n {
                        let col = (j * n + beta) * big + (i * n + alpha);
                        // (Φ(E_ij) ⊗ E_αβ)[(a, α), (b, β)] = Φ(E_ij)[a, b].
                        for a in 0..d {
                            for b in 0..d {
                                let row = (b * n + beta) * big + (a * n + alpha);
                                t[(row, col)] = image[(a, b)];
                            }
                        }
                    }
                }
            }
        }
        Self::from_transfer(t)
    }

    /// `‖Σ w K†K − 𝟙‖_F` for Kraus maps, otherwise the Frobenius distance of the
    /// output partial trace of the Choi matrix from `𝟙`.
    pub fn tp_residual(&self) -> T {
        let d = self.dim;
        let mut m = CMatrix::<T>::zeros(d, d);
        match &self.repr {
            MapRepr::Kraus(terms) => {
                for t in terms {
                    m += t.op.adjoint() * &t.op * creal(t.weight);
                }
            }
            _ => {
                // Tr Φ(E_ij) = Σ_a T[a·d + a, j·d + i]
                for i in 0..d {
                    for j in 0..d {
                        let mut s = creal(T::zero());
                        for a in 0..d {
                            s += self.transfer[(a * d + a, j * d + i)];
                        }
                        m[(i, j)] = s;
                    }
                }
            }
        }
        frobenius(&(m - CMatrix::identity(d, d)))
    }

    pub fn is_tp(&self) -> bool {
        self.tp_residual() < T::lit(T::TOL_HERMITIAN)
    }

    /// `‖C − C†‖_F` for the Choi matrix `C`.
    pub fn hp_residual(&self) -> T {
        let c = self.choi();
        frobenius(&(&c - c.adjoint()))
    }

    pub fn is_hermitian_preserving(&self) -> bool {
        self.hp_residual() < T::lit(T::TOL_HERMITIAN)
    }

    /// `Φ†(𝟙)`: its largest eigenvalue bounds the trace gain on states.
    pub fn adjoint_identity(&self) -> Result<HermitianMatrix<T>> {
        self.adjoint()
            .apply_hermitian(&HermitianMatrix::identity(self.dim))
    }
}
