use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::matcore::seeded_rng;
use crate::scalar::Scalar;

/// A square real matrix acting on probability vectors by `p ↦ T p`.
///
/// `is_stochastic` holds when every column sums to one within `1e-12` and no
/// entry is below `−1e-12`. Non-stochastic matrices are kept so that the
/// classical certifier can find their witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMap<T: Scalar> {
    matrix: DMatrix<T>,
    stochastic: bool,
}

impl<T: Scalar> StochasticMap<T> {
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::param("matrix", "empty matrix"));
        }
        let stochastic = column_sum_residual(&matrix) <= T::lit(1e-12)
            && matrix.iter().all(|&x| x >= T::lit(-1e-12));
        Ok(StochasticMap { matrix, stochastic })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    /// Largest `|Σ_i T_ij − 1|` over the columns.
    pub fn column_sum_residual(&self) -> T {
        column_sum_residual(&self.matrix)
    }

    pub fn apply(&self, p: &DVector<T>) -> Result<DVector<T>> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(&self.matrix * p)
    }
}

fn column_sum_residual<T: Scalar>(m: &DMatrix<T>) -> T {
    m.column_iter()
        .map(|c| (c.sum() - T::one()).abs())
        .fold(T::zero(), |a, b| a.max(b))
}

pub fn stochastic_apply<T: Scalar>(t: &StochasticMap<T>, p: &DVector<T>) -> Result<DVector<T>> {
    t.apply(p)
}

/// Uniform point of the open simplex (flat Dirichlet), drawn from normalized
/// exponentials.
pub fn random_simplex_point<T: Scalar, R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<T> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    DVector::from_iterator(n, e.into_iter().map(|x| T::lit(x / s)))
}

/// Column-stochastic matrix with independent flat-Dirichlet columns.
pub fn random_stochastic<T: Scalar>(n: usize, seed: u64) -> Result<StochasticMap<T>> {
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m.set_column(j, &random_simplex_point::<T, _>(n, &mut rng));
    }
    StochasticMap::new(m)
}

pub fn identity_stochastic<T: Scalar>(n: usize) -> Result<StochasticMap<T>> {
    StochasticMap::new(DMatrix::identity(n, n))
}

/// `T e_j = e_{perm[j]}`.
pub fn permutation<T: Scalar>(perm: &[usize]) -> Result<StochasticMap<T>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::param("perm", format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let mut m = DMatrix::zeros(n, n);
    for (j, &p) in perm.iter().enumerate() {
        m[(p, j)] = T::one();
    }
    StochasticMap::new(m)
}

/// Every column uniform: sends the whole simplex to its barycenter.
pub fn uniform_mixer<T: Scalar>(n: usize) -> Result<StochasticMap<T>> {
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    StochasticMap::new(DMatrix::from_element(n, n, T::one() / T::lit(n as f64)))
}

/// A random stochastic matrix with entry `(0, 0)` replaced by `value`; the
/// largest other entry of column 0 absorbs the difference so columns still sum
/// to one.
pub fn negative_entry<T: Scalar>(n: usize, seed: u64, value: T) -> Result<StochasticMap<T>> {
    if n < 2 {
        return Err(Error::param("n", "need at least two states"));
    }
    let mut m = random_stochastic::<T>(n, seed)?.matrix;
    let delta = m[(0, 0)] - value;
    let target = (1..n)
        .max_by(|&a, &b| m[(a, 0)].partial_cmp(&m[(b, 0)]).unwrap_or(std::cmp::Ordering::Equal))
        .expect("n >= 2");
    m[(0, 0)] = value;
    m[(target, 0)] += delta;
    StochasticMap::new(m)
}
