use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DensityMatrix, HermitianMatrix, TangentVector};
use crate::error::{Error, Result};
use crate::scalar::{cplx, creal, modulus, CMatrix, CVector, Scalar, Tolerances};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer over `(seed, stream, index)`. Used so that every
/// sample in a parallel loop owns an independent generator.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = StandardNormal.sample(rng);
    T::lit(x)
}

/// Ginibre matrix with i.i.d. entries `(N(0,1) + i N(0,1)) / √2`.
pub fn ginibre<T: Scalar, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    // Draw row by row so the stream order is independent of storage layout.
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: T = normal(rng);
            let im: T = normal(rng);
            m[(i, j)] = cplx(re * s, im * s);
        }
    }
    m
}

/// Uniformly (Haar) distributed unit vector in ℂᵈ.
pub fn random_pure_state<T: Scalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector<T> {
    let g = ginibre::<T, R>(d, 1, rng);
    let n = g.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
    CVector::from_iterator(d, g.iter().map(|z| *z / creal(n)))
}

/// Hilbert-Schmidt-type random state `G G† / Tr(G G†)` with `G` a d×rank Ginibre
/// matrix. `rank ≥ d` gives full-rank (interior) states with probability one;
/// smaller ranks bias the sample towards purer states.
pub fn random_density<T: Scalar>(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix<T>> {
    random_density_with(d, rank, &mut seeded_rng(seed))
}

pub fn random_density_with<T: Scalar, R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix<T>> {
    if d == 0 {
        return Err(Error::param("d", "dimension must be positive"));
    }
    if rank == 0 {
        return Err(Error::param("rank", "rank must be positive"));
    }
    let g = ginibre::<T, R>(d, rank, rng);
    let h = HermitianMatrix::symmetrized(&g * g.adjoint());
    DensityMatrix::normalized(h, &Tolerances::default())
}

/// GUE-type Hermitian direction, optionally projected onto the traceless
/// subspace, normalized to unit Frobenius norm.
pub fn random_tangent<T: Scalar>(d: usize, seed: u64, traceless: bool) -> TangentVector<T> {
    random_tangent_with(d, traceless, &mut seeded_rng(seed))
}

pub fn random_tangent_with<T: Scalar, R: Rng + ?Sized>(
    d: usize,
    traceless: bool,
    rng: &mut R,
) -> TangentVector<T> {
    loop {
        let g = ginibre::<T, R>(d, d, rng);
        let h = HermitianMatrix::symmetrized(g);
        let t = if traceless {
            TangentVector::project_traceless(&h)
        } else {
            TangentVector::general(h)
        };
        // d = 1 traceless has no nonzero direction; the zero tangent is returned then.
        if d == 1 && traceless {
            return t;
        }
        if let Some(n) = t.normalized() {
            return n;
        }
    }
}

/// Haar unitary via QR of a Ginibre matrix with the phases of `R`'s diagonal
/// absorbed into `Q`.
pub fn random_unitary<T: Scalar>(d: usize, seed: u64) -> CMatrix<T> {
    random_unitary_with(d, &mut seeded_rng(seed))
}

pub fn random_unitary_with<T: Scalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    let g = ginibre::<T, R>(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let m = modulus(rjj);
        let phase = if m > T::zero() {
            rjj / creal(m)
        } else {
            creal(T::one())
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}
