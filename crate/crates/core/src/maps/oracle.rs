use rayon::prelude::*;
use serde::Serialize;

use super::LinearMap;
use crate::error::{Error, Result};
use crate::matcore::{derive_seed, random_pure_state, seeded_rng, HermitianMatrix};
use crate::scalar::{CVector, Scalar, Tolerances};

/// Number of best grid samples handed to the seesaw refinement.
const REFINE_TOP: usize = 8;
const ORACLE_STREAM: u64 = 0x5eed_0001;

/// Ground-truth side of a certification: Choi spectrum, sampled positivity,
/// and structural residuals.
#[derive(Clone, Debug, Serialize)]
pub struct OracleVerdict<T: Scalar> {
    pub is_cp: bool,
    pub is_positive: bool,
    pub is_tp: bool,
    pub is_hp: bool,
    pub min_choi_eigenvalue: Option<T>,
    pub min_output_eigenvalue: Option<T>,
    #[serde(serialize_with = "crate::io::serialize_opt_cvector")]
    pub worst_state: Option<CVector<T>>,
    pub tp_residual: T,
    pub hp_residual: T,
    /// `λ_max(Φ†(𝟙))`, the largest `Tr Φ(ρ)` over states.
    pub max_output_trace: Option<T>,
    pub trace_nonincreasing: bool,
    pub samples: usize,
}

/// Estimate of `min_ψ λ_min(Φ(|ψ⟩⟨ψ|))`.
#[derive(Clone, Debug)]
pub struct PositivityEstimate<T: Scalar> {
    pub min_output_eigenvalue: T,
    pub worst_state: CVector<T>,
    pub samples: usize,
}

fn require_hp<T: Scalar>(map: &LinearMap<T>) -> Result<()> {
    let residual = map.hp_residual();
    if residual >= T::lit(T::TOL_HERMITIAN) {
        return Err(Error::NotHermitianPreserving {
            residual: residual.as_f64(),
        });
    }
    Ok(())
}

/// Smallest eigenvalue of the Choi matrix; CP exactly when it is at least
/// `−tol_psd·max(1, Tr C)`.
pub fn cp_oracle<T: Scalar>(map: &LinearMap<T>, tol: &Tolerances<T>) -> Result<(bool, T)> {
    require_hp(map)?;
    let c = HermitianMatrix::new(map.choi())?;
    let min = c.min_eigenvalue()?;
    Ok((min >= -tol.psd_threshold(c.trace()), min))
}

fn bottom<T: Scalar>(h: &HermitianMatrix<T>) -> Result<(T, CVector<T>)> {
    let s = h.eig()?;
    Ok((s.min(), s.bottom_vector()))
}

/// Seeded random pure states followed by a seesaw refinement of the best
/// candidates: alternately take `φ` as the bottom eigenvector of `Φ(ψψ†)` and
/// `ψ` as the bottom eigenvector of `Φ†(φφ†)`. Each step cannot increase
/// `⟨φ|Φ(ψψ†)|φ⟩`.
///
/// Deterministic per seed regardless of thread count.
pub fn positivity_oracle<T: Scalar>(
    map: &LinearMap<T>,
    n_grid: usize,
    n_refine: usize,
    seed: u64,
) -> Result<PositivityEstimate<T>> {
    require_hp(map)?;
    let d = map.dim();
    let n_grid = n_grid.max(1);
    let mut grid: Vec<(T, usize, CVector<T>)> = (0..n_grid)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded_rng(derive_seed(seed, ORACLE_STREAM, k as u64));
            let psi = random_pure_state::<T, _>(d, &mut rng);
            let out = map.apply_hermitian(&HermitianMatrix::projector(&psi))?;
            Ok((out.min_eigenvalue()?, k, psi))
        })
        .collect::<Result<_>>()?;
    grid.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    grid.truncate(REFINE_TOP);

    let adj = map.adjoint();
    let refined: Vec<(T, usize, CVector<T>)> = grid
        .into_par_iter()
        .map(|(mut best, k, mut psi)| {
            for _ in 0..n_refine {
                let (_, phi) = bottom(&map.apply_hermitian(&HermitianMatrix::projector(&psi))?)?;
                let (_, next) = bottom(&adj.apply_hermitian(&HermitianMatrix::projector(&phi))?)?;
                let value = map
                    .apply_hermitian(&HermitianMatrix::projector(&next))?
                    .min_eigenvalue()?;
                if value < best {
                    let gain = best - value;
                    best = value;
                    psi = next;
                    if gain < T::lit(1e-15) {
                        break;
                    }
                } else {
                    break;
                }
            }
            Ok((best, k, psi))
        })
        .collect::<Result<_>>()?;
    let (value, _, psi) = refined
        .into_iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)))
        .expect("grid is non-empty");
    Ok(PositivityEstimate {
        min_output_eigenvalue: value,
        worst_state: psi,
        samples: n_grid,
    })
}

/// Runs both oracles. A map that is not Hermitian preserving gets all
/// positivity flags false and no spectral evidence.
pub fn oracle_verdict<T: Scalar>(
    map: &LinearMap<T>,
    n_grid: usize,
    n_refine: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<OracleVerdict<T>> {
    let hp_residual = map.hp_residual();
    let tp_residual = map.tp_residual();
    let is_tp = map.is_tp();
    if !map.is_hermitian_preserving() {
        return Ok(OracleVerdict {
            is_cp: false,
            is_positive: false,
            is_tp,
            is_hp: false,
            min_choi_eigenvalue: None,
            min_output_eigenvalue: None,
            worst_state: None,
            tp_residual,
            hp_residual,
            max_output_trace: None,
            trace_nonincreasing: false,
            samples: 0,
        });
    }
    let (is_cp, min_choi) = cp_oracle(map, tol)?;
    let est = positivity_oracle(map, n_grid, n_refine, seed)?;
    let out = map.apply_hermitian(&HermitianMatrix::projector(&est.worst_state))?;
    let sampled_positive = est.min_output_eigenvalue >= -tol.psd_threshold(out.trace());
    let max_trace = map.adjoint_identity()?.eig()?.max();
    Ok(OracleVerdict {
        is_cp,
        is_positive: is_cp || sampled_positive,
        is_tp,
        is_hp: true,
        min_choi_eigenvalue: Some(min_choi),
        min_output_eigenvalue: Some(est.min_output_eigenvalue),
        worst_state: Some(est.worst_state),
        tp_residual,
        hp_residual,
        max_output_trace: Some(max_trace),
        trace_nonincreasing: max_trace <= T::one() + T::lit(T::TOL_HERMITIAN),
        samples: est.samples,
    })
}
