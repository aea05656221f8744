use rayon::prelude::*;
use serde::Serialize;

use super::contraction::interior_image;
use super::witness::boundary_geometry;
use super::{require_hp, CertConfig, STREAM_CONTRAST};
use crate::error::{Error, Result};
use crate::geometry::contrast_eval;
use crate::maps::LinearMap;
use crate::matcore::{derive_seed, random_density_with, seeded_rng, PsdMatrix};
use crate::monotone::ContrastGenerator;
use crate::scalar::Scalar;

/// Absolute slack on top of the relative `ratio_tol` when comparing
/// divergences; identical pairs differ only by rounding.
const ABS_SLACK: f64 = 1e-14;

/// A pair whose divergence grows under the map.
#[derive(Clone, Debug, Serialize)]
pub struct ContrastWitness<T: Scalar> {
    pub rho: PsdMatrix<T>,
    pub sigma: PsdMatrix<T>,
    pub g: ContrastGenerator,
    /// `H_g(ρ‖σ)`
    pub h_in: T,
    /// `H_g(Φ(ρ)‖Φ(σ))`
    pub h_out: T,
    pub eta: Option<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContrastVerdict<T: Scalar> {
    pub g: ContrastGenerator,
    pub n_effective: usize,
    pub n_skipped: usize,
    /// `max (H_out − H_in)` over the evaluated pairs.
    pub max_increase: T,
    pub witness: Option<ContrastWitness<T>>,
}

fn increases<T: Scalar>(h_in: T, h_out: T, ratio_tol: T) -> bool {
    h_out > h_in * (T::one() + ratio_tol) + T::lit(ABS_SLACK)
}

fn pair<T: Scalar>(d: usize, seed: u64, k: usize) -> Result<(PsdMatrix<T>, PsdMatrix<T>)> {
    let mut rng = seeded_rng(derive_seed(seed, STREAM_CONTRAST, k as u64));
    let rho = random_density_with::<T, _>(d, d, &mut rng)?.into_psd();
    let sigma = random_density_with::<T, _>(d, d, &mut rng)?.into_psd();
    Ok((rho, sigma))
}

fn evaluate<T: Scalar>(
    map: &LinearMap<T>,
    g: ContrastGenerator,
    rho: &PsdMatrix<T>,
    sigma: &PsdMatrix<T>,
    cfg: &CertConfig<T>,
) -> Result<Option<(T, T)>> {
    let tol = &cfg.tol;
    if !rho.is_interior(tol) || !sigma.is_interior(tol) {
        return Ok(None);
    }
    let (Some(fr), Some(fs)) = (interior_image(map, rho, tol)?, interior_image(map, sigma, tol)?) else {
        return Ok(None);
    };
    let h_in = contrast_eval(rho, sigma, g, tol)?.value;
    let h_out = contrast_eval(&fr, &fs, g, tol)?.value;
    Ok(Some((h_in, h_out)))
}

/// Samples `n_samples` pairs of interior states and checks
/// `H_g(Φ(ρ)‖Φ(σ)) ≤ H_g(ρ‖σ)`. Pairs with a non-interior image are skipped.
pub fn contrast_contraction_test<T: Scalar>(
    map: &LinearMap<T>,
    g: ContrastGenerator,
    cfg: &CertConfig<T>,
) -> Result<ContrastVerdict<T>> {
    cfg.validate()?;
    g.validate()?;
    require_hp(map)?;
    let d = map.dim();
    let results: Vec<Option<(T, T)>> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|k| {
            let (rho, sigma) = pair::<T>(d, cfg.seed, k)?;
            evaluate(map, g, &rho, &sigma, cfg)
        })
        .collect::<Result<_>>()?;
    let n_effective = results.iter().filter(|r| r.is_some()).count();
    if n_effective == 0 {
        return Err(Error::Condition1Violated {
            attempts: results.len(),
        });
    }
    let max_increase = results
        .iter()
        .flatten()
        .map(|&(a, b)| b - a)
        .fold(T::lit(f64::NEG_INFINITY), |a, b| a.max(b));
    let first = results
        .iter()
        .position(|r| matches!(r, Some((a, b)) if increases(*a, *b, cfg.ratio_tol)));
    let witness = match first {
        Some(k) => {
            let (rho, sigma) = pair::<T>(d, cfg.seed, k)?;
            let (h_in, h_out) = results[k].expect("evaluated");
            Some(ContrastWitness {
                rho,
                sigma,
                g,
                h_in,
                h_out,
                eta: None,
            })
        }
        None => None,
    };
    Ok(ContrastVerdict {
        g,
        n_effective,
        n_skipped: results.len() - n_effective,
        max_increase,
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContrastLevel<T> {
    pub eta: T,
    pub h_in: T,
    pub h_out: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContrastWitnessSearch<T: Scalar> {
    pub g: ContrastGenerator,
    /// The single perturbation size used at every level.
    pub eps: T,
    pub levels: Vec<ContrastLevel<T>>,
    /// First level at which the divergence grows under the map.
    pub witness: Option<ContrastWitness<T>>,
}

impl<T: Scalar> ContrastWitnessSearch<T> {
    /// `H_out` strictly increases along the last `n` levels (decreasing η).
    pub fn grows_over_last(&self, n: usize) -> bool {
        if n < 2 || self.levels.len() < n {
            return false;
        }
        self.levels[self.levels.len() - n..]
            .windows(2)
            .all(|w| w[1].h_out > w[0].h_out)
    }
}

/// Divergence witness along the boundary approach: at each level
/// `σ_η = ρ_η + ε·δρ_η` with one `ε` small enough that `σ_η` and `Φ(σ_η)` stay
/// interior at every level, so `H_out` grows like `ε²/η`.
pub fn contrast_witness_search<T: Scalar>(
    map: &LinearMap<T>,
    g: ContrastGenerator,
    cfg: &CertConfig<T>,
) -> Result<ContrastWitnessSearch<T>> {
    g.validate()?;
    let geom = boundary_geometry(map, cfg)?;
    let quarter = T::lit(0.25);
    let mut eps = T::one();
    for level in &geom.levels {
        let img = map.apply_hermitian(&level.drho)?.eig()?;
        let spread = img.min().abs().max(img.max().abs());
        let room_out = level.achieved / spread.max(T::lit(f64::MIN_POSITIVE));
        let room_in = level.rho.min_eigenvalue() / level.drho.eig()?.min().abs().max(T::lit(f64::MIN_POSITIVE));
        eps = eps.min(quarter * room_out.min(room_in));
    }
    let mut levels = Vec::new();
    let mut witness = None;
    for level in &geom.levels {
        let sigma = PsdMatrix::new(level.rho.hermitian() + &level.drho.scale(eps), &cfg.tol)?;
        let Some((h_in, h_out)) = evaluate(map, g, &level.rho, &sigma, cfg)? else {
            continue;
        };
        if witness.is_none() && increases(h_in, h_out, cfg.ratio_tol) {
            witness = Some(ContrastWitness {
                rho: level.rho.clone(),
                sigma,
                g,
                h_in,
                h_out,
                eta: Some(level.eta),
            });
        }
        levels.push(ContrastLevel {
            eta: level.eta,
            h_in,
            h_out,
        });
    }
    Ok(ContrastWitnessSearch {
        g,
        eps,
        levels,
        witness,
    })
}
