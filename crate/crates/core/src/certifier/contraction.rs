use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{require_hp, CertConfig, ExpansionWitness, Mode, WitnessSource, STREAM_CONTRACTION};
use crate::error::{Error, Result};
use crate::geometry::fisher_norm_sq;
use crate::maps::LinearMap;
use crate::matcore::{derive_seed, random_density_with, random_tangent_with, seeded_rng, HermitianMatrix, PsdMatrix};
use crate::monotone::MonotoneFunction;
use crate::scalar::{Scalar, Tolerances};

/// Both sides of the contraction inequality at one `(ρ, δρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContractionSample<T> {
    pub ratio: T,
    /// `K_{f,Φ(ρ)}(Φ(δρ), Φ(δρ))`
    pub numerator: T,
    /// `K_{f,ρ}(δρ, δρ)`
    pub denominator: T,
}

/// `K_{f,Φ(ρ)}(Φ(δρ), Φ(δρ)) / K_{f,ρ}(δρ, δρ)`.
///
/// Fails with `SkippedSample` when `ρ` or `Φ(ρ)` is not interior or the
/// tangent has zero length; those points are outside the domain of the test
/// rather than violations.
pub fn contraction_ratio<T: Scalar>(
    map: &LinearMap<T>,
    f: MonotoneFunction,
    rho: &PsdMatrix<T>,
    drho: &HermitianMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<ContractionSample<T>> {
    if !rho.is_interior(tol) {
        return Err(Error::SkippedSample {
            reason: "input basepoint is not interior",
        });
    }
    let image = interior_image(map, rho, tol)?.ok_or(Error::SkippedSample {
        reason: "image basepoint is not interior",
    })?;
    let denominator = fisher_norm_sq(rho, drho, f, tol)?;
    if !(denominator > T::zero()) {
        return Err(Error::SkippedSample {
            reason: "tangent has zero length",
        });
    }
    let pushed = map.apply_hermitian(drho)?;
    let numerator = fisher_norm_sq(&image, &pushed, f, tol)?;
    Ok(ContractionSample {
        ratio: numerator / denominator,
        numerator,
        denominator,
    })
}

/// `Φ(ρ)` when it is an interior PSD matrix.
pub(crate) fn interior_image<T: Scalar>(
    map: &LinearMap<T>,
    rho: &HermitianMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<Option<PsdMatrix<T>>> {
    let out = map.apply_hermitian(rho)?;
    Ok(match PsdMatrix::new(out, tol) {
        Ok(p) if p.is_interior(tol) => Some(p),
        Ok(_) | Err(Error::NotPsd { .. }) => None,
        Err(e) => return Err(e),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ContractionOutcome<T: Scalar> {
    NoViolation {
        n_effective: usize,
        n_skipped: usize,
        max_ratio: T,
    },
    Witness {
        n_effective: usize,
        n_skipped: usize,
        max_ratio: T,
        witness: Box<ExpansionWitness<T>>,
    },
}

impl<T: Scalar> ContractionOutcome<T> {
    pub fn witness(&self) -> Option<&ExpansionWitness<T>> {
        match self {
            ContractionOutcome::Witness { witness, .. } => Some(witness),
            ContractionOutcome::NoViolation { .. } => None,
        }
    }

    pub fn n_effective(&self) -> usize {
        match *self {
            ContractionOutcome::NoViolation { n_effective, .. }
            | ContractionOutcome::Witness { n_effective, .. } => n_effective,
        }
    }

    pub fn n_skipped(&self) -> usize {
        match *self {
            ContractionOutcome::NoViolation { n_skipped, .. }
            | ContractionOutcome::Witness { n_skipped, .. } => n_skipped,
        }
    }

    pub fn max_ratio(&self) -> T {
        match *self {
            ContractionOutcome::NoViolation { max_ratio, .. }
            | ContractionOutcome::Witness { max_ratio, .. } => max_ratio,
        }
    }
}

/// The `k`-th `(ρ, δρ)` pair of a run. States mode draws trace-one states and
/// traceless tangents; PSD mode rescales the state by `e^u`, `u ~ U(−1, 1)`,
/// and keeps the trace part of the tangent.
pub(crate) fn sample_pair<T: Scalar>(
    d: usize,
    mode: Mode,
    seed: u64,
    stream: u64,
    k: usize,
    tol: &Tolerances<T>,
) -> Result<(PsdMatrix<T>, HermitianMatrix<T>)> {
    let mut rng = seeded_rng(derive_seed(seed, stream, k as u64));
    let rho = random_density_with::<T, _>(d, d, &mut rng)?;
    let drho = random_tangent_with::<T, _>(d, mode.traceless(), &mut rng);
    let rho = match mode {
        Mode::States => rho.into_psd(),
        Mode::Psd => {
            let u: f64 = rng.random_range(-1.0..1.0);
            PsdMatrix::new(rho.scale(T::lit(u.exp())), tol)?
        }
    };
    Ok((rho, drho.matrix().clone()))
}

/// Monte-Carlo contraction test over `n_samples` pairs. Returns the
/// lowest-index pair whose ratio exceeds `1 + ratio_tol`, if any.
///
/// Deterministic per `(config, seed)`; each sample owns a derived seed.
pub fn sample_contraction_test<T: Scalar>(
    map: &LinearMap<T>,
    cfg: &CertConfig<T>,
) -> Result<ContractionOutcome<T>> {
    cfg.validate()?;
    require_hp(map)?;
    let d = map.dim();
    let results: Vec<Option<T>> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|k| {
            let (rho, drho) = sample_pair(d, cfg.mode, cfg.seed, STREAM_CONTRACTION, k, &cfg.tol)?;
            match contraction_ratio(map, cfg.f, &rho, &drho, &cfg.tol) {
                Ok(s) => Ok(Some(s.ratio)),
                Err(Error::SkippedSample { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let n_effective = results.iter().filter(|r| r.is_some()).count();
    let n_skipped = results.len() - n_effective;
    if n_effective == 0 {
        return Err(Error::Condition1Violated {
            attempts: results.len(),
        });
    }
    let max_ratio = results
        .iter()
        .flatten()
        .fold(T::zero(), |a, &b| a.max(b));
    let threshold = T::one() + cfg.ratio_tol;
    let first = results
        .iter()
        .position(|r| matches!(r, Some(x) if *x > threshold));
    let Some(k) = first else {
        return Ok(ContractionOutcome::NoViolation {
            n_effective,
            n_skipped,
            max_ratio,
        });
    };
    let (rho, drho) = sample_pair(d, cfg.mode, cfg.seed, STREAM_CONTRACTION, k, &cfg.tol)?;
    let s = contraction_ratio(map, cfg.f, &rho, &drho, &cfg.tol)?;
    Ok(ContractionOutcome::Witness {
        n_effective,
        n_skipped,
        max_ratio,
        witness: Box::new(ExpansionWitness {
            rho,
            drho,
            traceless: cfg.mode.traceless(),
            f: cfg.f,
            ratio: s.ratio,
            numerator: s.numerator,
            denominator: s.denominator,
            eta: None,
            lambda_star: None,
            psi: None,
            source: WitnessSource::Sampled { index: k },
        }),
    })
}
