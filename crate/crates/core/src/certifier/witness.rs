use serde::Serialize;

use super::contraction::{contraction_ratio, interior_image};
use super::{require_hp, CertConfig, STREAM_BASEPOINT};
use crate::error::{Error, Result};
use crate::maps::{positivity_oracle, LinearMap};
use crate::matcore::{random_density, DensityMatrix, HermitianMatrix, PsdMatrix};
use crate::monotone::MonotoneFunction;
use crate::scalar::{CVector, Scalar, Tolerances};

/// Stop the inner bisection once `λ_min(Φ(ρ))` is within this relative
/// distance of the requested level.
const LEVEL_RTOL: f64 = 1e-3;
const MAX_BISECTIONS: usize = 200;
const DEGENERATE_NORM: f64 = 1e-12;
const REPLAY_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSource {
    Sampled { index: usize },
    Boundary { level: usize },
}

/// A point `(ρ, δρ)` at which `Φ` strictly increases `K_f`.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionWitness<T: Scalar> {
    pub rho: PsdMatrix<T>,
    pub drho: HermitianMatrix<T>,
    pub traceless: bool,
    pub f: MonotoneFunction,
    pub ratio: T,
    pub numerator: T,
    pub denominator: T,
    pub eta: Option<T>,
    pub lambda_star: Option<T>,
    #[serde(serialize_with = "crate::io::serialize_opt_cvector")]
    pub psi: Option<CVector<T>>,
    pub source: WitnessSource,
}

impl<T: Scalar> ExpansionWitness<T> {
    /// Recomputes the ratio from the stored `ρ`, `δρ` and `f`.
    pub fn replay(&self, map: &LinearMap<T>, tol: &Tolerances<T>) -> Result<T> {
        Ok(contraction_ratio(map, self.f, &self.rho, &self.drho, tol)?.ratio)
    }

    /// Replay agrees with the stored ratio to `1e-8` relative and still
    /// exceeds `1 + ratio_tol`.
    pub fn replays(&self, map: &LinearMap<T>, tol: &Tolerances<T>, ratio_tol: T) -> Result<bool> {
        let r = self.replay(map, tol)?;
        let close = (r - self.ratio).abs() <= T::lit(REPLAY_RTOL) * self.ratio.abs();
        Ok(close && r > T::one() + ratio_tol)
    }
}

/// One level of the boundary approach.
#[derive(Clone, Debug, Serialize)]
pub struct EtaPoint<T> {
    pub eta: T,
    pub lambda: Option<T>,
    /// `λ_min(Φ(ρ_η))` actually reached by the bisection.
    pub achieved: Option<T>,
    pub ratio: Option<T>,
    pub skipped: Option<&'static str>,
}

#[derive(Clone, Debug)]
pub(crate) struct Level<T: Scalar> {
    pub index: usize,
    pub eta: T,
    pub lambda: T,
    pub achieved: T,
    pub rho: PsdMatrix<T>,
    pub psi: CVector<T>,
    pub drho: HermitianMatrix<T>,
}

/// The segment construction: `π` with `Φ(π)` interior, `σ` with
/// `λ_min(Φ(σ)) < 0`, the crossing `λ*` of `ρ_λ = (1 − λ)π + λσ`, and the
/// points `ρ_η` on the `π` side with `λ_min(Φ(ρ_η)) = η`.
#[derive(Clone, Debug)]
pub(crate) struct BoundaryGeometry<T: Scalar> {
    pub pi: PsdMatrix<T>,
    pub sigma: PsdMatrix<T>,
    pub lambda_star: T,
    pub oracle_min: T,
    pub levels: Vec<Level<T>>,
    pub skipped: Vec<(usize, T, &'static str)>,
}

/// `π`: the maximally mixed state if its image is interior, otherwise the
/// first sampled state that qualifies.
pub(crate) fn find_basepoint<T: Scalar>(map: &LinearMap<T>, cfg: &CertConfig<T>) -> Result<PsdMatrix<T>> {
    let d = map.dim();
    let mixed = DensityMatrix::<T>::maximally_mixed(d).into_psd();
    if interior_image(map, &mixed, &cfg.tol)?.is_some() {
        return Ok(mixed);
    }
    let attempts = cfg.n_samples.min(10_000);
    for k in 0..attempts {
        let seed = crate::matcore::derive_seed(cfg.seed, STREAM_BASEPOINT, k as u64);
        let rho = random_density::<T>(d, d, seed)?.into_psd();
        if rho.is_interior(&cfg.tol) && interior_image(map, &rho, &cfg.tol)?.is_some() {
            return Ok(rho);
        }
    }
    Err(Error::Condition1Violated {
        attempts: attempts + 1,
    })
}

fn mix<T: Scalar>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, lambda: T) -> HermitianMatrix<T> {
    &a.scale(T::one() - lambda) + &b.scale(lambda)
}

fn image_min<T: Scalar>(map: &LinearMap<T>, rho: &HermitianMatrix<T>) -> Result<T> {
    map.apply_hermitian(rho)?.min_eigenvalue()
}

pub(crate) fn boundary_geometry<T: Scalar>(
    map: &LinearMap<T>,
    cfg: &CertConfig<T>,
) -> Result<BoundaryGeometry<T>> {
    cfg.validate()?;
    require_hp(map)?;
    let tol = &cfg.tol;
    let pi = find_basepoint(map, cfg)?;

    let est = positivity_oracle(map, cfg.oracle_grid, cfg.oracle_refine, cfg.seed)?;
    if est.min_output_eigenvalue >= -tol.psd_threshold(T::one()) {
        return Err(Error::NotFound);
    }
    // Pull the pure worst state into the interior, keeping its image clearly
    // non-positive.
    let sigma0 = HermitianMatrix::projector(&est.worst_state);
    let half = T::lit(0.5);
    let mut t = T::lit(0.1);
    let sigma = loop {
        let cand = mix(&sigma0, &pi, t);
        let psd = PsdMatrix::new(cand, tol)?;
        if psd.is_interior(tol) && image_min(map, &psd)? <= est.min_output_eigenvalue * half {
            break psd;
        }
        t *= half;
        if t < T::lit(1e-6) {
            return Err(Error::NotFound);
        }
    };

    let h = |lambda: T| image_min(map, &mix(&pi, &sigma, lambda));
    let h0 = h(T::zero())?;
    let (mut lo, mut hi) = (T::zero(), T::one());
    while hi - lo > cfg.bisection_tol {
        let mid = (lo + hi) * half;
        if h(mid)? > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda_star = lo;

    let adjoint = map.adjoint();
    let mut levels = Vec::new();
    let mut skipped = Vec::new();
    for (index, eta) in cfg.eta_schedule().into_iter().enumerate() {
        if eta >= h0 {
            skipped.push((index, eta, "level above the image minimum at the basepoint"));
            continue;
        }
        let (mut a, mut b) = (T::zero(), hi);
        let mut lambda = a;
        let mut achieved = h0;
        for _ in 0..MAX_BISECTIONS {
            lambda = (a + b) * half;
            achieved = h(lambda)?;
            if (achieved - eta).abs() <= T::lit(LEVEL_RTOL) * eta {
                break;
            }
            if achieved > eta {
                a = lambda;
            } else {
                b = lambda;
            }
        }
        let rho = PsdMatrix::new(mix(&pi, &sigma, lambda), tol)?;
        let Some(image) = interior_image(map, &rho, tol)? else {
            skipped.push((index, eta, "image at this level is not interior"));
            continue;
        };
        if !rho.is_interior(tol) {
            skipped.push((index, eta, "state at this level is not interior"));
            continue;
        }
        let psi = image.spectral().bottom_vector();
        let pulled = adjoint.apply_hermitian(&HermitianMatrix::projector(&psi))?;
        let pulled = if cfg.mode.traceless() {
            pulled.traceless_part()
        } else {
            pulled
        };
        let norm = pulled.frobenius_norm();
        if norm < T::lit(DEGENERATE_NORM) {
            return Err(Error::DegenerateAdjoint { norm: norm.as_f64() });
        }
        levels.push(Level {
            index,
            eta,
            lambda,
            achieved,
            rho,
            psi,
            drho: pulled.scale(T::one() / norm),
        });
    }
    Ok(BoundaryGeometry {
        pi,
        sigma,
        lambda_star,
        oracle_min: est.min_output_eigenvalue,
        levels,
        skipped,
    })
}

/// Result of the constructive boundary search.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessSearch<T: Scalar> {
    pub pi: PsdMatrix<T>,
    pub sigma: PsdMatrix<T>,
    pub lambda_star: T,
    pub oracle_min_output_eigenvalue: T,
    pub trace: Vec<EtaPoint<T>>,
    /// Every level whose ratio exceeds `1 + ratio_tol`, in schedule order.
    pub witnesses: Vec<ExpansionWitness<T>>,
}

impl<T: Scalar> WitnessSearch<T> {
    /// The first (largest-η) expanding level.
    pub fn first(&self) -> Option<&ExpansionWitness<T>> {
        self.witnesses.first()
    }

    pub fn strongest(&self) -> Option<&ExpansionWitness<T>> {
        self.witnesses
            .iter()
            .max_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Least-squares slope of `ln ratio` against `ln η` over all evaluated levels.
    pub fn slope(&self) -> Option<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .trace
            .iter()
            .filter_map(|p| p.ratio.map(|r| (p.eta.as_f64().ln(), r.as_f64().ln())))
            .unzip();
        loglog_slope(&xs, &ys)
    }
}

/// Ordinary least-squares slope; `None` with fewer than two points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxy: f64 = (0..n).map(|i| (xs[i] - mx) * (ys[i] - my)).sum();
    let sxx: f64 = (0..n).map(|i| (xs[i] - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Boundary-approach witness search. For each schedule level the tangent is
/// the normalized adjoint image `Φ†(|ψ_η⟩⟨ψ_η|)` (traceless part in states
/// mode), which maximizes `⟨ψ_η|Φ(δρ)|ψ_η⟩` over unit Hermitian directions.
///
/// Fails with `NotFound` when the positivity oracle sees no negative output.
pub fn witness_search<T: Scalar>(map: &LinearMap<T>, cfg: &CertConfig<T>) -> Result<WitnessSearch<T>> {
    let geom = boundary_geometry(map, cfg)?;
    let threshold = T::one() + cfg.ratio_tol;
    let mut indexed: Vec<(usize, EtaPoint<T>)> = geom
        .skipped
        .iter()
        .map(|&(index, eta, why)| {
            let point = EtaPoint {
                eta,
                lambda: None,
                achieved: None,
                ratio: None,
                skipped: Some(why),
            };
            (index, point)
        })
        .chain(geom.levels.iter().map(|l| {
            let point = EtaPoint {
                eta: l.eta,
                lambda: Some(l.lambda),
                achieved: Some(l.achieved),
                ratio: None,
                skipped: None,
            };
            (l.index, point)
        }))
        .collect();
    indexed.sort_by_key(|(i, _)| *i);
    let mut trace: Vec<EtaPoint<T>> = indexed.into_iter().map(|(_, p)| p).collect();

    let mut witnesses = Vec::new();
    for level in &geom.levels {
        let s = match contraction_ratio(map, cfg.f, &level.rho, &level.drho, &cfg.tol) {
            Ok(s) => s,
            Err(Error::SkippedSample { .. }) => continue,
            Err(e) => return Err(e),
        };
        trace[level.index].ratio = Some(s.ratio);
        if s.ratio > threshold {
            witnesses.push(ExpansionWitness {
                rho: level.rho.clone(),
                drho: level.drho.clone(),
                traceless: cfg.mode.traceless(),
                f: cfg.f,
                ratio: s.ratio,
                numerator: s.numerator,
                denominator: s.denominator,
                eta: Some(level.eta),
                lambda_star: Some(geom.lambda_star),
                psi: Some(level.psi.clone()),
                source: WitnessSource::Boundary { level: level.index },
            });
        }
    }
    Ok(WitnessSearch {
        pi: geom.pi,
        sigma: geom.sigma,
        lambda_star: geom.lambda_star,
        oracle_min_output_eigenvalue: geom.oracle_min,
        trace,
        witnesses,
    })
}
