use rayon::prelude::*;
use serde::Serialize;

use super::contraction::interior_image;
use super::{require_hp, CertConfig, STREAM_TRACE};
use crate::error::Result;
use crate::geometry::fisher_norm_sq;
use crate::maps::LinearMap;
use crate::matcore::{derive_seed, random_density, DensityMatrix, HermitianMatrix, PsdMatrix};
use crate::scalar::Scalar;

/// Allowed trace gain `Tr Φ(ρ) − Tr ρ` on trace-one states.
pub const TRACE_SLACK: f64 = 1e-10;
/// Allowed disagreement between `K_{f,Φ(ρ)}(Φ(ρ), Φ(ρ))` and `Tr Φ(ρ)`.
pub const ROUTE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct TraceVerdict<T> {
    pub samples: usize,
    /// `max (Tr Φ(ρ) − Tr ρ)` over the sampled states.
    pub max_trace_gain: T,
    pub violated: bool,
    /// Samples whose image is interior, so the metric route applies.
    pub metric_route_samples: usize,
    pub metric_route_max_discrepancy: T,
    pub routes_agree: bool,
    /// `λ_max(Φ†(𝟙))`, the exact supremum of `Tr Φ(ρ)` over states.
    pub adjoint_identity_max_eigenvalue: T,
}

/// Samples trace-one interior states and checks `Tr Φ(ρ) ≤ Tr ρ + 1e-10`.
/// The metric route evaluates `K_{f,Φ(ρ)}(Φ(ρ), Φ(ρ))`, which equals
/// `Tr Φ(ρ)` since the inverse Fisher operator maps a basepoint to `𝟙`.
///
/// Besides random states, the maximally mixed state and a slightly mixed
/// top eigenvector of `Φ†(𝟙)` are always included.
pub fn trace_monotonicity_check<T: Scalar>(map: &LinearMap<T>, cfg: &CertConfig<T>) -> Result<TraceVerdict<T>> {
    cfg.validate()?;
    require_hp(map)?;
    let d = map.dim();
    let tol = &cfg.tol;
    let adj = map.adjoint_identity()?.eig()?;
    let top = HermitianMatrix::projector(&adj.eigenvectors.column(d - 1).into_owned());
    let mixed = DensityMatrix::<T>::maximally_mixed(d).into_psd();
    let t = T::lit(1e-6);
    let directed = PsdMatrix::new(&top.scale(T::one() - t) + &mixed.scale(t), tol)?;

    let per_sample = |rho: &PsdMatrix<T>| -> Result<(T, Option<T>)> {
        let image = map.apply_hermitian(rho)?;
        let gain = image.trace() - rho.trace();
        let route = match interior_image(map, rho, tol)? {
            Some(img) => {
                let k = fisher_norm_sq(&img, img.hermitian(), cfg.f, tol)?;
                Some((k - img.trace()).abs())
            }
            None => None,
        };
        Ok((gain, route))
    };

    let mut results: Vec<(T, Option<T>)> = (0..cfg.trace_samples)
        .into_par_iter()
        .map(|k| {
            let rho = random_density::<T>(d, d, derive_seed(cfg.seed, STREAM_TRACE, k as u64))?.into_psd();
            per_sample(&rho)
        })
        .collect::<Result<_>>()?;
    results.push(per_sample(&mixed)?);
    results.push(per_sample(&directed)?);

    let max_trace_gain = results
        .iter()
        .map(|r| r.0)
        .fold(T::lit(f64::NEG_INFINITY), |a, b| a.max(b));
    let routes: Vec<T> = results.iter().filter_map(|r| r.1).collect();
    let metric_route_max_discrepancy = routes.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok(TraceVerdict {
        samples: results.len(),
        max_trace_gain,
        violated: max_trace_gain > T::lit(TRACE_SLACK.max(T::TOL_HERMITIAN)),
        metric_route_samples: routes.len(),
        metric_route_max_discrepancy,
        routes_agree: metric_route_max_discrepancy <= T::lit(ROUTE_TOL.max(T::TOL_HERMITIAN)),
        adjoint_identity_max_eigenvalue: adj.max(),
    })
}
