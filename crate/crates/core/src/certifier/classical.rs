use nalgebra::DVector;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{CertConfig, STREAM_CLASSICAL};
use crate::error::{Error, Result};
use crate::geometry::{classical_fisher, relative_entropy};
use crate::maps::{random_simplex_point, StochasticMap};
use crate::matcore::{derive_seed, seeded_rng};
use crate::scalar::Scalar;

const LEVEL_RTOL: f64 = 1e-3;
const MAX_BISECTIONS: usize = 200;

/// One sampled pair on the open simplex.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalSample<T> {
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub dq: Vec<T>,
    pub fisher_ratio: T,
    pub divergence_ratio: T,
}

/// A point where the Fisher-Rao norm grows under `T`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalWitness<T> {
    pub p: Vec<T>,
    pub dq: Vec<T>,
    pub ratio: T,
    pub eta: T,
    pub lambda_star: T,
    /// Output coordinate whose value approaches zero.
    pub row: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalSearch<T> {
    pub vertex: usize,
    pub lambda_star: T,
    /// `(η, ratio)` per evaluated level.
    pub trace: Vec<(T, T)>,
    pub witness: Option<ClassicalWitness<T>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalVerdict<T> {
    pub stochastic: bool,
    pub n_effective: usize,
    pub n_skipped: usize,
    pub max_fisher_ratio: T,
    pub max_divergence_ratio: T,
    pub violated: bool,
    pub sampled_witness: Option<ClassicalSample<T>>,
    pub boundary: Option<ClassicalSearch<T>>,
}

fn positive<T: Scalar>(v: &DVector<T>) -> bool {
    v.iter().all(|&x| x > T::zero())
}

/// Zero-sum Gaussian direction with unit Euclidean norm.
fn random_zero_sum<T: Scalar, R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<T> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let v = project_zero_sum(DVector::from_iterator(n, g.into_iter().map(T::lit)));
        let norm = v.norm();
        if norm > T::lit(1e-12) {
            return v / norm;
        }
    }
}

fn project_zero_sum<T: Scalar>(v: DVector<T>) -> DVector<T> {
    let mean = v.sum() / T::lit(v.len() as f64);
    v.map(|x| x - mean)
}

fn sample<T: Scalar>(t: &StochasticMap<T>, seed: u64, k: usize) -> Result<Option<ClassicalSample<T>>> {
    let n = t.dim();
    let mut rng = seeded_rng(derive_seed(seed, STREAM_CLASSICAL, k as u64));
    let p = random_simplex_point::<T, _>(n, &mut rng);
    let q = random_simplex_point::<T, _>(n, &mut rng);
    let dq = random_zero_sum::<T, _>(n, &mut rng);
    let (tp, tq) = (t.apply(&p)?, t.apply(&q)?);
    if !positive(&tp) || !positive(&tq) {
        return Ok(None);
    }
    let tdq = t.apply(&dq)?;
    let fisher_ratio = classical_fisher(tp.as_slice(), tdq.as_slice())? / classical_fisher(p.as_slice(), dq.as_slice())?;
    let d_in = relative_entropy(p.as_slice(), q.as_slice())?;
    let d_out = relative_entropy(tp.as_slice(), tq.as_slice())?;
    let divergence_ratio = if d_in > T::zero() { d_out / d_in } else { T::one() };
    Ok(Some(ClassicalSample {
        p: p.as_slice().to_vec(),
        q: q.as_slice().to_vec(),
        dq: dq.as_slice().to_vec(),
        fisher_ratio,
        divergence_ratio,
    }))
}

/// Samples `n_samples` triples `(p, q, dq)` on the open simplex and checks
/// that `T` contracts both `D(p‖q)` and the Fisher-Rao norm of `dq`. Matrices
/// with a negative entry also get the boundary witness search.
pub fn classical_contraction_test<T: Scalar>(
    t: &StochasticMap<T>,
    cfg: &CertConfig<T>,
) -> Result<ClassicalVerdict<T>> {
    cfg.validate()?;
    let results: Vec<Option<ClassicalSample<T>>> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|k| sample(t, cfg.seed, k))
        .collect::<Result<_>>()?;
    let n_effective = results.iter().filter(|r| r.is_some()).count();
    if n_effective == 0 {
        return Err(Error::Condition1Violated {
            attempts: results.len(),
        });
    }
    let fold_max = |get: fn(&ClassicalSample<T>) -> T| {
        results
            .iter()
            .flatten()
            .map(get)
            .fold(T::zero(), |a, b| a.max(b))
    };
    let max_fisher_ratio = fold_max(|s| s.fisher_ratio);
    let max_divergence_ratio = fold_max(|s| s.divergence_ratio);
    let threshold = T::one() + cfg.ratio_tol;
    let sampled_witness = results
        .iter()
        .flatten()
        .find(|s| s.fisher_ratio > threshold || s.divergence_ratio > threshold)
        .cloned();
    let has_negative = t.matrix().iter().any(|&x| x < T::lit(-1e-12));
    let boundary = if has_negative {
        Some(classical_witness_search(t, cfg)?)
    } else {
        None
    };
    let violated = sampled_witness.is_some() || boundary.as_ref().is_some_and(|b| b.witness.is_some());
    Ok(ClassicalVerdict {
        stochastic: t.is_stochastic(),
        n_effective,
        n_skipped: results.len() - n_effective,
        max_fisher_ratio,
        max_divergence_ratio,
        violated,
        sampled_witness,
        boundary,
    })
}

fn mix<T: Scalar>(a: &DVector<T>, b: &DVector<T>, lambda: T) -> DVector<T> {
    a * (T::one() - lambda) + b * lambda
}

fn min_entry<T: Scalar>(v: &DVector<T>) -> (usize, T) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, T::lit(f64::INFINITY)), |acc, (i, x)| if x < acc.1 { (i, x) } else { acc })
}

/// Simplex version of the boundary approach: segment from an interior `π`
/// with `Tπ > 0` towards the vertex whose image has the most negative entry,
/// `λ*` by bisection, then per level the point with `min(Tp) = η` and the
/// tangent `dq ∝` zero-sum part of `Tᵀ e_i` for the vanishing coordinate `i`.
pub fn classical_witness_search<T: Scalar>(t: &StochasticMap<T>, cfg: &CertConfig<T>) -> Result<ClassicalSearch<T>> {
    cfg.validate()?;
    let n = t.dim();
    let uniform = DVector::from_element(n, T::one() / T::lit(n as f64));
    let floor = |v: &DVector<T>| cfg.tol.interior * v.sum() / T::lit(n as f64);
    let mut pi = uniform.clone();
    if min_entry(&t.apply(&pi)?).1 <= floor(&t.apply(&pi)?) {
        let mut rng = seeded_rng(derive_seed(cfg.seed, STREAM_CLASSICAL, u64::MAX));
        let found = (0..cfg.n_samples.min(10_000)).find_map(|_| {
            let p = random_simplex_point::<T, _>(n, &mut rng);
            let tp = t.apply(&p).ok()?;
            (min_entry(&tp).1 > floor(&tp)).then_some(p)
        });
        pi = found.ok_or(Error::Condition1Violated { attempts: cfg.n_samples.min(10_000) })?;
    }
    let (vertex, worst) = (0..n)
        .map(|k| (k, min_entry(&t.matrix().column(k).into_owned()).1))
        .fold((0, T::lit(f64::INFINITY)), |acc, x| if x.1 < acc.1 { x } else { acc });
    if worst >= T::zero() {
        return Err(Error::NotFound);
    }
    let mut corner = DVector::zeros(n);
    corner[vertex] = T::one();
    let half = T::lit(0.5);
    let mut s = T::lit(0.1);
    let sigma = loop {
        let cand = mix(&corner, &pi, s);
        if min_entry(&t.apply(&cand)?).1 <= worst * half {
            break cand;
        }
        s *= half;
        if s < T::lit(1e-6) {
            return Err(Error::NotFound);
        }
    };
    let h = |lambda: T| -> Result<(usize, T)> { Ok(min_entry(&t.apply(&mix(&pi, &sigma, lambda))?)) };
    let h0 = h(T::zero())?.1;
    let (mut lo, mut hi) = (T::zero(), T::one());
    while hi - lo > cfg.bisection_tol {
        let mid = (lo + hi) * half;
        if h(mid)?.1 > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda_star = lo;
    let threshold = T::one() + cfg.ratio_tol;
    let mut trace = Vec::new();
    let mut witness = None;
    for eta in cfg.eta_schedule() {
        if eta >= h0 {
            continue;
        }
        let (mut a, mut b) = (T::zero(), hi);
        let mut lambda = a;
        let mut row = 0;
        for _ in 0..MAX_BISECTIONS {
            lambda = (a + b) * half;
            let (i, v) = h(lambda)?;
            row = i;
            if (v - eta).abs() <= T::lit(LEVEL_RTOL) * eta {
                break;
            }
            if v > eta {
                a = lambda;
            } else {
                b = lambda;
            }
        }
        let p = mix(&pi, &sigma, lambda);
        if !positive(&p) || !positive(&t.apply(&p)?) {
            continue;
        }
        let pulled = project_zero_sum(t.matrix().row(row).transpose());
        let norm = pulled.norm();
        if norm < T::lit(1e-12) {
            return Err(Error::DegenerateAdjoint { norm: norm.as_f64() });
        }
        let dq = pulled / norm;
        let ratio = classical_fisher(t.apply(&p)?.as_slice(), t.apply(&dq)?.as_slice())?
            / classical_fisher(p.as_slice(), dq.as_slice())?;
        trace.push((eta, ratio));
        if witness.is_none() && ratio > threshold {
            witness = Some(ClassicalWitness {
                p: p.as_slice().to_vec(),
                dq: dq.as_slice().to_vec(),
                ratio,
                eta,
                lambda_star,
                row,
            });
        }
    }
    Ok(ClassicalSearch {
        vertex,
        lambda_star,
        trace,
        witness,
    })
}
