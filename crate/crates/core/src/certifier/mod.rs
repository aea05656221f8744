//! Contraction-based certification of Hermitian-preserving maps.
//!
//! A map that is positive and trace non-increasing contracts every monotone
//! metric; conversely, a map that is not positive (or increases trace) admits
//! a concrete `(ρ, δρ)` at which some metric grows. This module searches for
//! such witnesses, both by sampling and by walking a segment towards the
//! boundary of the image cone, and repeats the test on `Φ ⊗ 𝟙` to separate
//! positive from completely positive maps.

mod classical;
mod config;
mod contraction;
mod contrast;
mod trace;
mod witness;

use std::fmt;

use serde::Serialize;

pub use classical::{
    classical_contraction_test, classical_witness_search, ClassicalSample, ClassicalSearch, ClassicalVerdict,
    ClassicalWitness,
};
pub use config::{CertConfig, Mode, MAX_ETA_LEVELS};
pub use contraction::{contraction_ratio, sample_contraction_test, ContractionOutcome, ContractionSample};
pub use contrast::{
    contrast_contraction_test, contrast_witness_search, ContrastLevel, ContrastVerdict, ContrastWitness,
    ContrastWitnessSearch,
};
pub use trace::{trace_monotonicity_check, TraceVerdict, ROUTE_TOL, TRACE_SLACK};
pub use witness::{loglog_slope, witness_search, EtaPoint, ExpansionWitness, WitnessSearch, WitnessSource};

use crate::error::{Error, Result};
use crate::maps::{oracle_verdict, LinearMap, OracleVerdict};
use crate::monotone::MonotoneFunction;
use crate::scalar::Scalar;

// Independent random streams per test, so that changing one sample count
// does not shift the draws of another.
const STREAM_CONTRACTION: u64 = 1;
const STREAM_TRACE: u64 = 2;
const STREAM_CONTRAST: u64 = 3;
const STREAM_CLASSICAL: u64 = 4;
const STREAM_BASEPOINT: u64 = 5;

fn require_hp<T: Scalar>(map: &LinearMap<T>) -> Result<()> {
    let residual = map.hp_residual();
    if residual >= T::lit(T::TOL_HERMITIAN) {
        return Err(Error::NotHermitianPreserving {
            residual: residual.as_f64(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    /// Completely positive and trace non-increasing.
    #[serde(rename = "CPTP")]
    Cptp,
    /// Positive and trace non-increasing, but not completely positive.
    #[serde(rename = "PTP-not-CP")]
    PtpNotCp,
    NonPositive,
    #[serde(rename = "NotHP")]
    NotHp,
    TraceIncreasing,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Cptp => "CPTP",
            Classification::PtpNotCp => "PTP-not-CP",
            Classification::NonPositive => "NonPositive",
            Classification::NotHp => "NotHP",
            Classification::TraceIncreasing => "TraceIncreasing",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The classification implied by the Choi spectrum, the sampled positivity
/// estimate and `λ_max(Φ†(𝟙))`, with no metric involved.
pub fn oracle_classification<T: Scalar>(o: &OracleVerdict<T>) -> Classification {
    if !o.is_hp {
        Classification::NotHp
    } else if !o.is_positive {
        Classification::NonPositive
    } else if !o.trace_nonincreasing {
        Classification::TraceIncreasing
    } else if !o.is_cp {
        Classification::PtpNotCp
    } else {
        Classification::Cptp
    }
}

/// Sampled contraction test plus, when the positivity oracle reports a
/// negative direction, the boundary witness search.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionVerdict<T: Scalar> {
    pub dim: usize,
    pub mode: Mode,
    pub sampled: ContractionOutcome<T>,
    pub search: Option<WitnessSearch<T>>,
    /// Why the boundary search produced nothing (`NotFound` when the oracle
    /// saw no negative output).
    pub search_note: Option<String>,
    pub violated: bool,
}

impl<T: Scalar> ContractionVerdict<T> {
    pub fn boundary_witness(&self) -> Option<&ExpansionWitness<T>> {
        self.search.as_ref().and_then(|s| s.strongest())
    }

    /// The strongest witness from either route.
    pub fn witness(&self) -> Option<&ExpansionWitness<T>> {
        self.boundary_witness().or(self.sampled.witness())
    }
}

fn contraction_verdict<T: Scalar>(map: &LinearMap<T>, cfg: &CertConfig<T>) -> Result<ContractionVerdict<T>> {
    let sampled = sample_contraction_test(map, cfg)?;
    let (search, search_note) = match witness_search(map, cfg) {
        Ok(s) => (Some(s), None),
        Err(e @ (Error::NotFound | Error::Condition1Violated { .. } | Error::DegenerateAdjoint { .. })) => {
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let violated = sampled.witness().is_some() || search.as_ref().is_some_and(|s| !s.witnesses.is_empty());
    Ok(ContractionVerdict {
        dim: map.dim(),
        mode: cfg.mode,
        sampled,
        search,
        search_note,
        violated,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CertReport<T: Scalar> {
    pub dim: usize,
    pub f: MonotoneFunction,
    pub hp: bool,
    pub hp_residual: T,
    pub tp_residual: T,
    pub base: Option<ContractionVerdict<T>>,
    pub ancilla_dim: usize,
    pub lifted: Option<ContractionVerdict<T>>,
    pub trace: Option<TraceVerdict<T>>,
    pub oracle: OracleVerdict<T>,
    pub classification: Classification,
}

impl<T: Scalar> CertReport<T> {
    /// A witness of expansion or a trace violation was found.
    pub fn has_violation(&self) -> bool {
        self.base.as_ref().is_some_and(|b| b.violated)
            || self.lifted.as_ref().is_some_and(|l| l.violated)
            || self.trace.as_ref().is_some_and(|t| t.violated)
    }

    /// Agreement of the contraction-based classification with the oracles.
    pub fn agrees_with_oracle(&self) -> bool {
        self.classification == oracle_classification(&self.oracle)
    }
}

/// Full pipeline: Hermiticity check, base contraction test with boundary
/// search, trace check, then the lifted test on `Φ ⊗ 𝟙_n` in states mode.
///
/// Classification:
/// - not Hermitian preserving: `NotHP`;
/// - base expansion found on the boundary approach: `NonPositive`;
/// - otherwise trace gain (sampled or through a base expansion): `TraceIncreasing`;
/// - otherwise expansion of the lifted map: `PTP-not-CP`;
/// - otherwise `CPTP`, meaning completely positive and trace non-increasing.
pub fn certify<T: Scalar>(map: &LinearMap<T>, cfg: &CertConfig<T>) -> Result<CertReport<T>> {
    cfg.validate()?;
    let d = map.dim();
    let ancilla_dim = cfg.ancilla_dim.unwrap_or(d);
    let oracle = oracle_verdict(map, cfg.oracle_grid, cfg.oracle_refine, cfg.seed, &cfg.tol)?;
    let hp = map.is_hermitian_preserving();
    let mut report = CertReport {
        dim: d,
        f: cfg.f,
        hp,
        hp_residual: map.hp_residual(),
        tp_residual: map.tp_residual(),
        base: None,
        ancilla_dim,
        lifted: None,
        trace: None,
        oracle,
        classification: Classification::NotHp,
    };
    if !hp {
        return Ok(report);
    }
    let base = contraction_verdict(map, cfg)?;
    let trace = trace_monotonicity_check(map, cfg)?;
    let classification = if base.boundary_witness().is_some() {
        Classification::NonPositive
    } else if trace.violated {
        Classification::TraceIncreasing
    } else if base.violated {
        Classification::NonPositive
    } else {
        let lifted_map = map.tensor_identity(ancilla_dim)?;
        let lifted_cfg = CertConfig {
            mode: Mode::States,
            ..cfg.clone()
        };
        let lifted = contraction_verdict(&lifted_map, &lifted_cfg)?;
        let c = if lifted.violated {
            Classification::PtpNotCp
        } else {
            Classification::Cptp
        };
        report.lifted = Some(lifted);
        c
    };
    report.base = Some(base);
    report.trace = Some(trace);
    report.classification = classification;
    Ok(report)
}
