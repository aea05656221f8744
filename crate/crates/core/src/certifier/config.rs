use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::{ContrastGenerator, MonotoneFunction};
use crate::scalar::{Scalar, Tolerances};

/// Which manifold the tangents live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Trace-one states with traceless tangents.
    States,
    /// Positive matrices of any trace with general Hermitian tangents.
    Psd,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::States => "states",
            Mode::Psd => "psd",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "states" => Ok(Mode::States),
            "psd" => Ok(Mode::Psd),
            _ => Err(Error::UnknownName {
                kind: "mode",
                name: s.to_string(),
                valid: "states, psd".to_string(),
            }),
        }
    }

    pub fn traceless(self) -> bool {
        self == Mode::States
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertConfig<T: Scalar> {
    pub f: MonotoneFunction,
    pub n_samples: usize,
    pub seed: u64,
    /// A contraction ratio above `1 + ratio_tol` counts as expansion.
    pub ratio_tol: T,
    pub eta0: T,
    /// Number of schedule levels; `η_k = η₀·2⁻ᵏ` for `k < eta_levels`.
    pub eta_levels: usize,
    pub bisection_tol: T,
    /// Ancilla dimension of the lifted test; `None` uses the map dimension.
    pub ancilla_dim: Option<usize>,
    pub mode: Mode,
    pub tol: Tolerances<T>,
    pub oracle_grid: usize,
    pub oracle_refine: usize,
    pub trace_samples: usize,
    pub contrast_g: ContrastGenerator,
}

impl<T: Scalar> Default for CertConfig<T> {
    fn default() -> Self {
        CertConfig {
            f: MonotoneFunction::Sld,
            n_samples: 10_000,
            seed: 7,
            ratio_tol: T::lit(1e-8),
            eta0: T::lit(0.1),
            eta_levels: 20,
            bisection_tol: T::lit(1e-10),
            ancilla_dim: None,
            mode: Mode::States,
            tol: Tolerances::default(),
            oracle_grid: 10_000,
            oracle_refine: 50,
            trace_samples: 1_000,
            contrast_g: ContrastGenerator::NegLog,
        }
    }
}

pub const MAX_ETA_LEVELS: usize = 21;

impl<T: Scalar> CertConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: T| {
            if x > T::zero() && x.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, "must be positive and finite"))
            }
        };
        positive("ratio_tol", self.ratio_tol)?;
        positive("eta0", self.eta0)?;
        positive("bisection_tol", self.bisection_tol)?;
        positive("tol_psd", self.tol.psd)?;
        positive("tol_interior", self.tol.interior)?;
        positive("tol_hermitian", self.tol.hermitian)?;
        if self.eta0 >= T::one() {
            return Err(Error::param("eta0", "must be below 1"));
        }
        if self.eta_levels == 0 || self.eta_levels > MAX_ETA_LEVELS {
            return Err(Error::param(
                "eta_levels",
                format!("must lie in 1..={MAX_ETA_LEVELS}"),
            ));
        }
        if self.n_samples == 0 {
            return Err(Error::param("n_samples", "must be positive"));
        }
        if self.oracle_grid == 0 {
            return Err(Error::param("oracle_grid", "must be positive"));
        }
        if self.trace_samples == 0 {
            return Err(Error::param("trace_samples", "must be positive"));
        }
        if self.ancilla_dim == Some(0) {
            return Err(Error::param("ancilla_dim", "must be positive"));
        }
        self.contrast_g.validate()
    }

    /// `η₀, η₀/2, η₀/4, …`, strictly decreasing.
    pub fn eta_schedule(&self) -> Vec<T> {
        let half = T::lit(0.5);
        std::iter::successors(Some(self.eta0), |&e| Some(e * half))
            .take(self.eta_levels)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let c = CertConfig::<f64>::default();
        c.validate().unwrap();
        let s = c.eta_schedule();
        assert_eq!(s.len(), 20);
        assert_eq!(s[0], 0.1);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(s[19], 0.1 / 2f64.powi(19));
    }

    #[test]
    fn rejects_bad_values() {
        let c = CertConfig::<f64> { ratio_tol: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = CertConfig::<f64> { eta_levels: 30, ..Default::default() };
        assert!(c.validate().is_err());
        let c = CertConfig::<f64> { ancilla_dim: Some(0), ..Default::default() };
        assert!(c.validate().is_err());
        assert!(Mode::from_name("bogus").is_err());
    }
}
