use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const MAP_HELP: &str = "\
Maps are given as `catalog:<name>?key=value&...` or as a JSON file:

  {\"dim\": 2, \"repr\": \"kraus\", \"data\": [K1, K2, ...], \"weights\": [w1, ...]}
  {\"dim\": 2, \"repr\": \"transfer\", \"data\": T}      T acts on column-stacked matrices
  {\"dim\": 2, \"repr\": \"choi\", \"data\": C}          C[i*d+a, j*d+b] = Phi(|i><j|)[a, b]
  {\"dim\": 3, \"repr\": \"stochastic\", \"data\": P}    real, columns sum to one

A complex entry is [re, im]; a matrix is a row-major array of rows.
`weights` is optional and gives signed Kraus terms.

Tolerances can be overridden with QFISHER_TOL_PSD, QFISHER_TOL_INTERIOR
and QFISHER_RATIO_TOL.

Exit status: 0 clean, 2 witness or trace violation found, 1 error.";

#[derive(Debug, Parser)]
#[command(name = "qfisher", version, about = "Monotone-metric certification of linear maps", after_help = MAP_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Classify a map as CPTP, PTP-not-CP, NonPositive, TraceIncreasing or NotHP.
    Certify {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
    /// Boundary-approach search for a point where the map expands the metric.
    Witness {
        #[arg(long)]
        map: String,
        /// Search on the lifted map with this ancilla dimension.
        #[arg(long)]
        lift: Option<usize>,
        /// Look for a growing contrast function instead of a growing metric.
        #[arg(long)]
        contrast: Option<String>,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
    /// Evaluate K_f at rho on (A, B); B defaults to A.
    Metric {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value = "sld")]
        f: String,
        #[command(flatten)]
        #[serde(flatten)]
        tol: TolArgs,
    },
    /// Evaluate the contrast function H_g(rho || sigma).
    Divergence {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        sigma: String,
        #[arg(long, default_value = "neglog")]
        g: String,
        #[command(flatten)]
        #[serde(flatten)]
        tol: TolArgs,
    },
    /// Sampled contraction test of the metric, or of H_g with --contrast.
    ContractTest {
        #[arg(long)]
        map: String,
        #[arg(long)]
        contrast: Option<String>,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
    /// Relative-entropy and Fisher-Rao contraction of a classical matrix.
    Classical {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
    /// List catalog maps, or print one as a map file with --emit.
    Catalog {
        #[arg(long)]
        emit: Option<String>,
    },
    /// Certify a catalog family over a parameter grid.
    Sweep {
        /// Catalog map name, e.g. depolarizing.
        #[arg(long)]
        family: String,
        #[arg(long)]
        param: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Extra catalog parameters, `key=value`.
        #[arg(long = "fixed")]
        fixed: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        #[serde(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TolArgs {
    #[arg(long, env = "QFISHER_TOL_PSD")]
    pub tol_psd: Option<f64>,
    #[arg(long, env = "QFISHER_TOL_INTERIOR")]
    pub tol_interior: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[arg(long, default_value = "sld")]
    pub f: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, env = "QFISHER_RATIO_TOL")]
    pub ratio_tol: Option<f64>,
    /// `states` (trace one, traceless tangents) or `psd`.
    #[arg(long, default_value = "states")]
    pub mode: String,
    #[arg(long, default_value_t = 0.1)]
    pub eta0: f64,
    #[arg(long, default_value_t = 20)]
    pub levels: usize,
    #[arg(long)]
    pub bisection_tol: Option<f64>,
    /// Ancilla dimension for the lifted test, or `auto` for the map dimension.
    #[arg(long, default_value = "auto")]
    pub ancilla: String,
    #[arg(long, default_value_t = 10_000)]
    pub oracle_samples: usize,
    #[arg(long, default_value_t = 50)]
    pub oracle_refine: usize,
    #[arg(long, default_value_t = 1_000)]
    pub trace_samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub tol: TolArgs,
}
