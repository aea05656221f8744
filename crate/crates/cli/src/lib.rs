//! Library side of the `qfisher` command-line tool: argument types, dispatch
//! and report assembly. `main.rs` only parses and prints.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;

use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub use args::{Cli, Command, Format, RunArgs, TolArgs};

use qfisher::certifier::{
    certify, classical_contraction_test, contrast_contraction_test, contrast_witness_search, sample_contraction_test,
    witness_search, CertConfig, Classification, Mode,
};
use qfisher::geometry::{contrast_eval, fisher_metric};
use qfisher::io::{load_map, map_to_json, parse_hermitian_str, stochastic_to_json};
use qfisher::maps::catalog::{CLASSICAL_NAMES, QUANTUM_NAMES};
use qfisher::maps::{catalog, CatalogSpec, LinearMap, MapItem, StochasticMap};
use qfisher::matcore::{HermitianMatrix, PsdMatrix};
use qfisher::{ContrastGenerator, Error, MonotoneFunction, Tolerances};

pub const TOOL: &str = "qfisher";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a subcommand produced.
#[derive(Debug)]
pub enum Output {
    /// Wrapped in the standard report envelope.
    Report { config: Value, payload: Value, wall_clock_ms: u128 },
    Csv(String),
    /// Printed as is.
    Raw(Value),
}

#[derive(Debug)]
pub struct Outcome {
    pub output: Output,
    /// 0 clean, 2 witness or trace violation, 1 error.
    pub exit_code: u8,
}

impl Outcome {
    /// The text written to `--out` or stdout.
    pub fn render(&self) -> Result<String> {
        Ok(match &self.output {
            Output::Report {
                config,
                payload,
                wall_clock_ms,
            } => {
                let report = json!({
                    "tool": TOOL,
                    "version": VERSION,
                    "config": config,
                    "payload": payload,
                    "wall_clock_ms": wall_clock_ms,
                });
                serde_json::to_string_pretty(&report)? + "\n"
            }
            Output::Csv(s) => s.clone(),
            Output::Raw(v) => serde_json::to_string_pretty(v)? + "\n",
        })
    }
}

fn tolerances(t: &TolArgs) -> Tolerances<f64> {
    let mut tol = Tolerances::default();
    if let Some(x) = t.tol_psd {
        tol.psd = x;
    }
    if let Some(x) = t.tol_interior {
        tol.interior = x;
    }
    tol
}

pub fn cert_config(r: &RunArgs) -> Result<CertConfig<f64>> {
    let mut cfg = CertConfig::<f64> {
        f: MonotoneFunction::from_name(&r.f)?,
        n_samples: r.samples,
        seed: r.seed,
        eta0: r.eta0,
        eta_levels: r.levels,
        mode: Mode::from_name(&r.mode)?,
        oracle_grid: r.oracle_samples,
        oracle_refine: r.oracle_refine,
        trace_samples: r.trace_samples,
        tol: tolerances(&r.tol),
        ..CertConfig::default()
    };
    if let Some(x) = r.ratio_tol {
        cfg.ratio_tol = x;
    }
    if let Some(x) = r.bisection_tol {
        cfg.bisection_tol = x;
    }
    cfg.ancilla_dim = match r.ancilla.as_str() {
        "auto" => None,
        n => Some(
            n.parse()
                .ok()
                .filter(|&n: &usize| n > 0)
                .with_context(|| format!("--ancilla expects `auto` or a positive integer, got '{n}'"))?,
        ),
    };
    for (name, v) in [
        ("ratio-tol", cfg.ratio_tol),
        ("bisection-tol", cfg.bisection_tol),
        ("tol-psd", cfg.tol.psd),
        ("tol-interior", cfg.tol.interior),
    ] {
        if !(v > 0.0) {
            bail!("--{name} must be positive, got {v}");
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn quantum(source: &str) -> Result<LinearMap<f64>> {
    match load_map(source).with_context(|| format!("loading map '{source}'"))? {
        MapItem::Quantum(m) => Ok(m),
        MapItem::Classical(_) => bail!("'{source}' is a classical map; use the `classical` subcommand"),
    }
}

fn classical(source: &str) -> Result<StochasticMap<f64>> {
    match load_map(source).with_context(|| format!("loading map '{source}'"))? {
        MapItem::Classical(t) => Ok(t),
        MapItem::Quantum(_) => bail!("'{source}' is a quantum map; classical maps use repr \"stochastic\""),
    }
}

fn hermitian_file(path: &str) -> Result<HermitianMatrix<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading '{path}'"))?;
    parse_hermitian_str(&text).with_context(|| format!("parsing '{path}'"))
}

fn to_value<S: Serialize>(s: &S) -> Result<Value> {
    Ok(serde_json::to_value(s)?)
}

fn report(command: &Command, cfg: Option<&CertConfig<f64>>, payload: Value, start: Instant, exit_code: u8) -> Result<Outcome> {
    let mut config = to_value(command)?;
    if let (Some(cfg), Some(obj)) = (cfg, config.as_object_mut()) {
        obj.insert("resolved".into(), to_value(cfg)?);
    }
    Ok(Outcome {
        output: Output::Report {
            config,
            payload,
            wall_clock_ms: start.elapsed().as_millis(),
        },
        exit_code,
    })
}

/// One row of a sweep table.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub map: String,
    pub classification: String,
    pub oracle: String,
    pub agrees: bool,
    pub base_max_ratio: Option<f64>,
    pub witness_ratio: Option<f64>,
    pub lifted_violated: Option<bool>,
    pub max_trace_gain: Option<f64>,
}

const SWEEP_HEADER: [&str; 9] = [
    "value",
    "map",
    "classification",
    "oracle",
    "agrees",
    "base_max_ratio",
    "witness_ratio",
    "lifted_violated",
    "max_trace_gain",
];

pub fn sweep_rows(family: &str, param: &str, grid: &str, fixed: &[String], cfg: &CertConfig<f64>) -> Result<Vec<SweepRow>> {
    let values = grid
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("grid value '{s}' is not a number")))
        .collect::<Result<Vec<_>>>()?;
    let mut base = CatalogSpec::parse(family)?;
    for kv in fixed {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--fixed expects key=value, got '{kv}'"))?;
        base.params.insert(k.to_string(), v.to_string());
    }
    values
        .into_iter()
        .map(|value| {
            let mut spec = base.clone();
            spec.params.insert(param.to_string(), value.to_string());
            let map = match catalog::<f64>(&spec)? {
                MapItem::Quantum(m) => m,
                MapItem::Classical(_) => bail!("'{family}' is a classical family"),
            };
            let r = certify(&map, cfg)?;
            let oracle = qfisher::certifier::oracle_classification(&r.oracle);
            Ok(SweepRow {
                value,
                map: spec.to_string(),
                classification: r.classification.to_string(),
                oracle: oracle.to_string(),
                agrees: oracle == r.classification,
                base_max_ratio: r.base.as_ref().map(|b| b.sampled.max_ratio()),
                witness_ratio: r.base.as_ref().and_then(|b| b.witness()).map(|w| w.ratio),
                lifted_violated: r.lifted.as_ref().map(|l| l.violated),
                max_trace_gain: r.trace.as_ref().map(|t| t.max_trace_gain),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn not_found(e: Error) -> Result<Value> {
    match e {
        Error::NotFound => Ok(json!({"found": false, "reason": e.to_string()})),
        e => Err(e.into()),
    }
}

/// Runs one subcommand. Errors map to exit status 1.
pub fn run(command: &Command) -> Result<Outcome> {
    let start = Instant::now();
    match command {
        Command::Certify { map, run } => {
            let cfg = cert_config(run)?;
            let m = quantum(map)?;
            let r = certify(&m, &cfg)?;
            let code = if r.classification == Classification::NotHp {
                1
            } else if r.has_violation() {
                2
            } else {
                0
            };
            if code == 1 {
                eprintln!("error: {}", Error::NotHermitianPreserving { residual: r.hp_residual });
            }
            let mut payload = to_value(&r)?;
            payload["oracle_classification"] = to_value(&qfisher::certifier::oracle_classification(&r.oracle))?;
            report(command, Some(&cfg), payload, start, code)
        }
        Command::Witness {
            map,
            lift,
            contrast,
            run,
        } => {
            let cfg = cert_config(run)?;
            let mut m = quantum(map)?;
            if let Some(n) = lift {
                m = m.tensor_identity(*n)?;
            }
            let (payload, found) = match contrast {
                Some(g) => match contrast_witness_search(&m, ContrastGenerator::from_name(g)?, &cfg) {
                    Ok(s) => {
                        let found = s.witness.is_some();
                        (to_value(&s)?, found)
                    }
                    Err(e) => (not_found(e)?, false),
                },
                None => match witness_search(&m, &cfg) {
                    Ok(s) => {
                        let found = !s.witnesses.is_empty();
                        let mut v = to_value(&s)?;
                        v["slope"] = to_value(&s.slope())?;
                        v["strongest"] = to_value(&s.strongest())?;
                        (v, found)
                    }
                    Err(e) => (not_found(e)?, false),
                },
            };
            report(command, Some(&cfg), payload, start, if found { 2 } else { 0 })
        }
        Command::Metric { rho, a, b, f, tol } => {
            let tol = tolerances(tol);
            let f = MonotoneFunction::from_name(f)?;
            let pi = PsdMatrix::new(hermitian_file(rho)?, &tol)?;
            let a = hermitian_file(a)?;
            let b = match b {
                Some(p) => hermitian_file(p)?,
                None => a.clone(),
            };
            let v = fisher_metric(&pi, &a, &b, f, &tol)?;
            let payload = json!({
                "value": v.value,
                "f_or_g": f.name(),
                "basepoint_mineig": v.basepoint_min_eigenvalue,
            });
            report(command, None, payload, start, 0)
        }
        Command::Divergence { rho, sigma, g, tol } => {
            let tol = tolerances(tol);
            let g = ContrastGenerator::from_name(g)?;
            let r = PsdMatrix::new(hermitian_file(rho)?, &tol)?;
            let s = PsdMatrix::new(hermitian_file(sigma)?, &tol)?;
            let v = contrast_eval(&r, &s, g, &tol)?;
            let payload = json!({
                "value": v.value,
                "f_or_g": g.name(),
                "basepoint_mineig": r.min_eigenvalue().min(s.min_eigenvalue()),
            });
            report(command, None, payload, start, 0)
        }
        Command::ContractTest { map, contrast, run } => {
            let cfg = cert_config(run)?;
            let m = quantum(map)?;
            let (payload, found) = match contrast {
                Some(g) => {
                    let v = contrast_contraction_test(&m, ContrastGenerator::from_name(g)?, &cfg)?;
                    let found = v.witness.is_some();
                    (to_value(&v)?, found)
                }
                None => {
                    let v = sample_contraction_test(&m, &cfg)?;
                    let found = v.witness().is_some();
                    (to_value(&v)?, found)
                }
            };
            report(command, Some(&cfg), payload, start, if found { 2 } else { 0 })
        }
        Command::Classical { map, run } => {
            let cfg = cert_config(run)?;
            let t = classical(map)?;
            let v = classical_contraction_test(&t, &cfg)?;
            let code = if v.violated { 2 } else { 0 };
            report(command, Some(&cfg), to_value(&v)?, start, code)
        }
        Command::Catalog { emit } => match emit {
            Some(spec) => {
                let v = match catalog::<f64>(&CatalogSpec::parse(spec)?)? {
                    MapItem::Quantum(m) => map_to_json(&m),
                    MapItem::Classical(t) => stochastic_to_json(&t),
                };
                Ok(Outcome {
                    output: Output::Raw(v),
                    exit_code: 0,
                })
            }
            None => {
                let payload = json!({
                    "quantum": QUANTUM_NAMES,
                    "classical": CLASSICAL_NAMES,
                    "f": MonotoneFunction::NAMES,
                    "g": ContrastGenerator::NAMES,
                });
                report(command, None, payload, start, 0)
            }
        },
        Command::Sweep {
            family,
            param,
            grid,
            fixed,
            format,
            run,
        } => {
            let cfg = cert_config(run)?;
            let rows = sweep_rows(family, param, grid, fixed, &cfg)?;
            match format {
                Format::Csv => Ok(Outcome {
                    output: Output::Csv(sweep_csv(&rows)?),
                    exit_code: 0,
                }),
                Format::Json => report(command, Some(&cfg), to_value(&rows)?, start, 0),
            }
        }
    }
}

fn out_path(command: &Command) -> Option<&str> {
    match command {
        Command::Certify { run, .. }
        | Command::Witness { run, .. }
        | Command::ContractTest { run, .. }
        | Command::Classical { run, .. }
        | Command::Sweep { run, .. } => run.tol.out.as_deref(),
        Command::Metric { tol, .. } | Command::Divergence { tol, .. } => tol.out.as_deref(),
        Command::Catalog { .. } => None,
    }
}

/// Writes the rendered outcome to `--out` when given, else to stdout.
pub fn emit(command: &Command, outcome: &Outcome) -> Result<()> {
    let text = outcome.render()?;
    match out_path(command) {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing '{path}'"))?,
        None => print!("{text}"),
    }
    Ok(())
}
