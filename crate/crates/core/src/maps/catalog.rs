use std::collections::BTreeMap;
use std::fmt;

use super::stochastic::{identity_stochastic, negative_entry, permutation, random_stochastic, uniform_mixer};
use super::{KrausTerm, LinearMap, StochasticMap};
use crate::error::{Error, Result};
use crate::matcore::random_unitary;
use crate::scalar::{creal, CMatrix, Scalar};

pub const QUANTUM_NAMES: &[&str] = &[
    "identity",
    "unitary",
    "transpose",
    "depolarizing",
    "dephasing",
    "amplitude-damping",
    "damping-filter",
    "scalar",
    "random-cptp",
];

pub const CLASSICAL_NAMES: &[&str] = &["stochastic", "permutation", "mixer", "classical-identity", "negative-entry"];

/// A map of either kind, as loaded from a catalog spec or a map file.
#[derive(Clone, Debug)]
pub enum MapItem<T: Scalar> {
    Quantum(LinearMap<T>),
    Classical(StochasticMap<T>),
}

fn unit<T: Scalar>(d: usize, i: usize, j: usize) -> CMatrix<T> {
    let mut e = CMatrix::zeros(d, d);
    e[(i, j)] = creal(T::one());
    e
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::param("d", "dimension must be positive"));
    }
    Ok(())
}

pub fn identity<T: Scalar>(d: usize) -> Result<LinearMap<T>> {
    check_dim(d)?;
    LinearMap::from_kraus(vec![CMatrix::identity(d, d)])
}

/// `X ↦ U X U†`.
pub fn unitary<T: Scalar>(u: CMatrix<T>) -> Result<LinearMap<T>> {
    LinearMap::from_kraus(vec![u])
}

pub fn random_unitary_channel<T: Scalar>(d: usize, seed: u64) -> Result<LinearMap<T>> {
    check_dim(d)?;
    unitary(random_unitary(d, seed))
}

/// `X ↦ Xᵀ`, stored as a transfer matrix (it has no Kraus form with positive weights).
pub fn transpose<T: Scalar>(d: usize) -> Result<LinearMap<T>> {
    check_dim(d)?;
    let mut t = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            t[(i * d + j, j * d + i)] = creal(T::one());
        }
    }
    LinearMap::from_transfer(t)
}

/// `X ↦ p X + (1 − p)·Tr(X)·𝟙/d`, for any real `p`. Uses
/// `Σ_ab E_ab X E_ba = Tr(X)·𝟙`.
pub fn depolarizing<T: Scalar>(d: usize, p: T) -> Result<LinearMap<T>> {
    check_dim(d)?;
    let mut terms = vec![KrausTerm {
        weight: p,
        op: CMatrix::identity(d, d),
    }];
    let w = (T::one() - p) / T::lit(d as f64);
    for a in 0..d {
        for b in 0..d {
            terms.push(KrausTerm {
                weight: w,
                op: unit(d, a, b),
            });
        }
    }
    LinearMap::from_weighted_kraus(terms)
}

/// `X ↦ λ X + (1 − λ)·diag(X)`.
pub fn dephasing<T: Scalar>(d: usize, lambda: T) -> Result<LinearMap<T>> {
    check_dim(d)?;
    let mut terms = vec![KrausTerm {
        weight: lambda,
        op: CMatrix::identity(d, d),
    }];
    for i in 0..d {
        terms.push(KrausTerm {
            weight: T::one() - lambda,
            op: unit(d, i, i),
        });
    }
    LinearMap::from_weighted_kraus(terms)
}

fn damping_ops<T: Scalar>(gamma: T) -> Result<(CMatrix<T>, CMatrix<T>)> {
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::param("gamma", "must lie in [0, 1]"));
    }
    let mut k0 = CMatrix::zeros(2, 2);
    k0[(0, 0)] = creal(T::one());
    k0[(1, 1)] = creal((T::one() - gamma).sqrt());
    let mut k1 = CMatrix::zeros(2, 2);
    k1[(0, 1)] = creal(gamma.sqrt());
    Ok((k0, k1))
}

/// Qubit amplitude damping with decay probability `γ`.
pub fn amplitude_damping<T: Scalar>(gamma: T) -> Result<LinearMap<T>> {
    let (k0, k1) = damping_ops(gamma)?;
    LinearMap::from_kraus(vec![k0, k1])
}

/// The no-jump branch of amplitude damping alone: CP and trace decreasing.
pub fn damping_filter<T: Scalar>(gamma: T) -> Result<LinearMap<T>> {
    let (k0, _) = damping_ops(gamma)?;
    LinearMap::from_kraus(vec![k0])
}

/// `X ↦ c·X`.
pub fn scalar<T: Scalar>(d: usize, c: T) -> Result<LinearMap<T>> {
    Ok(identity(d)?.scaled(c))
}

/// Random CPTP map with `k` Kraus operators cut from the first `d` columns of
/// a Haar unitary on `ℂ^{dk}`.
pub fn random_cptp<T: Scalar>(d: usize, k: usize, seed: u64) -> Result<LinearMap<T>> {
    check_dim(d)?;
    if k == 0 {
        return Err(Error::param("k", "need at least one Kraus operator"));
    }
    let u = random_unitary::<T>(d * k, seed);
    let ops = (0..k)
        .map(|j| u.view((j * d, 0), (d, d)).into_owned())
        .collect();
    LinearMap::from_kraus(ops)
}

/// Convex (or general real) mixture `Σ w_k Φ_k`.
pub fn mixture<T: Scalar>(parts: &[(T, &LinearMap<T>)]) -> Result<LinearMap<T>> {
    LinearMap::combination(parts)
}

/// A parsed `name?key=value&...` specification, as used after the `catalog:`
/// prefix on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl CatalogSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.strip_prefix("catalog:").unwrap_or(s);
        let (name, query) = match s.split_once('?') {
            Some((n, q)) => (n, q),
            None => (s, ""),
        };
        let mut params = BTreeMap::new();
        for pair in query.split('&').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::param(pair, "expected key=value"))?;
            if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::param(k, "given twice"));
            }
        }
        Ok(CatalogSpec {
            name: name.to_string(),
            params,
        })
    }

    fn take<V: std::str::FromStr>(&self, used: &mut Vec<&'static str>, key: &'static str) -> Result<Option<V>> {
        used.push(key);
        match self.params.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::param(key, format!("cannot parse '{v}'"))),
        }
    }

    fn require<V: std::str::FromStr>(&self, used: &mut Vec<&'static str>, key: &'static str) -> Result<V> {
        self.take(used, key)?
            .ok_or_else(|| Error::param(key, format!("required by '{}'", self.name)))
    }

    fn reject_unused(&self, used: &[&'static str]) -> Result<()> {
        match self.params.keys().find(|k| !used.contains(&k.as_str())) {
            Some(k) => Err(Error::param(k.clone(), format!("not accepted by '{}'", self.name))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "catalog:{}", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { '?' } else { '&' })?;
        }
        Ok(())
    }
}

/// Builds a catalog entry. Every quantum map accepts an extra `scale`
/// multiplier; `d` defaults to 2.
pub fn catalog<T: Scalar>(spec: &CatalogSpec) -> Result<MapItem<T>> {
    let mut used = Vec::new();
    let u = &mut used;
    let lit = |x: f64| T::lit(x);
    let item = match spec.name.as_str() {
        "stochastic" => MapItem::Classical(random_stochastic(
            spec.take(u, "n")?.unwrap_or(3),
            spec.take(u, "seed")?.unwrap_or(0),
        )?),
        "mixer" => MapItem::Classical(uniform_mixer(spec.take(u, "n")?.unwrap_or(3))?),
        "classical-identity" => MapItem::Classical(identity_stochastic(spec.take(u, "n")?.unwrap_or(3))?),
        "permutation" => {
            let raw: String = spec.require(u, "perm")?;
            let perm = raw
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::param("perm", format!("cannot parse '{raw}'")))?;
            MapItem::Classical(permutation(&perm)?)
        }
        "negative-entry" => MapItem::Classical(negative_entry(
            spec.take(u, "n")?.unwrap_or(3),
            spec.take(u, "seed")?.unwrap_or(0),
            lit(spec.take(u, "value")?.unwrap_or(-0.1)),
        )?),
        name => {
            let d: usize = spec.take(u, "d")?.unwrap_or(2);
            let map = match name {
                "identity" => identity(d)?,
                "unitary" => random_unitary_channel(d, spec.take(u, "seed")?.unwrap_or(0))?,
                "transpose" => transpose(d)?,
                "depolarizing" => depolarizing(d, lit(spec.require(u, "p")?))?,
                "dephasing" => dephasing(d, lit(spec.require(u, "lambda")?))?,
                "amplitude-damping" | "damping-filter" => {
                    if d != 2 {
                        return Err(Error::param("d", format!("'{name}' is a qubit map")));
                    }
                    let gamma = lit(spec.require(u, "gamma")?);
                    if name == "amplitude-damping" {
                        amplitude_damping(gamma)?
                    } else {
                        damping_filter(gamma)?
                    }
                }
                "scalar" => scalar(d, lit(spec.require(u, "c")?))?,
                "random-cptp" => random_cptp(
                    d,
                    spec.take(u, "k")?.unwrap_or(2),
                    spec.take(u, "seed")?.unwrap_or(0),
                )?,
                _ => {
                    let valid: Vec<&str> = QUANTUM_NAMES.iter().chain(CLASSICAL_NAMES).copied().collect();
                    return Err(Error::UnknownName {
                        kind: "catalog map",
                        name: name.to_string(),
                        valid: valid.join(", "),
                    });
                }
            };
            match spec.take::<f64>(u, "scale")? {
                Some(c) => MapItem::Quantum(map.scaled(lit(c))),
                None => MapItem::Quantum(map),
            }
        }
    };
    spec.reject_unused(&used)?;
    Ok(item)
}

/// Quantum catalog entry from a spec string; errors on classical names.
pub fn catalog_map<T: Scalar>(spec: &str) -> Result<LinearMap<T>> {
    match catalog(&CatalogSpec::parse(spec)?)? {
        MapItem::Quantum(m) => Ok(m),
        MapItem::Classical(_) => Err(Error::param("catalog", format!("'{spec}' is a classical map"))),
    }
}
