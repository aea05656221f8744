//! JSON encodings for matrices and maps.
//!
//! A complex scalar is `[re, im]` and a matrix is a row-major array of rows.
//! Map files look like
//!
//! ```json
//! {"dim": 2, "repr": "kraus", "data": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}
//! ```
//!
//! with `repr` one of `kraus` (list of operators, optional `weights`),
//! `transfer`, `choi`, or `stochastic` (real column-stochastic matrix).
//! Errors carry a JSON pointer to the offending value.

use nalgebra::DMatrix;
use serde::ser::SerializeSeq;
use serde::Serializer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::maps::{catalog, CatalogSpec, KrausTerm, LinearMap, MapItem, MapRepr, StochasticMap};
use crate::matcore::HermitianMatrix;
use crate::scalar::{cplx, CMatrix, CVector, Scalar};

pub fn serialize_cmatrix<T: Scalar, S: Serializer>(m: &CMatrix<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<[f64; 2]> = (0..m.ncols()).map(|j| [m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

pub fn serialize_opt_cvector<T: Scalar, S: Serializer>(
    v: &Option<CVector<T>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(v) => {
            let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect();
            s.collect_seq(pairs)
        }
    }
}

pub fn cmatrix_to_json<T: Scalar>(m: &CMatrix<T>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn number(v: &Value, pointer: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::parse(pointer, format!("expected a number, found {v}")))
}

fn array<'a>(v: &'a Value, pointer: &str, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::parse(pointer, format!("expected {what}, found {v}")))
}

/// Rows of a matrix, checked rectangular and non-empty.
fn rows<'a>(v: &'a Value, pointer: &str) -> Result<Vec<&'a Vec<Value>>> {
    let outer = array(v, pointer, "an array of rows")?;
    if outer.is_empty() {
        return Err(Error::parse(pointer, "matrix has no rows"));
    }
    let rows = outer
        .iter()
        .enumerate()
        .map(|(i, r)| array(r, &format!("{pointer}/{i}"), "a row"))
        .collect::<Result<Vec<_>>>()?;
    let n = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::parse(
            format!("{pointer}/{i}"),
            format!("row has {} entries, expected {n}", rows[i].len()),
        ));
    }
    Ok(rows)
}

pub fn parse_cmatrix<T: Scalar>(v: &Value, pointer: &str) -> Result<CMatrix<T>> {
    let rows = rows(v, pointer)?;
    let mut m = CMatrix::zeros(rows.len(), rows[0].len());
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let p = format!("{pointer}/{i}/{j}");
            let pair = array(z, &p, "a [re, im] pair")?;
            if pair.len() != 2 {
                return Err(Error::parse(&p, format!("expected a [re, im] pair, found {z}")));
            }
            let re = number(&pair[0], &format!("{p}/0"))?;
            let im = number(&pair[1], &format!("{p}/1"))?;
            m[(i, j)] = cplx(T::lit(re), T::lit(im));
        }
    }
    Ok(m)
}

pub fn parse_real_matrix<T: Scalar>(v: &Value, pointer: &str) -> Result<DMatrix<T>> {
    let rows = rows(v, pointer)?;
    let mut m = DMatrix::zeros(rows.len(), rows[0].len());
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = T::lit(number(x, &format!("{pointer}/{i}/{j}"))?);
        }
    }
    Ok(m)
}

fn square<T: Scalar>(m: CMatrix<T>, pointer: &str, expected: Option<usize>) -> Result<CMatrix<T>> {
    if !m.is_square() {
        return Err(Error::parse(pointer, format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    if let Some(n) = expected {
        if m.nrows() != n {
            return Err(Error::parse(pointer, format!("matrix is {0}x{0}, expected {n}x{n}", m.nrows())));
        }
    }
    Ok(m)
}

fn hermitian_residual<T: Scalar>(m: &CMatrix<T>) -> T {
    (m - m.adjoint()).iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
}

/// Hermitian matrix from its JSON encoding, either bare or under `"data"`.
pub fn parse_hermitian<T: Scalar>(v: &Value) -> Result<HermitianMatrix<T>> {
    let (v, pointer) = match v.get("data") {
        Some(d) => (d, "/data"),
        None => (v, ""),
    };
    let pointer_or_root = if pointer.is_empty() { "/" } else { pointer };
    let m = square(parse_cmatrix::<T>(v, pointer)?, pointer_or_root, None)?;
    let residual = hermitian_residual(&m);
    if residual >= T::lit(T::TOL_HERMITIAN) {
        return Err(Error::parse(
            pointer_or_root,
            format!("matrix is not Hermitian (residual {:e})", residual.as_f64()),
        ));
    }
    HermitianMatrix::new(m).map_err(|e| Error::parse(pointer_or_root, e.to_string()))
}

pub fn parse_hermitian_str<T: Scalar>(text: &str) -> Result<HermitianMatrix<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("/", e.to_string()))?;
    parse_hermitian(&v)
}

pub fn parse_map<T: Scalar>(v: &Value) -> Result<MapItem<T>> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse("/", "expected an object with dim, repr and data"))?;
    if let Some(k) = obj.keys().find(|k| !["dim", "repr", "data", "weights"].contains(&k.as_str())) {
        return Err(Error::parse(format!("/{k}"), "unknown field"));
    }
    let dim = match obj.get("dim") {
        None => None,
        Some(d) => Some(
            d.as_u64()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::parse("/dim", format!("expected a positive integer, found {d}")))?
                as usize,
        ),
    };
    let repr = obj
        .get("repr")
        .ok_or_else(|| Error::parse("/repr", "missing"))?
        .as_str()
        .ok_or_else(|| Error::parse("/repr", "expected a string"))?;
    let data = obj.get("data").ok_or_else(|| Error::parse("/data", "missing"))?;
    if obj.contains_key("weights") && repr != "kraus" {
        return Err(Error::parse("/weights", "only valid with repr \"kraus\""));
    }
    let sq = dim.map(|d| d * d);
    let map = match repr {
        "kraus" => {
            let ops = array(data, "/data", "a list of Kraus operators")?;
            if ops.is_empty() {
                return Err(Error::parse("/data", "at least one Kraus operator is required"));
            }
            let first = ops[0].as_array().map_or(0, |r| r.len());
            let d = dim.unwrap_or(first);
            let weights = match obj.get("weights") {
                None => vec![1.0; ops.len()],
                Some(w) => {
                    let w = array(w, "/weights", "a list of numbers")?;
                    if w.len() != ops.len() {
                        return Err(Error::parse(
                            "/weights",
                            format!("{} weights for {} operators", w.len(), ops.len()),
                        ));
                    }
                    w.iter()
                        .enumerate()
                        .map(|(k, x)| number(x, &format!("/weights/{k}")))
                        .collect::<Result<_>>()?
                }
            };
            let terms = ops
                .iter()
                .zip(weights)
                .enumerate()
                .map(|(k, (op, w))| {
                    let p = format!("/data/{k}");
                    Ok(KrausTerm {
                        weight: T::lit(w),
                        op: square(parse_cmatrix(op, &p)?, &p, Some(d))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            LinearMap::from_weighted_kraus(terms)?
        }
        "transfer" | "choi" => {
            let m = square(parse_cmatrix::<T>(data, "/data")?, "/data", sq)?;
            let n = m.nrows();
            if (n as f64).sqrt().round().powi(2) as usize != n {
                return Err(Error::parse("/data", format!("size {n} is not d² for an integer d")));
            }
            if repr == "transfer" {
                LinearMap::from_transfer(m)?
            } else {
                let residual = hermitian_residual(&m);
                if residual >= T::lit(T::TOL_HERMITIAN) {
                    return Err(Error::parse(
                        "/data",
                        format!("Choi matrix is not Hermitian (residual {:e})", residual.as_f64()),
                    ));
                }
                LinearMap::from_choi(m)?
            }
        }
        "stochastic" => {
            let m = parse_real_matrix::<T>(data, "/data")?;
            if m.nrows() != m.ncols() || dim.is_some_and(|d| d != m.nrows()) {
                return Err(Error::parse(
                    "/data",
                    format!("matrix is {}x{}, expected square of size dim", m.nrows(), m.ncols()),
                ));
            }
            return Ok(MapItem::Classical(StochasticMap::new(m)?));
        }
        other => {
            return Err(Error::parse(
                "/repr",
                format!("unknown repr '{other}'; valid: kraus, transfer, choi, stochastic"),
            ))
        }
    };
    Ok(MapItem::Quantum(map))
}

pub fn parse_map_str<T: Scalar>(text: &str) -> Result<MapItem<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("/", e.to_string()))?;
    parse_map(&v)
}

pub fn map_to_json<T: Scalar>(map: &LinearMap<T>) -> Value {
    let data = match map.repr() {
        MapRepr::Kraus(terms) => {
            let ops: Vec<Value> = terms.iter().map(|t| cmatrix_to_json(&t.op)).collect();
            if terms.iter().all(|t| t.weight == T::one()) {
                return json!({"dim": map.dim(), "repr": "kraus", "data": ops});
            }
            let weights: Vec<f64> = terms.iter().map(|t| t.weight.as_f64()).collect();
            return json!({"dim": map.dim(), "repr": "kraus", "data": ops, "weights": weights});
        }
        MapRepr::Transfer(m) | MapRepr::Choi(m) => cmatrix_to_json(m),
    };
    json!({"dim": map.dim(), "repr": map.repr().name(), "data": data})
}

pub fn stochastic_to_json<T: Scalar>(t: &StochasticMap<T>) -> Value {
    let m = t.matrix();
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].as_f64()).collect())
        .collect();
    json!({"dim": t.dim(), "repr": "stochastic", "data": rows})
}

/// A map from `catalog:<name>?k=v&...` or from a JSON file path.
pub fn load_map<T: Scalar>(source: &str) -> Result<MapItem<T>> {
    if source.starts_with("catalog:") {
        return catalog(&CatalogSpec::parse(source)?);
    }
    let text = std::fs::read_to_string(source).map_err(|e| Error::Io {
        path: source.to_string(),
        source: e,
    })?;
    parse_map_str(&text)
}
