//! Operator monotone functions `f` and contrast generators `g`.
//!
//! Every `f` is normalized so that `f(1) = 1` and satisfies the symmetry
//! `f(x) = x·f(1/x)`. Every `g` satisfies `g(1) = 0`. The correspondence
//!
//! ```text
//! f(x) = (x − 1)² / (g(x) + x·g(1/x))
//! ```
//!
//! is evaluated directly away from `x = 1` and through a fourth-order Taylor
//! expansion built from the derivatives of `g` at one inside `|x − 1| < 1e-4`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Half-width of the window around `x = 1` where series expansions replace
/// closed forms with removable singularities.
const EXCESS_WINDOW: f64 = 1e-3;

pub const SERIES_WINDOW: f64 = 1e-4;

/// Number of Taylor coefficients of `g` at one used by the series route.
const G_ORDER: usize = 7;

/// Matrix convex generator `g` of a contrast function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContrastGenerator {
    /// `−log x`, giving the Umegaki relative entropy.
    NegLog,
    /// `x log x`.
    XLogX,
    /// `(x − 1)²`.
    Quadratic,
    /// `(x^α − 1) / (α(α − 1))`, matrix convex for `α ∈ [−1, 2] \ {0, 1}`.
    PowerAlpha(f64),
}

/// Operator monotone function `f` indexing a monotone metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MonotoneFunction {
    /// `(1 + x)/2`, symmetric logarithmic derivative (Bures) metric.
    Sld,
    /// `(x − 1)/log x`, Kubo-Mori-Bogoliubov metric.
    Kmb,
    /// `((1 + √x)/2)²`, Wigner-Yanase metric.
    Wy,
    /// `2x/(1 + x)`.
    Rld,
    /// Alias of [`MonotoneFunction::Rld`]: the harmonic mean `2x/(1 + x)`.
    Harmonic,
    /// `f` obtained from a contrast generator, normalized to `f(1) = 1`.
    FromG(ContrastGenerator),
}

impl ContrastGenerator {
    pub const CATALOG: [ContrastGenerator; 4] = [
        ContrastGenerator::NegLog,
        ContrastGenerator::XLogX,
        ContrastGenerator::Quadratic,
        ContrastGenerator::PowerAlpha(0.5),
    ];

    pub const NAMES: &'static str = "neglog, xlogx, quadratic, power:<alpha>";

    pub fn name(&self) -> String {
        match self {
            ContrastGenerator::NegLog => "neglog".into(),
            ContrastGenerator::XLogX => "xlogx".into(),
            ContrastGenerator::Quadratic => "quadratic".into(),
            ContrastGenerator::PowerAlpha(a) => format!("power:{a}"),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownName {
            kind: "contrast generator",
            name: name.to_string(),
            valid: Self::NAMES.to_string(),
        };
        let g = match name.trim().to_ascii_lowercase().as_str() {
            "neglog" | "-log" | "relative-entropy" => ContrastGenerator::NegLog,
            "xlogx" => ContrastGenerator::XLogX,
            "quadratic" | "chi2" => ContrastGenerator::Quadratic,
            other => {
                let alpha = other
                    .strip_prefix("power:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(unknown)?;
                ContrastGenerator::PowerAlpha(alpha)
            }
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if let ContrastGenerator::PowerAlpha(a) = *self {
            let ok = a.is_finite() && (-1.0..=2.0).contains(&a) && a != 0.0 && a != 1.0;
            if !ok {
                return Err(Error::param(
                    "alpha",
                    format!("{a} outside [-1, 2] \\ {{0, 1}}"),
                ));
            }
        }
        Ok(())
    }

    /// `g(x)` for `x > 0`.
    pub fn eval<T: Scalar>(&self, x: T) -> Result<T> {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::Domain {
                what: "contrast generator",
                value: x.as_f64(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked<T: Scalar>(&self, x: T) -> T {
        match *self {
            ContrastGenerator::NegLog => -x.ln(),
            ContrastGenerator::XLogX => x * x.ln(),
            ContrastGenerator::Quadratic => (x - T::one()) * (x - T::one()),
            ContrastGenerator::PowerAlpha(a) => {
                let a_t = T::lit(a);
                (x.powf(a_t) - T::one()) / (a_t * (a_t - T::one()))
            }
        }
    }

    /// `g(x) − g'(1)(x − 1)`, nonnegative by convexity. Near one it is
    /// summed from the Taylor coefficients so that it keeps full relative
    /// precision down to `(x − 1)²` scale.
    pub fn eval_excess<T: Scalar>(&self, x: T) -> Result<T> {
        let gx = self.eval(x)?;
        let c = self.taylor_at_one();
        let h = x - T::one();
        if h.abs() < T::lit(EXCESS_WINDOW) {
            let mut acc = T::zero();
            for &ck in c[2..].iter().rev() {
                acc = acc * h + T::lit(ck);
            }
            return Ok(acc * h * h);
        }
        Ok(gx - T::lit(c[1]) * h)
    }

    /// Taylor coefficients `g⁽ᵏ⁾(1)/k!` for `k = 0..7`.
    pub fn taylor_at_one(&self) -> [f64; G_ORDER] {
        let mut c = [0.0; G_ORDER];
        match *self {
            ContrastGenerator::NegLog => {
                for (k, ck) in c.iter_mut().enumerate().skip(1) {
                    *ck = if k % 2 == 0 { 1.0 } else { -1.0 } / k as f64;
                }
            }
            ContrastGenerator::XLogX => {
                c[1] = 1.0;
                for (k, ck) in c.iter_mut().enumerate().skip(2) {
                    *ck = if k % 2 == 0 { 1.0 } else { -1.0 } / (k * (k - 1)) as f64;
                }
            }
            ContrastGenerator::Quadratic => c[2] = 1.0,
            ContrastGenerator::PowerAlpha(a) => {
                // Generalized binomial coefficients of (1 + h)^α.
                let mut binom = 1.0;
                for (k, ck) in c.iter_mut().enumerate().skip(1) {
                    binom *= (a - (k as f64 - 1.0)) / k as f64;
                    *ck = binom / (a * (a - 1.0));
                }
            }
        }
        c
    }

    /// `g''(1)`, the factor relating the normalized `f` to the raw
    /// correspondence: `f_raw = f / g''(1)`.
    pub fn second_derivative_at_one(&self) -> f64 {
        2.0 * self.taylor_at_one()[2]
    }
}

impl MonotoneFunction {
    pub const CATALOG: [MonotoneFunction; 5] = [
        MonotoneFunction::Sld,
        MonotoneFunction::Kmb,
        MonotoneFunction::Wy,
        MonotoneFunction::Rld,
        MonotoneFunction::Harmonic,
    ];

    pub const NAMES: &'static str = "sld, kmb, wy, rld, harmonic, from-g:<generator>";

    pub fn name(&self) -> String {
        match self {
            MonotoneFunction::Sld => "sld".into(),
            MonotoneFunction::Kmb => "kmb".into(),
            MonotoneFunction::Wy => "wy".into(),
            MonotoneFunction::Rld => "rld".into(),
            MonotoneFunction::Harmonic => "harmonic".into(),
            MonotoneFunction::FromG(g) => format!("from-g:{}", g.name()),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        let f = match lower.as_str() {
            "sld" | "bures" => MonotoneFunction::Sld,
            "kmb" | "bkm" => MonotoneFunction::Kmb,
            "wy" => MonotoneFunction::Wy,
            "rld" => MonotoneFunction::Rld,
            "harmonic" => MonotoneFunction::Harmonic,
            other => match other.strip_prefix("from-g:") {
                Some(g) => MonotoneFunction::FromG(ContrastGenerator::from_name(g)?),
                None => {
                    return Err(Error::UnknownName {
                        kind: "monotone function",
                        name: name.to_string(),
                        valid: Self::NAMES.to_string(),
                    })
                }
            },
        };
        Ok(f)
    }

    /// `f(x)` for `x > 0`.
    pub fn eval<T: Scalar>(&self, x: T) -> Result<T> {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::Domain {
                what: "monotone function",
                value: x.as_f64(),
            });
        }
        let one = T::one();
        let two = T::lit(2.0);
        Ok(match *self {
            MonotoneFunction::Sld => (one + x) / two,
            MonotoneFunction::Kmb => kmb(x),
            MonotoneFunction::Wy => {
                let s = (one + x.sqrt()) / two;
                s * s
            }
            MonotoneFunction::Rld | MonotoneFunction::Harmonic => two * x / (one + x),
            MonotoneFunction::FromG(g) => return f_from_g(g, x),
        })
    }

    /// The matrix mean `m_f(a, b) = b·f(a/b)`, symmetric in `(a, b)`.
    pub fn mean<T: Scalar>(&self, a: T, b: T) -> Result<T> {
        Ok(b * self.eval(a / b)?)
    }
}

impl fmt::Display for MonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for ContrastGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for MonotoneFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl Serialize for ContrastGenerator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

/// Catalog evaluation, equivalent to [`MonotoneFunction::eval`].
pub fn f_eval<T: Scalar>(f: MonotoneFunction, x: T) -> Result<T> {
    f.eval(x)
}

fn kmb<T: Scalar>(x: T) -> T {
    let h = x - T::one();
    if h.abs() < T::lit(SERIES_WINDOW) {
        // x/log(1+x) = 1 + x/2 − x²/12 + x³/24 − 19x⁴/720 + …
        let c = [1.0, 0.5, -1.0 / 12.0, 1.0 / 24.0, -19.0 / 720.0];
        horner(&c, h)
    } else {
        h / x.ln()
    }
}

fn horner<T: Scalar>(coeffs: &[f64], h: T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * h + T::lit(c))
}

/// The `f ↔ g` correspondence, normalized so that `f(1) = 1`.
pub fn f_from_g<T: Scalar>(g: ContrastGenerator, x: T) -> Result<T> {
    g.validate()?;
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain {
            what: "f_from_g",
            value: x.as_f64(),
        });
    }
    let g2 = T::lit(g.second_derivative_at_one());
    let h = x - T::one();
    if h.abs() < T::lit(SERIES_WINDOW) {
        let series = correspondence_series(&g.taylor_at_one());
        return Ok(g2 * horner(&series, h));
    }
    let denom = g.eval_unchecked(x) + x * g.eval_unchecked(T::one() / x);
    if !denom.is_finite() || denom <= T::zero() {
        return Err(Error::InvalidGenerator {
            x: x.as_f64(),
            reason: "denominator g(x) + x g(1/x) is not positive",
        });
    }
    let f = g2 * h * h / denom;
    if !f.is_finite() {
        return Err(Error::InvalidGenerator {
            x: x.as_f64(),
            reason: "denominator underflow",
        });
    }
    Ok(f)
}

/// Taylor coefficients (order 0..=4 in `h = x − 1`) of
/// `(x − 1)² / (g(x) + x·g(1/x))` given those of `g` at one.
fn correspondence_series(g: &[f64; G_ORDER]) -> [f64; 5] {
    const N: usize = G_ORDER;
    let mul = |a: &[f64; N], b: &[f64; N]| {
        let mut out = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    };
    // u(h) = 1/(1 + h) − 1
    let mut u = [0.0; N];
    for (k, uk) in u.iter_mut().enumerate().skip(1) {
        *uk = if k % 2 == 0 { 1.0 } else { -1.0 };
    }
    // g(1/x) = Σ g_k u^k
    let mut g_inv = [0.0; N];
    let mut u_pow = [0.0; N];
    u_pow[0] = 1.0;
    for &gk in g.iter() {
        for i in 0..N {
            g_inv[i] += gk * u_pow[i];
        }
        u_pow = mul(&u_pow, &u);
    }
    // D(h) = g(1 + h) + (1 + h)·g(1/x)
    let mut one_plus_h = [0.0; N];
    one_plus_h[0] = 1.0;
    one_plus_h[1] = 1.0;
    let x_g_inv = mul(&one_plus_h, &g_inv);
    let mut denom = [0.0; N];
    for i in 0..N {
        denom[i] = g[i] + x_g_inv[i];
    }
    // D = h²·(d₂ + d₃h + …); invert the bracket as a power series.
    let q: Vec<f64> = denom[2..].to_vec();
    let mut inv = [0.0; 5];
    inv[0] = 1.0 / q[0];
    for n in 1..5 {
        let s: f64 = (1..=n).map(|k| q[k] * inv[n - k]).sum();
        inv[n] = -s / q[0];
    }
    inv
}

/// Logarithmically spaced grid of `n` points in `[lo, hi]`.
pub fn log_grid<T: Scalar>(lo: f64, hi: f64, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![T::lit(lo)];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| T::lit((a + (b - a) * i as f64 / (n - 1) as f64).exp()))
        .collect()
}

/// Largest relative symmetry residual `|f(x) − x·f(1/x)| / |f(x)|` on `grid`.
pub fn check_symmetry<T: Scalar>(f: MonotoneFunction, grid: &[T]) -> Result<T> {
    let mut worst = T::zero();
    for &x in grid {
        let fx = f.eval(x)?;
        let mirrored = x * f.eval(T::one() / x)?;
        let r = (fx - mirrored).abs() / fx.abs().max(mirrored.abs());
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Default symmetry grid: 1000 log-spaced points in `[1e-6, 1e6]`.
pub fn default_symmetry_grid<T: Scalar>() -> Vec<T> {
    log_grid(1e-6, 1e6, 1000)
}
