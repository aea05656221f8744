use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fisher-Rao quadratic form `Σᵢ dqᵢ²/pᵢ`.
pub fn classical_fisher<T: Scalar>(p: &[T], dq: &[T]) -> Result<T> {
    if p.len() != dq.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: dq.len(),
        });
    }
    let mut acc = T::zero();
    for (&pi, &d) in p.iter().zip(dq) {
        if !(pi > T::zero()) {
            return Err(Error::Domain {
                what: "classical_fisher: p must be strictly positive",
                value: pi.as_f64(),
            });
        }
        acc += d * d / pi;
    }
    Ok(acc)
}

/// Relative entropy `D(p‖q) = Σᵢ pᵢ log(pᵢ/qᵢ)`; terms with `pᵢ = 0` vanish.
pub fn relative_entropy<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    let mut acc = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        if a < T::zero() {
            return Err(Error::Domain {
                what: "relative_entropy: negative probability",
                value: a.as_f64(),
            });
        }
        if a == T::zero() {
            continue;
        }
        if !(b > T::zero()) {
            return Err(Error::Domain {
                what: "relative_entropy: q must be positive where p is",
                value: b.as_f64(),
            });
        }
        acc += a * (a / b).ln();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::seeded_rng;
    use rand::Rng;

    #[test]
    fn fisher_examples() {
        let a = 0.3f64;
        assert!((classical_fisher(&[0.5, 0.5], &[a, -a]).unwrap() - 4.0 * a * a).abs() < 1e-15);
        assert_eq!(classical_fisher(&[0.2, 0.8], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(classical_fisher(&[0.0, 1.0], &[0.1, -0.1]).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let p = [0.3, 0.7];
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);
        let v = relative_entropy(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(relative_entropy(&[0.5, 0.5], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn gibbs_inequality_monte_carlo() {
        let mut rng = seeded_rng(17);
        for _ in 0..1000 {
            let mut p: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 1e-3).collect();
            let mut q: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 1e-3).collect();
            let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
            p.iter_mut().for_each(|x| *x /= sp);
            q.iter_mut().for_each(|x| *x /= sq);
            assert!(relative_entropy(&p, &q).unwrap() >= -1e-15);
        }
    }
}
