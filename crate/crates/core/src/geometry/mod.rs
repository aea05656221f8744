//! Monotone metrics `K_f`, the Fisher operator `𝕁_f` and its inverse,
//! contrast functions `H_g`, and their classical counterparts.
//!
//! Everything is evaluated in the eigenbasis of the basepoint. With
//! `π = Σ πᵢ |i⟩⟨i|` the Fisher operator is diagonal on matrix units,
//!
//! ```text
//! 𝕁_f|_π [|i⟩⟨j|] = m_f(πᵢ, πⱼ) |i⟩⟨j|,   m_f(a, b) = b·f(a/b),
//! ```
//!
//! and `H_g(ρ‖σ) = Σᵢⱼ |⟨φᵢ|ψⱼ⟩|² g(sᵢ/rⱼ) rⱼ` for `ρ = Σ rⱼ|ψⱼ⟩⟨ψⱼ|`,
//! `σ = Σ sᵢ|φᵢ⟩⟨φᵢ|`.

mod classical;

use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use serde::Serialize;

pub use classical::{classical_fisher, relative_entropy};

use crate::error::{Error, Result};
use crate::matcore::{HermitianMatrix, PsdMatrix};
use crate::monotone::{ContrastGenerator, MonotoneFunction};
use crate::scalar::{creal, CMatrix, Scalar, Tolerances};

/// Value of a monotone metric at a basepoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricValue<T> {
    pub value: T,
    pub f: MonotoneFunction,
    /// Fingerprint of the basepoint matrix.
    pub basepoint: u64,
    pub basepoint_min_eigenvalue: T,
}

/// Value of a contrast function `H_g(ρ‖σ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceValue<T> {
    pub value: T,
    pub g: ContrastGenerator,
}

/// Stable hash of the bit patterns of a matrix.
pub fn fingerprint<T: Scalar>(h: &HermitianMatrix<T>) -> u64 {
    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    h.dim().hash(&mut hasher);
    for z in h.as_matrix().iter() {
        z.re.as_f64().to_bits().hash(&mut hasher);
        z.im.as_f64().to_bits().hash(&mut hasher);
    }
    hasher.finish()
}

/// Matrix of means `m_f(πᵢ, πⱼ)` in the eigenbasis of `π`.
fn mean_matrix<T: Scalar>(pi: &PsdMatrix<T>, f: MonotoneFunction) -> Result<DMatrix<T>> {
    let ev = &pi.spectral().eigenvalues;
    let d = ev.len();
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            m[(i, j)] = if i == j { ev[i] } else { f.mean(ev[i], ev[j])? };
        }
    }
    Ok(m)
}

fn to_eigenbasis<T: Scalar>(pi: &PsdMatrix<T>, a: &HermitianMatrix<T>) -> CMatrix<T> {
    let v = &pi.spectral().eigenvectors;
    v.adjoint() * a.as_matrix() * v
}

fn from_eigenbasis<T: Scalar>(pi: &PsdMatrix<T>, a: CMatrix<T>) -> HermitianMatrix<T> {
    let v = &pi.spectral().eigenvectors;
    HermitianMatrix::symmetrized(v * a * v.adjoint())
}

fn check_dims<T: Scalar>(pi: &PsdMatrix<T>, a: &HermitianMatrix<T>) -> Result<()> {
    if pi.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: pi.dim(),
            got: a.dim(),
        });
    }
    Ok(())
}

/// `𝕁_f⁻¹|_π [A]`: in the eigenbasis of `π`, `Aᵢⱼ / (πⱼ f(πᵢ/πⱼ))`.
pub fn fisher_inverse_apply<T: Scalar>(
    pi: &PsdMatrix<T>,
    a: &HermitianMatrix<T>,
    f: MonotoneFunction,
    tol: &Tolerances<T>,
) -> Result<HermitianMatrix<T>> {
    check_dims(pi, a)?;
    pi.require_interior(tol)?;
    let means = mean_matrix(pi, f)?;
    let mut coords = to_eigenbasis(pi, a);
    let d = means.nrows();
    for (k, z) in coords.iter_mut().enumerate() {
        *z /= creal(means[(k % d, k / d)]);
    }
    Ok(from_eigenbasis(pi, coords))
}

/// Forward Fisher operator `𝕁_f|_π [A] = ℝ_π f(𝕃_π ℝ_π⁻¹)[A]`.
pub fn fisher_apply<T: Scalar>(
    pi: &PsdMatrix<T>,
    a: &HermitianMatrix<T>,
    f: MonotoneFunction,
) -> Result<HermitianMatrix<T>> {
    check_dims(pi, a)?;
    if !(pi.min_eigenvalue() > T::zero()) {
        return Err(Error::SingularBasepoint {
            min_eigenvalue: pi.min_eigenvalue().as_f64(),
            threshold: 0.0,
        });
    }
    let means = mean_matrix(pi, f)?;
    let mut coords = to_eigenbasis(pi, a);
    let d = means.nrows();
    for (k, z) in coords.iter_mut().enumerate() {
        *z *= creal(means[(k % d, k / d)]);
    }
    Ok(from_eigenbasis(pi, coords))
}

/// `K_{f,π}(A, B) = Tr{A 𝕁_f⁻¹|_π [B]}`.
///
/// Symmetric and bilinear in `(A, B)`; nonnegative on the diagonal.
pub fn fisher_metric<T: Scalar>(
    pi: &PsdMatrix<T>,
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    f: MonotoneFunction,
    tol: &Tolerances<T>,
) -> Result<MetricValue<T>> {
    check_dims(pi, a)?;
    check_dims(pi, b)?;
    pi.require_interior(tol)?;
    let means = mean_matrix(pi, f)?;
    let at = to_eigenbasis(pi, a);
    let bt = if std::ptr::eq(a, b) {
        at.clone()
    } else {
        to_eigenbasis(pi, b)
    };
    let d = means.nrows();
    let mut value = T::zero();
    for (k, (x, y)) in at.iter().zip(bt.iter()).enumerate() {
        value += (x.conj() * y).re / means[(k % d, k / d)];
    }
    Ok(MetricValue {
        value,
        f,
        basepoint: fingerprint(pi.hermitian()),
        basepoint_min_eigenvalue: pi.min_eigenvalue(),
    })
}

/// `K_{f,π}(A, A)`.
pub fn fisher_norm_sq<T: Scalar>(
    pi: &PsdMatrix<T>,
    a: &HermitianMatrix<T>,
    f: MonotoneFunction,
    tol: &Tolerances<T>,
) -> Result<T> {
    Ok(fisher_metric(pi, a, a, f, tol)?.value)
}

/// `H_g(ρ‖σ) = Tr{g(𝕃_σ ℝ_ρ⁻¹)[ρ]}`, evaluated spectrally.
pub fn contrast_eval<T: Scalar>(
    rho: &PsdMatrix<T>,
    sigma: &PsdMatrix<T>,
    g: ContrastGenerator,
    tol: &Tolerances<T>,
) -> Result<DivergenceValue<T>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    g.validate()?;
    rho.require_interior(tol)?;
    sigma.require_interior(tol)?;
    let (r, s) = (&rho.spectral().eigenvalues, &sigma.spectral().eigenvalues);
    let overlap = sigma.spectral().eigenvectors.adjoint() * &rho.spectral().eigenvectors;
    let d = r.len();
    // Split g into its tangent line at one plus a nonnegative excess. The
    // linear part sums to g'(1)·(Tr σ − Tr ρ); the excess terms never cancel,
    // which keeps nearby pairs accurate.
    let mut value = T::zero();
    for j in 0..d {
        let mut col = T::zero();
        for i in 0..d {
            col += overlap[(i, j)].norm_sqr() * g.eval_excess(s[i] / r[j])?;
        }
        value += col * r[j];
    }
    value += T::lit(g.taylor_at_one()[1]) * (sigma.trace() - rho.trace());
    Ok(DivergenceValue { value, g })
}

/// `|H_g(π + εA‖π + εB) − (ε²/2)·g''(1)·K_f(A − B, A − B)|` with `f` the
/// normalized partner of `g`.
///
/// The factor `g''(1)` undoes the `f(1) = 1` normalization; it equals one for
/// `−log`, `x log x` and the power family.
pub fn local_expansion_residual<T: Scalar>(
    pi: &PsdMatrix<T>,
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    g: ContrastGenerator,
    eps: T,
    tol: &Tolerances<T>,
) -> Result<T> {
    check_dims(pi, a)?;
    check_dims(pi, b)?;
    for t in [a, b] {
        crate::matcore::TangentVector::traceless(t.clone())?;
    }
    pi.require_interior(tol)?;
    let perturbed = |dir: &HermitianMatrix<T>| -> Result<PsdMatrix<T>> {
        let leave = || Error::PerturbationLeavesInterior { eps: eps.as_f64() };
        let m = PsdMatrix::new(pi.hermitian() + &dir.scale(eps), tol).map_err(|_| leave())?;
        if m.is_interior(tol) {
            Ok(m)
        } else {
            Err(leave())
        }
    };
    let rho = perturbed(a)?;
    let sigma = perturbed(b)?;
    let h = contrast_eval(&rho, &sigma, g, tol)?.value;
    let diff = a - b;
    let k = fisher_norm_sq(pi, &diff, MonotoneFunction::FromG(g), tol)?;
    let quad = eps * eps / T::lit(2.0) * T::lit(g.second_derivative_at_one()) * k;
    Ok((h - quad).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{left_mult_superop, random_density, random_tangent, right_mult_superop, vectorize};
    use crate::scalar::cplx;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn psd(h: HermitianMatrix<f64>) -> PsdMatrix<f64> {
        PsdMatrix::new(h, &tol()).unwrap()
    }

    fn sigma_x() -> HermitianMatrix<f64> {
        HermitianMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)],
        ))
        .unwrap()
    }

    fn frob(m: &CMatrix<f64>) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Forward Fisher operator built from the multiplication superoperators:
    /// `ℝ_π f(𝕃_π ℝ_π⁻¹)` via a Hermitian eigendecomposition of the d²×d²
    /// commuting product.
    fn superop_fisher_forward(pi: &PsdMatrix<f64>, a: &HermitianMatrix<f64>, f: MonotoneFunction) -> CMatrix<f64> {
        let l = left_mult_superop(pi.hermitian());
        let r = right_mult_superop(pi.hermitian());
        let r_inv = r.matrix().clone().try_inverse().unwrap();
        let ratio = HermitianMatrix::new(l.matrix() * &r_inv).unwrap();
        let spec = ratio.eig().unwrap();
        let f_ratio = spec.map_spectrum(|x| f.eval(x).unwrap());
        let j = r.matrix() * f_ratio;
        let d = pi.dim();
        CMatrix::from_column_slice(d, d, (j * vectorize(a.as_matrix())).as_slice())
    }

    #[test]
    fn inverse_of_basepoint_is_identity() {
        for f in MonotoneFunction::CATALOG {
            let pi = random_density::<f64>(3, 3, 4).unwrap();
            let x = fisher_inverse_apply(&pi, pi.hermitian(), f, &tol()).unwrap();
            assert!(frob(&(x.as_matrix() - CMatrix::identity(3, 3))) < 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_sld_scales_by_dimension() {
        let d = 3;
        let pi = psd(HermitianMatrix::identity(d).scale(1.0 / d as f64));
        let a = random_tangent::<f64>(d, 11, false);
        let x = fisher_inverse_apply(&pi, &a, MonotoneFunction::Sld, &tol()).unwrap();
        assert!(frob(&(x.as_matrix() - a.as_matrix() * creal(d as f64))) < 1e-12);
    }

    #[test]
    fn inverse_matches_superoperator_forward() {
        for f in MonotoneFunction::CATALOG {
            for seed in 0..5 {
                let pi = random_density::<f64>(3, 3, 100 + seed).unwrap();
                let a = random_tangent::<f64>(3, 200 + seed, false);
                let x = fisher_inverse_apply(&pi, &a, f, &tol()).unwrap();
                let back = superop_fisher_forward(&pi, &x, f);
                assert!(frob(&(back - a.as_matrix())) < 1e-10, "{f}");
                let fwd = fisher_apply(&pi, &x, f).unwrap();
                assert!(frob(&(fwd.as_matrix() - a.as_matrix())) < 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_sector_is_classical() {
        let pi = psd(HermitianMatrix::from_real_diagonal(&[0.5, 0.5]));
        let a = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        for f in MonotoneFunction::CATALOG {
            let k = fisher_metric(&pi, &a, &a, f, &tol()).unwrap();
            assert!((k.value - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sld_sigma_x_closed_form() {
        // Σ 2|Aᵢⱼ|²/(πᵢ + πⱼ) = 4 for σ_x at any diagonal qubit basepoint.
        for &p in &[0.01, 0.2, 0.5, 0.77, 0.999] {
            let pi = psd(HermitianMatrix::from_real_diagonal(&[p, 1.0 - p]));
            let k = fisher_norm_sq(&pi, &sigma_x(), MonotoneFunction::Sld, &tol()).unwrap();
            assert!((k - 4.0).abs() < 1e-10, "p={p}: {k}");
        }
    }

    #[test]
    fn metric_of_basepoint_is_trace() {
        for d in 2..=3 {
            for f in MonotoneFunction::CATALOG {
                let pi = random_density::<f64>(d, d, 7).unwrap();
                let scaled = psd(pi.hermitian().scale(2.5));
                let k = fisher_norm_sq(&scaled, scaled.hermitian(), f, &tol()).unwrap();
                assert!((k - 2.5).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn boundary_basepoint_rejected() {
        let pi = psd(HermitianMatrix::from_real_diagonal(&[1.0, 0.0]));
        let err = fisher_metric(&pi, &sigma_x(), &sigma_x(), MonotoneFunction::Sld, &tol()).unwrap_err();
        assert!(matches!(err, Error::SingularBasepoint { .. }));
        let rho = psd(HermitianMatrix::from_real_diagonal(&[0.5, 0.5]));
        assert!(contrast_eval(&pi, &rho, ContrastGenerator::NegLog, &tol()).is_err());
    }

    #[test]
    fn contrast_zero_on_diagonal() {
        let rho = random_density::<f64>(3, 3, 1).unwrap();
        for g in ContrastGenerator::CATALOG {
            let v = contrast_eval(&rho, &rho, g, &tol()).unwrap().value;
            assert!(v.abs() < 1e-13, "{g}: {v}");
        }
    }

    #[test]
    fn commuting_relative_entropy() {
        let p = [0.2, 0.5, 0.3];
        let q = [0.4, 0.4, 0.2];
        let rho = psd(HermitianMatrix::from_real_diagonal(&p));
        let sigma = psd(HermitianMatrix::from_real_diagonal(&q));
        let v = contrast_eval(&rho, &sigma, ContrastGenerator::NegLog, &tol()).unwrap().value;
        let direct: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
        assert!((v - direct).abs() < 1e-14);
        assert!((v - relative_entropy(&p, &q).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_matrix_log_oracle() {
        for seed in 0..10 {
            let rho = random_density::<f64>(3, 3, 40 + seed).unwrap();
            let sigma = random_density::<f64>(3, 3, 80 + seed).unwrap();
            let log_rho = rho.spectral().map_spectrum(|x| x.ln());
            let log_sigma = sigma.spectral().map_spectrum(|x| x.ln());
            let direct = (rho.as_matrix() * (log_rho - log_sigma)).trace().re;
            let v = contrast_eval(&rho, &sigma, ContrastGenerator::NegLog, &tol()).unwrap().value;
            assert!((v - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn contrast_matches_superoperator_definition() {
        for g in ContrastGenerator::CATALOG {
            let rho = random_density::<f64>(3, 3, 5).unwrap();
            let sigma = random_density::<f64>(3, 3, 6).unwrap();
            let l = left_mult_superop(sigma.hermitian());
            let r_inv = right_mult_superop(rho.hermitian()).matrix().clone().try_inverse().unwrap();
            let op = HermitianMatrix::new(l.matrix() * r_inv).unwrap();
            let gop = op.eig().unwrap().map_spectrum(|x| g.eval(x).unwrap());
            let out = gop * vectorize(rho.as_matrix());
            let direct: f64 = (0..3).map(|i| out[i * 3 + i].re).sum();
            let v = contrast_eval(&rho, &sigma, g, &tol()).unwrap().value;
            assert!((v - direct).abs() < 1e-10, "{g}: {v} vs {direct}");
        }
    }

    #[test]
    fn local_expansion_trivial_and_classical() {
        let pi = psd(HermitianMatrix::from_real_diagonal(&[0.6, 0.4]));
        let a = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        let r = local_expansion_residual(&pi, &a, &a, ContrastGenerator::NegLog, 1e-2, &tol()).unwrap();
        assert!(r.abs() < 1e-15);

        // B = 0, A diagonal: H ≈ (ε²/2) Σ aᵢ²/pᵢ up to O(ε³).
        let zero = HermitianMatrix::zeros(2);
        for &eps in &[1e-2, 1e-3] {
            let res = local_expansion_residual(&pi, &a, &zero, ContrastGenerator::NegLog, eps, &tol()).unwrap();
            let quad = eps * eps / 2.0 * classical_fisher(&[0.6, 0.4], &[1.0, -1.0]).unwrap();
            assert!(res < 10.0 * eps * quad, "eps={eps} residual {res}");
        }
    }

    #[test]
    fn local_expansion_guards() {
        let pi = psd(HermitianMatrix::from_real_diagonal(&[0.6, 0.4]));
        let a = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        let zero = HermitianMatrix::zeros(2);
        assert!(matches!(
            local_expansion_residual(&pi, &a, &zero, ContrastGenerator::NegLog, 0.5, &tol()),
            Err(Error::PerturbationLeavesInterior { .. })
        ));
        let not_traceless = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            local_expansion_residual(&pi, &not_traceless, &zero, ContrastGenerator::NegLog, 0.01, &tol()),
            Err(Error::NotTraceless { .. })
        ));
    }

    #[test]
    fn classical_fisher_agrees_with_diagonal_embedding() {
        let p = [0.1, 0.3, 0.6];
        let dq = [0.05, -0.2, 0.15];
        let pi = psd(HermitianMatrix::from_real_diagonal(&p));
        let a = HermitianMatrix::from_real_diagonal(&dq);
        for f in MonotoneFunction::CATALOG {
            let k = fisher_norm_sq(&pi, &a, f, &tol()).unwrap();
            assert!((k - classical_fisher(&p, &dq).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn f32_metric_identity() {
        let tol32 = Tolerances::<f32>::default();
        let pi = random_density::<f32>(2, 2, 3).unwrap();
        let k = fisher_norm_sq(&pi, pi.hermitian(), MonotoneFunction::Kmb, &tol32).unwrap();
        assert!((k - 1.0).abs() < 1e-4);
    }
}
