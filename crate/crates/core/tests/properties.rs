use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;

use qfisher::certifier::{contraction_ratio, sample_contraction_test, witness_search, CertConfig};
use qfisher::geometry::{classical_fisher, contrast_eval, fisher_metric, fisher_norm_sq, relative_entropy};
use qfisher::io::{map_to_json, parse_map};
use qfisher::maps::{
    catalog, oracle_verdict, random_stochastic, stochastic_apply, KrausTerm, LinearMap, MapItem,
};
use qfisher::matcore::{
    eig_hermitian, left_mult_superop, random_density, random_tangent, random_unitary, right_mult_superop, vectorize,
    devectorize, HermitianMatrix, PsdMatrix,
};
use qfisher::{CMatrix, ContrastGenerator, MonotoneFunction, Tolerances};

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn f_strategy() -> impl Strategy<Value = MonotoneFunction> {
    prop::sample::select(MonotoneFunction::CATALOG.to_vec())
}

fn g_strategy() -> impl Strategy<Value = ContrastGenerator> {
    prop_oneof![
        Just(ContrastGenerator::NegLog),
        Just(ContrastGenerator::XLogX),
        Just(ContrastGenerator::Quadratic),
        (-0.9f64..1.9).prop_filter("alpha away from 0 and 1", |a| (a.abs() > 0.05) && ((a - 1.0).abs() > 0.05))
            .prop_map(ContrastGenerator::PowerAlpha),
    ]
}

fn complex_matrix(d: usize) -> impl Strategy<Value = CMatrix<f64>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), d * d)
        .prop_map(move |v| DMatrix::from_iterator(d, d, v.into_iter().map(|(re, im)| Complex::new(re, im))))
}

fn state(d: usize, seed: u64) -> PsdMatrix<f64> {
    random_density::<f64>(d, d, seed).unwrap().into_psd()
}

fn tangent(d: usize, seed: u64) -> HermitianMatrix<f64> {
    random_tangent::<f64>(d, seed, false).matrix().clone()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn frob(m: &CMatrix<f64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(m in (2usize..=4).prop_flat_map(complex_matrix)) {
        let h = HermitianMatrix::new(m).unwrap();
        let s = eig_hermitian(&h).unwrap();
        let err = frob(&(s.reconstruct() - h.as_matrix())) / frob(h.as_matrix()).max(1e-300);
        prop_assert!(err < 1e-10);
        let v = &s.eigenvectors;
        let d = h.dim();
        prop_assert!(frob(&(v.adjoint() * v - CMatrix::<f64>::identity(d, d))) < 1e-10);
    }

    #[test]
    fn superoperators_are_faithful(d in 2usize..=4, seed in any::<u64>(), a in (2usize..=4).prop_flat_map(complex_matrix)) {
        let a = a.resize(d, d, Complex::new(0.5, 0.0));
        let rho = random_density::<f64>(d, d, seed).unwrap().into_psd().into_hermitian();
        let left = devectorize(&(left_mult_superop(&rho).matrix() * vectorize(&a))).unwrap();
        let right = devectorize(&(right_mult_superop(&rho).matrix() * vectorize(&a))).unwrap();
        prop_assert!(frob(&(left - rho.as_matrix() * &a)) < 1e-12);
        prop_assert!(frob(&(right - &a * rho.as_matrix())) < 1e-12);
    }

    #[test]
    fn samplers_are_deterministic(d in 2usize..=4, seed in any::<u64>()) {
        prop_assert_eq!(random_density::<f64>(d, d, seed).unwrap(), random_density::<f64>(d, d, seed).unwrap());
        prop_assert_eq!(random_tangent::<f64>(d, seed, true), random_tangent::<f64>(d, seed, true));
        prop_assert_eq!(random_unitary::<f64>(d, seed), random_unitary::<f64>(d, seed));
    }

    #[test]
    fn f_is_normalized_symmetric_and_increasing(f in f_strategy(), x in 1e-4f64..1e4, y in 1e-4f64..1e4) {
        prop_assert!((f.eval(1.0f64).unwrap() - 1.0).abs() < 1e-14);
        let fx = f.eval(x).unwrap();
        prop_assert!(rel(fx, x * f.eval(1.0 / x).unwrap()) < 1e-12);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assert!(f.eval(lo).unwrap() <= f.eval(hi).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn g_is_midpoint_convex(g in g_strategy(), x in 1e-3f64..1e3, y in 1e-3f64..1e3) {
        let mid = g.eval(0.5 * (x + y)).unwrap();
        let avg = 0.5 * (g.eval(x).unwrap() + g.eval(y).unwrap());
        prop_assert!(mid <= avg + 1e-12 * avg.abs().max(1.0));
        prop_assert!(g.eval(1.0f64).unwrap().abs() < 1e-15);
    }

    #[test]
    fn metric_is_symmetric_and_bilinear(
        f in f_strategy(), d in 2usize..=3, seed in any::<u64>(), alpha in -2.0f64..2.0, beta in -2.0f64..2.0,
    ) {
        let pi = state(d, seed);
        let (a, b, c) = (tangent(d, seed ^ 1), tangent(d, seed ^ 2), tangent(d, seed ^ 3));
        let ab = fisher_metric(&pi, &a, &b, f, &tol()).unwrap().value;
        let ba = fisher_metric(&pi, &b, &a, f, &tol()).unwrap().value;
        prop_assert!(rel(ab, ba) < 1e-10);
        let combo = &a.scale(alpha) + &c.scale(beta);
        let lhs = fisher_metric(&pi, &combo, &b, f, &tol()).unwrap().value;
        let cb = fisher_metric(&pi, &c, &b, f, &tol()).unwrap().value;
        prop_assert!((lhs - (alpha * ab + beta * cb)).abs() < 1e-10 * (1.0 + ab.abs() + cb.abs()) * 10.0);
        prop_assert!(fisher_norm_sq(&pi, &a, f, &tol()).unwrap() >= 0.0);
    }

    #[test]
    fn metric_basepoint_homogeneity(f in f_strategy(), d in 2usize..=3, seed in any::<u64>(), c in 0.05f64..20.0) {
        let pi = state(d, seed);
        let a = tangent(d, seed.wrapping_add(1));
        let scaled = PsdMatrix::new(pi.hermitian().scale(c), &tol()).unwrap();
        let lhs = fisher_norm_sq(&scaled, &a.scale(c), f, &tol()).unwrap();
        let rhs = c * fisher_norm_sq(&pi, &a, f, &tol()).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn contrast_positive_and_faithful(g in g_strategy(), d in 2usize..=3, seed in any::<u64>()) {
        let (rho, sigma) = (state(d, seed), state(d, seed.wrapping_add(7)));
        prop_assert!(contrast_eval(&rho, &sigma, g, &tol()).unwrap().value >= 0.0);
        prop_assert!(contrast_eval(&rho, &rho, g, &tol()).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn contrast_jointly_convex(g in g_strategy(), d in 2usize..=3, seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let s = |k: u64| state(d, seed.wrapping_add(k));
        let (r1, r2, s1, s2) = (s(0), s(1), s(2), s(3));
        let mix = |a: &PsdMatrix<f64>, b: &PsdMatrix<f64>| {
            PsdMatrix::new(&a.hermitian().scale(lambda) + &b.hermitian().scale(1.0 - lambda), &tol()).unwrap()
        };
        let h = |a: &PsdMatrix<f64>, b: &PsdMatrix<f64>| contrast_eval(a, b, g, &tol()).unwrap().value;
        let lhs = h(&mix(&r1, &r2), &mix(&s1, &s2));
        let rhs = lambda * h(&r1, &s1) + (1.0 - lambda) * h(&r2, &s2);
        prop_assert!(lhs <= rhs + 1e-10 * rhs.abs().max(1.0));
    }

    #[test]
    fn diagonal_inputs_are_classical(
        f in f_strategy(),
        p in prop::collection::vec(0.05f64..1.0, 3),
        q in prop::collection::vec(0.05f64..1.0, 3),
        v in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let norm = |x: &[f64]| { let s: f64 = x.iter().sum(); x.iter().map(|y| y / s).collect::<Vec<_>>() };
        let (p, q) = (norm(&p), norm(&q));
        let rho = PsdMatrix::new(HermitianMatrix::from_real_diagonal(&p), &tol()).unwrap();
        let sigma = PsdMatrix::new(HermitianMatrix::from_real_diagonal(&q), &tol()).unwrap();
        let a = HermitianMatrix::from_real_diagonal(&v);
        let k = fisher_norm_sq(&rho, &a, f, &tol()).unwrap();
        prop_assert!(rel(k, classical_fisher(&p, &v).unwrap()) < 1e-10);
        let h = contrast_eval(&rho, &sigma, ContrastGenerator::NegLog, &tol()).unwrap().value;
        prop_assert!((h - relative_entropy(&p, &q).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn kraus_and_transfer_agree(d in 2usize..=3, ops in prop::collection::vec((2usize..=3).prop_flat_map(complex_matrix), 1..4),
                                w in prop::collection::vec(-1.5f64..1.5, 4), x in (2usize..=3).prop_flat_map(complex_matrix)) {
        let terms: Vec<KrausTerm<f64>> = ops
            .into_iter()
            .zip(w)
            .map(|(op, weight)| KrausTerm { weight, op: op.resize(d, d, Complex::new(0.0, 0.0)) })
            .collect();
        let map = LinearMap::from_weighted_kraus(terms).unwrap();
        let x = x.resize(d, d, Complex::new(1.0, -0.5));
        let scale = 1.0 + frob(&map.apply(&x).unwrap());
        prop_assert!(frob(&(map.apply(&x).unwrap() - map.apply_transfer(&x).unwrap())) < 1e-11 * scale);
        let back = LinearMap::from_choi(map.choi()).unwrap();
        prop_assert!(frob(&(back.transfer() - map.transfer())) < 1e-10 * (1.0 + frob(map.transfer())));
        prop_assert!(map.is_hermitian_preserving());
        let kraus = LinearMap::from_weighted_kraus(map.to_kraus().unwrap()).unwrap();
        prop_assert!(frob(&(kraus.transfer() - map.transfer())) < 1e-10 * (1.0 + frob(map.transfer())));
    }

    #[test]
    fn map_json_round_trip(d in 2usize..=3, k in 1usize..=3, seed in any::<u64>(), which in 0usize..3) {
        let base = catalog::random_cptp::<f64>(d, k, seed).unwrap();
        let map = match which {
            0 => base,
            1 => LinearMap::from_transfer(base.transfer().clone()).unwrap(),
            _ => LinearMap::from_choi(base.choi()).unwrap(),
        };
        let text = map_to_json(&map).to_string();
        let back = match parse_map::<f64>(&serde_json::from_str(&text).unwrap()).unwrap() {
            MapItem::Quantum(m) => m,
            MapItem::Classical(_) => unreachable!(),
        };
        prop_assert!(frob(&(back.transfer() - map.transfer())) < 1e-12);
    }

    #[test]
    fn stochastic_maps_preserve_the_simplex(n in 2usize..=5, seed in any::<u64>(), p in prop::collection::vec(0.0f64..1.0, 5)) {
        let t = random_stochastic::<f64>(n, seed).unwrap();
        let p: Vec<f64> = p[..n].to_vec();
        let s: f64 = p.iter().sum::<f64>().max(1e-9);
        let p = DVector::from_iterator(n, p.iter().map(|x| x / s));
        let out = stochastic_apply(&t, &p).unwrap();
        prop_assert!(out.iter().all(|&x| x >= 0.0));
        prop_assert!((out.sum() - p.sum()).abs() < 1e-12);
    }

    #[test]
    fn ratio_scales_with_the_map(f in f_strategy(), d in 2usize..=3, seed in any::<u64>(), c in 0.1f64..10.0) {
        let map = catalog::random_cptp::<f64>(d, 2, seed).unwrap();
        let rho = state(d, seed.wrapping_add(1));
        let drho = random_tangent::<f64>(d, seed.wrapping_add(2), true);
        let r = contraction_ratio(&map, f, &rho, drho.matrix(), &tol()).unwrap().ratio;
        let rc = contraction_ratio(&map.scaled(c), f, &rho, drho.matrix(), &tol()).unwrap().ratio;
        prop_assert!(rel(rc, c * r) < 1e-10);
        prop_assert!(r <= 1.0 + 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cp_implies_positive(d in 2usize..=3, p in -1.5f64..1.5, seed in any::<u64>()) {
        let map = catalog::depolarizing::<f64>(d, p).unwrap();
        let v = oracle_verdict(&map, 500, 10, seed, &tol()).unwrap();
        prop_assert!(!v.is_cp || v.is_positive);
        let lifted = oracle_verdict(&map.tensor_identity(d).unwrap(), 200, 5, seed, &tol()).unwrap();
        prop_assert_eq!(v.is_cp, lifted.is_cp);
    }

    #[test]
    fn threshold_rescaling_preserves_verdict(p in -1.6f64..1.6, c in 1.0f64..4.0) {
        let map = catalog::depolarizing::<f64>(2, p).unwrap();
        let cfg = CertConfig::<f64> { n_samples: 150, ..CertConfig::default() };
        let scaled_cfg = CertConfig { ratio_tol: c * (1.0 + cfg.ratio_tol) - 1.0, ..cfg.clone() };
        let a = sample_contraction_test(&map, &cfg).unwrap();
        let b = sample_contraction_test(&map.scaled(c), &scaled_cfg).unwrap();
        prop_assert_eq!(a.witness().is_some(), b.witness().is_some());
    }

    #[test]
    fn witnesses_replay(p in prop_oneof![-2.0f64..-1.05, 1.05f64..2.0], f in f_strategy()) {
        let map = catalog::depolarizing::<f64>(2, p).unwrap();
        let cfg = CertConfig::<f64> { f, oracle_grid: 1000, oracle_refine: 10, ..CertConfig::default() };
        let s = witness_search(&map, &cfg).unwrap();
        prop_assert!(!s.witnesses.is_empty());
        for w in &s.witnesses {
            prop_assert!(w.replays(&map, &cfg.tol, cfg.ratio_tol).unwrap());
        }
    }

    #[test]
    fn eta_schedule_strictly_decreases(eta0 in 1e-3f64..0.99, levels in 1usize..=21) {
        let cfg = CertConfig::<f64> { eta0, eta_levels: levels, ..CertConfig::default() };
        let s = cfg.eta_schedule();
        prop_assert_eq!(s.len(), levels);
        prop_assert!(s.windows(2).all(|w| w[1] < w[0]));
    }
}
