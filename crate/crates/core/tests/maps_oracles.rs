use qfisher::maps::{catalog, cp_oracle, oracle_verdict, positivity_oracle, LinearMap};
use qfisher::matcore::{ginibre, seeded_rng, HermitianMatrix};
use qfisher::{CMatrix, Tolerances};

fn frob(m: &CMatrix<f64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn battery() -> Vec<(&'static str, LinearMap<f64>)> {
    let id2 = catalog::identity::<f64>(2).unwrap();
    let tr2 = catalog::transpose::<f64>(2).unwrap();
    let mix = catalog::mixture(&[(0.3, &id2), (0.7, &tr2)]).unwrap();
    vec![
        ("identity", id2.clone()),
        ("unitary", catalog::random_unitary_channel(3, 2).unwrap()),
        ("transpose", tr2.clone()),
        ("transpose3", catalog::transpose(3).unwrap()),
        ("depolarizing(0.5)", catalog::depolarizing(2, 0.5).unwrap()),
        ("depolarizing(-0.7)", catalog::depolarizing(2, -0.7).unwrap()),
        ("depolarizing(1.5)", catalog::depolarizing(2, 1.5).unwrap()),
        ("depolarizing(-1.5)", catalog::depolarizing(2, -1.5).unwrap()),
        ("dephasing(0.4)", catalog::dephasing(3, 0.4).unwrap()),
        ("amplitude_damping(0.3)", catalog::amplitude_damping(0.3).unwrap()),
        ("damping_filter(0.3)", catalog::damping_filter(0.3).unwrap()),
        ("scalar(0.8)", catalog::scalar(2, 0.8).unwrap()),
        ("scalar(1.2)", catalog::scalar(3, 1.2).unwrap()),
        ("random_cptp", catalog::random_cptp(3, 3, 9).unwrap()),
        ("mixture", mix),
    ]
}

#[test]
fn kraus_and_transfer_application_agree() {
    let mut rng = seeded_rng(77);
    for (name, map) in battery() {
        let kraus = LinearMap::from_weighted_kraus(map.to_kraus().unwrap()).unwrap();
        let d = map.dim();
        for _ in 0..100 {
            let x = ginibre::<f64, _>(d, d, &mut rng);
            let a = kraus.apply(&x).unwrap();
            let b = map.apply_transfer(&x).unwrap();
            assert!(frob(&(a - b)) < 1e-11, "{name}");
        }
    }
}

#[test]
fn closed_form_oracle_values() {
    let tol = Tolerances::<f64>::default();
    let tr = catalog::transpose::<f64>(2).unwrap();
    let (cp, min) = cp_oracle(&tr, &tol).unwrap();
    assert!(!cp && (min + 1.0).abs() < 1e-12);
    let est = positivity_oracle(&tr, 2000, 20, 1).unwrap();
    assert!(est.min_output_eigenvalue.abs() < 1e-10);

    let (cp, min) = cp_oracle(&catalog::depolarizing::<f64>(2, -0.7).unwrap(), &tol).unwrap();
    assert!(!cp && (min - (1.0 - 3.0 * 0.7) / 2.0).abs() < 1e-12);
    let est = positivity_oracle(&catalog::depolarizing::<f64>(2, -0.7).unwrap(), 2000, 20, 1).unwrap();
    assert!((est.min_output_eigenvalue - 0.15).abs() < 1e-10);
    let est = positivity_oracle(&catalog::depolarizing::<f64>(2, 1.5).unwrap(), 2000, 20, 1).unwrap();
    assert!((est.min_output_eigenvalue + 0.25).abs() < 1e-10);

    let (cp, _) = cp_oracle(&catalog::amplitude_damping::<f64>(0.3).unwrap(), &tol).unwrap();
    assert!(cp);
}

#[test]
fn verdicts_match_known_classes() {
    let tol = Tolerances::<f64>::default();
    let expect = |name: &str| -> (bool, bool) {
        match name {
            "transpose" | "transpose3" | "depolarizing(-0.7)" | "mixture" => (false, true),
            "depolarizing(1.5)" | "depolarizing(-1.5)" => (false, false),
            _ => (true, true),
        }
    };
    for (name, map) in battery() {
        let v = oracle_verdict(&map, 10_000, 50, 3, &tol).unwrap();
        assert!(v.is_hp);
        assert!(!v.is_cp || v.is_positive, "{name}");
        assert_eq!((v.is_cp, v.is_positive), expect(name), "{name}: {:?}", v.min_output_eigenvalue);
    }
}

#[test]
fn lift_preserves_complete_positivity() {
    let tol = Tolerances::<f64>::default();
    for (name, map) in battery() {
        if map.dim() > 2 {
            continue;
        }
        let (cp, _) = cp_oracle(&map, &tol).unwrap();
        let (lifted_cp, _) = cp_oracle(&map.tensor_identity(2).unwrap(), &tol).unwrap();
        assert_eq!(cp, lifted_cp, "{name}");
    }
}

#[test]
fn transpose_is_positive_but_lift_is_not() {
    let tr = catalog::transpose::<f64>(2).unwrap();
    let lifted = tr.tensor_identity(2).unwrap();
    let est = positivity_oracle(&lifted, 4000, 50, 5).unwrap();
    // Partial transpose of a maximally entangled qubit pair has eigenvalue −1/2.
    assert!((est.min_output_eigenvalue + 0.5).abs() < 1e-8, "{}", est.min_output_eigenvalue);
    let out = lifted.apply_hermitian(&HermitianMatrix::projector(&est.worst_state)).unwrap();
    assert!(out.min_eigenvalue().unwrap() < -0.49);
}

#[test]
fn oracle_is_deterministic_per_seed() {
    let map = catalog::depolarizing::<f64>(3, -0.4).unwrap();
    let a = positivity_oracle(&map, 500, 10, 42).unwrap();
    let b = positivity_oracle(&map, 500, 10, 42).unwrap();
    assert_eq!(a.min_output_eigenvalue, b.min_output_eigenvalue);
    assert_eq!(a.worst_state, b.worst_state);
}

#[test]
fn hermitian_preserving_closure_and_violation() {
    let a = catalog::random_cptp::<f64>(2, 2, 1).unwrap();
    let b = catalog::amplitude_damping::<f64>(0.6).unwrap();
    let c = catalog::mixture(&[(1.7, &a), (-2.3, &b)]).unwrap();
    assert!(c.is_hermitian_preserving());
    let mut t = a.transfer().clone();
    t[(0, 3)].im += 1e-3;
    let bad = LinearMap::from_transfer(t).unwrap();
    assert!(!bad.is_hermitian_preserving());
    let v = oracle_verdict(&bad, 100, 5, 0, &Tolerances::default()).unwrap();
    assert!(!v.is_hp && !v.is_cp && !v.is_positive);
}
