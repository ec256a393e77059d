use std::f64::consts::PI;

use nonlocal_eigen::verify::q1_lambda_of_alpha;
use nonlocal_eigen::{
    analyze, minimize, saturation_reference, GridFunction, Interval, ProblemParams, SignClass,
    SolverOptions,
};

const PI2: f64 = PI * PI;

fn lambda(alpha: f64, q: f64) -> f64 {
    minimize(
        &ProblemParams::new(alpha, q).unwrap(),
        &SolverOptions::default(),
    )
    .unwrap()
    .lambda
}

#[test]
fn eigenvalue_diverges_for_negative_coupling() {
    for q in [1.0, 1.5, 2.0] {
        let (far, near) = (lambda(-50.0, q), lambda(-10.0, q));
        assert!(far < near && near < 0.0, "q = {q}: {far}, {near}");
    }
}

#[test]
fn eigenvalue_never_exceeds_the_sine_quotient() {
    let opts = SolverOptions::default();
    for q in [1.0, 1.5, 2.0] {
        let cap = saturation_reference(opts.n, q).unwrap();
        for alpha in [-2.0, 0.0, 3.0, 9.0, 15.0] {
            let l = lambda(alpha, q);
            assert!(l <= cap + 1e-9, "α = {alpha}, q = {q}: {l} > {cap}");
        }
    }
}

#[test]
fn minimizers_have_one_of_two_shapes() {
    for q in [1.0, 1.25, 1.5, 2.0] {
        for alpha in [-2.0, 1.0, 4.0, 8.0, 12.0] {
            let r = minimize(
                &ProblemParams::new(alpha, q).unwrap(),
                &SolverOptions::default(),
            )
            .unwrap();
            let p = analyze(&r.minimizer).unwrap();
            if p.sign_class == SignClass::SignChanging {
                assert_eq!(p.zeros.len(), 1, "α = {alpha}, q = {q}");
                assert!(p.positive_part_symmetry_defect < 1e-3);
                assert!(p.negative_part_symmetry_defect < 1e-3);
            } else {
                assert!(p.zeros.is_empty());
            }
        }
    }
}

#[test]
fn saturated_minimizer_is_the_sine() {
    let opts = SolverOptions::default();
    let sine = GridFunction::sample(Interval::REFERENCE, opts.n, |x| (PI * x).sin())
        .unwrap()
        .normalized()
        .unwrap();
    for (alpha, q) in [(10.0, 1.5), (12.0, 1.75), (10.0, 2.0)] {
        let r = minimize(&ProblemParams::new(alpha, q).unwrap(), &opts).unwrap();
        assert!(r.q_average.abs() < 1e-6);
        let d = r
            .minimizer
            .l2_distance(&sine)
            .unwrap()
            .min(r.minimizer.scaled(-1.0).l2_distance(&sine).unwrap());
        assert!(d < 1e-3, "α = {alpha}, q = {q}: {d}");
    }
}

#[test]
fn q1_solver_matches_explicit_branch() {
    for alpha in [1.0, 2.5, 4.0] {
        let oracle = q1_lambda_of_alpha(alpha).unwrap();
        let l = lambda(alpha, 1.0);
        assert!(
            ((l - oracle) / oracle).abs() < 1e-3,
            "α = {alpha}: {l} vs {oracle}"
        );
    }
}

#[test]
fn results_are_reproducible() {
    let params = ProblemParams::new(3.0, 1.5).unwrap();
    let opts = SolverOptions::default();
    let a = minimize(&params, &opts).unwrap();
    let b = minimize(&params, &opts).unwrap();
    assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
    assert_eq!(a.minimizer, b.minimizer);
}

#[test]
fn uncoupled_eigenvalue_is_a_quarter_pi_squared() {
    for q in [1.0, 1.5, 2.0] {
        let l = lambda(0.0, q);
        assert!(((l - 0.25 * PI2) / (0.25 * PI2)).abs() < 1e-4);
    }
}
