use approx::assert_relative_eq;
use nonlocal_eigen::{q_average, rayleigh_quotient, GridFunction, Interval, ProblemParams};
use proptest::prelude::*;

fn grid_function() -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(-1.0f64..1.0, 5..60)
        .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| GridFunction::new(Interval::REFERENCE, v).unwrap())
}

proptest! {
    #[test]
    fn quotient_is_scale_invariant(
        u in grid_function(),
        alpha in -5.0f64..20.0,
        q in 1.0f64..=2.0,
    ) {
        let params = ProblemParams::new(alpha, q).unwrap();
        let base = rayleigh_quotient(&u, &params).unwrap();
        for c in [-3.0, 0.1, 7.0] {
            let scaled = rayleigh_quotient(&u.scaled(c), &params).unwrap();
            prop_assert!((scaled - base).abs() <= 1e-12 * base.abs().max(1.0));
        }
    }

    #[test]
    fn q_average_is_odd(u in grid_function(), q in 1.0f64..=2.0) {
        let plus = q_average(&u, q).unwrap();
        let minus = q_average(&u.scaled(-1.0), q).unwrap();
        prop_assert_eq!(minus, -plus);
    }

    #[test]
    fn uncoupled_quotient_ignores_the_exponent(u in grid_function()) {
        let values: Vec<f64> = [1.0, 1.5, 2.0]
            .iter()
            .map(|&q| rayleigh_quotient(&u, &ProblemParams::new(0.0, q).unwrap()).unwrap())
            .collect();
        for v in &values[1..] {
            prop_assert!((v - values[0]).abs() <= 1e-15 * values[0]);
        }
    }
}

#[test]
fn rescaled_interval_scales_energy_and_mass() {
    let wide = Interval::new(-2.0, 2.0).unwrap();
    let n = 999;
    let reference = GridFunction::sample(Interval::REFERENCE, n, |x| 1.0 - x * x).unwrap();
    let stretched = GridFunction::sample(wide, n, |x| 1.0 - 0.25 * x * x).unwrap();
    assert_relative_eq!(
        stretched.mass(),
        2.0 * reference.mass(),
        max_relative = 1e-12
    );
    assert_relative_eq!(
        stretched.dirichlet_energy(),
        0.5 * reference.dirichlet_energy(),
        max_relative = 1e-12
    );
}
