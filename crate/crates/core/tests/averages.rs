use fraclap::averages::{local_decay_check, nonlocal_average};
use fraclap::kernels::riesz_potential;
use fraclap::lemmas::{build_counterexample, Bump};
use fraclap::radial::{log_grid, DEFAULT_GRID};
use fraclap::{InnerPolicy, ProblemParams, QuadratureSpec, RadialFunction, TailPolicy};
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn profile(f: impl Fn(f64) -> f64, sigma: f64) -> RadialFunction {
    RadialFunction::from_fn(&DEFAULT_GRID.radii(), f, TailPolicy::Matched { sigma }, InnerPolicy::Even).unwrap()
}

fn critical() -> ProblemParams {
    ProblemParams {
        p: 2.0,
        q: 2.0,
        ..ProblemParams::default()
    }
}

#[test]
fn averages_of_potentials_do_not_increase() {
    for (seed, alpha) in [(1, 0.5), (2, 1.0), (3, 1.5)] {
        let u = riesz_potential(&Bump::random(seed).to_radial().unwrap(), alpha, 3, &spec()).unwrap();
        let radii = log_grid(0.05, 20.0, 20);
        let a: Vec<f64> = radii.iter().map(|&r| nonlocal_average(&u, alpha, r, &spec()).unwrap()).collect();
        for w in a.windows(2) {
            assert!(w[1] <= w[0] + 1e-6 * a[0], "alpha {alpha}: {w:?}");
        }
    }
}

#[test]
fn zero_pair_has_zero_products() {
    let zero = profile(|_| 0.0, 2.0);
    let rep = local_decay_check(&zero, &zero, &critical(), &[1.0, 10.0, 100.0], &spec()).unwrap();
    assert!(rep.u_products.iter().chain(&rep.v_average_products).all(|&x| x == 0.0));
}

#[test]
fn bubble_pair_products_are_bounded() {
    let u = profile(|r| 2.0 / (1.0 + r * r), 2.0);
    let radii = log_grid(1.0, 100.0, 12);
    let rep = local_decay_check(&u, &u, &critical(), &radii, &spec()).unwrap();
    for (r, p) in radii.iter().zip(&rep.u_products) {
        assert!((p - 2.0 * r / (1.0 + r * r)).abs() < 1e-6 * p);
        assert!(*p <= 1.0 + 1e-6);
    }
    assert!(rep.bounded, "{rep:?}");
}

#[test]
fn slow_decay_is_flagged() {
    // σ_u = 1 at the critical pair, so r^{-1/2} gives products growing like R^{1/2}
    let u = profile(|r| r.powf(-0.5), 0.5);
    let radii = log_grid(1.0, 100.0, 12);
    let rep = local_decay_check(&u, &u, &critical(), &radii, &spec()).unwrap();
    assert!(!rep.bounded);
    assert!((rep.slope_u - 0.5).abs() < 0.05, "{}", rep.slope_u);
}

#[test]
fn counterexample_across_orders() {
    let f = Bump::standard().to_radial().unwrap();
    for alpha in [0.5, 1.0, 1.5, 1.9] {
        let rep = build_counterexample(alpha, 3, &f, &spec()).unwrap();
        assert!(rep.min_forward_difference > 0.0, "alpha {alpha}: {}", rep.min_forward_difference);
        assert!(rep.flap_min_relative >= -1e-3, "alpha {alpha}: {}", rep.flap_min_relative);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn average_is_linear_and_monotone(c1 in 0.0f64..3.0, c2 in 0.0f64..3.0, alpha in 0.2f64..1.8, big_r in 0.1f64..20.0) {
        let u = profile(|r| 1.0 / (1.0 + r * r), 2.0);
        let w = profile(|r| (1.0 + r).powf(-3.0), 3.0);
        let comb = profile(|r| c1 / (1.0 + r * r) + c2 * (1.0 + r).powf(-3.0), 2.0);
        let (au, aw, ac) = (
            nonlocal_average(&u, alpha, big_r, &spec()).unwrap(),
            nonlocal_average(&w, alpha, big_r, &spec()).unwrap(),
            nonlocal_average(&comb, alpha, big_r, &spec()).unwrap(),
        );
        prop_assert!((ac - c1 * au - c2 * aw).abs() <= 1e-6 * ac.abs().max(1e-300));
        // u ≥ w pointwise for r ≥ 0
        prop_assert!(au >= aw);
    }
}
