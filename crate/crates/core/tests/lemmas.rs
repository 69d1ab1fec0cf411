use fraclap::lemmas::{
    build_counterexample, representation_identity, riesz_derivative, sign_lemma_sweep, Bump, Sign,
};
use fraclap::QuadratureSpec;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn trichotomy_over_the_sweep() {
    for n in [3, 4] {
        let sweep = sign_lemma_sweep(n, &spec()).unwrap();
        for p in &sweep.points {
            assert_eq!(p.sign, p.sign_expected, "{p:?}");
        }
        assert!(sweep.signs_match);
        assert!(sweep.evaluators_agree);
        assert!(sweep.max_ratio_spread < 1e-3, "{}", sweep.max_ratio_spread);
        assert!(sweep.zero_case_relative < 1e-8, "{}", sweep.zero_case_relative);
        assert!(sweep.points.iter().filter(|p| p.sign == Sign::Zero).count() == 3);
    }
}

#[test]
fn standard_bump_counterexample() {
    let f = Bump::standard().to_radial().unwrap();
    let rep = build_counterexample(1.0, 3, &f, &spec()).unwrap();
    assert!(rep.strictly_increasing, "{}", rep.min_forward_difference);
    assert!(rep.residual_of_flap_vs_f <= 1e-2, "{}", rep.residual_of_flap_vs_f);
    assert!(rep.flap_min_relative >= -1e-3, "{}", rep.flap_min_relative);
    assert!(rep.f_nonneg);
}

#[test]
fn derivative_formula_matches_the_potential() {
    let f = Bump::standard().to_radial().unwrap();
    let rep = build_counterexample(1.0, 3, &f, &spec()).unwrap();
    for r in [0.1, 0.4, 0.8] {
        let direct = riesz_derivative(&f, 1.0, 3, r, &spec()).unwrap();
        let h = 1e-3;
        let fd = (rep.u.eval(r + h) - rep.u.eval(r - h)) / (2.0 * h);
        assert!(direct > 0.0);
        assert!((direct - fd).abs() < 1e-3 * direct.abs(), "r={r}: {direct} vs {fd}");
    }
}

#[test]
fn representation_for_random_bumps() {
    for seed in 0..3 {
        let f = Bump::random(seed).to_radial().unwrap();
        for big_r in [0.5, 1.0, 2.0] {
            let rep = representation_identity(&f, 1.0, 3, big_r, &spec()).unwrap();
            assert!(rep.gap() <= 1e-3, "seed {seed} R {big_r}: {rep:?}");
        }
    }
    let f = Bump::standard().to_radial().unwrap();
    let rep = representation_identity(&f, 1.0, 3, 20.0, &spec()).unwrap();
    assert!(rep.green_gap() <= 0.05);
}
