use std::f64::consts::PI;

use fraclap::averages::fit_decay;
use fraclap::kernels::{
    green_ball, green_constant, green_inner_integral, poisson_ball, poisson_constant, ring_kernel, riesz_constant,
    riesz_potential, BallKernelParams, GreenValue,
};
use fraclap::lemmas::Bump;
use fraclap::quad::integrate_pv_truncated;
use fraclap::radial::log_grid;
use fraclap::{InnerPolicy, QuadratureSpec, RadialFunction, TailPolicy};
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Composite Simpson rule with `m` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `I_γ f(x)` in three dimensions as a double integral over `(s, θ)`.
fn brute_force_potential(bump: &Bump, gamma: f64, r: f64) -> f64 {
    let c = riesz_constant(gamma, 3).unwrap();
    let outer = |s: f64| {
        let inner = |t: f64| {
            let d2 = r * r + s * s - 2.0 * r * s * t.cos();
            d2.powf(0.5 * (gamma - 3.0)) * t.sin()
        };
        s * s * bump.eval(s) * simpson(inner, 0.0, PI, 400)
    };
    c * 2.0 * PI * simpson(outer, bump.lo, bump.hi, 400)
}

#[test]
fn potential_matches_surface_brute_force() {
    for (seed, r) in [(0, 0.3), (1, 0.8), (2, 2.5), (3, 4.0), (4, 0.05)] {
        let bump = Bump::random(seed);
        let gamma = [1.0, 1.5, 0.5, 2.0, 1.2][seed as usize];
        let u = riesz_potential(&bump.to_radial().unwrap(), gamma, 3, &spec()).unwrap();
        let oracle = brute_force_potential(&bump, gamma, r);
        assert!((u.eval(r) - oracle).abs() <= 1e-4 * oracle, "seed {seed} r {r}: {} vs {oracle}", u.eval(r));
    }
}

#[test]
fn thin_shell_of_unit_radial_mass() {
    // ∫ s² f(s) ds = 1 gives I_2 f(r) = 1/r outside the shell
    let shell = Bump {
        lo: 1.0,
        hi: 1.05,
        sharpness: 0.0025,
        ..Bump::standard()
    };
    let mass = simpson(|s| s * s * shell.eval(s), shell.lo, shell.hi, 2000);
    let f = shell.to_radial().unwrap().scale(1.0 / mass);
    let u = riesz_potential(&f, 2.0, 3, &spec()).unwrap();
    for r in [1.2, 2.0, 7.0, 50.0] {
        assert!((u.eval(r) * r - 1.0).abs() < 1e-6, "r={r}: {}", u.eval(r) * r);
    }
}

#[test]
fn compact_sources_decay_like_the_kernel() {
    let f = Bump::standard().to_radial().unwrap();
    for gamma in [0.5, 1.0, 1.5, 2.5] {
        let u = riesz_potential(&f, gamma, 3, &spec()).unwrap();
        let fit = fit_decay(&u, 1e3, 1e4).unwrap();
        assert!((fit.fitted - (3.0 - gamma)).abs() < 0.05, "gamma {gamma}: {}", fit.fitted);
    }
}

#[test]
fn potentials_of_order_two_and_above_decrease() {
    let f = Bump::random(7).to_radial().unwrap();
    for gamma in [2.0, 2.5] {
        let u = riesz_potential(&f, gamma, 3, &spec()).unwrap();
        for w in u.values().windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "gamma {gamma}");
        }
    }
}

#[test]
fn poisson_kernel_is_a_probability_measure() {
    // with s = cosh t the radial integral ∫_1^∞ P(0, s) 4π s² ds has a smooth integrand;
    // the piece below t = 1e-5 is O(1e-5)
    let params = BallKernelParams {
        radius: 1.0,
        alpha: 1.0,
        n: 3,
    };
    let integrand = |t: f64| {
        let s = t.cosh();
        poisson_ball(0.0, s, 1.0, &params).unwrap() * 4.0 * PI * s * s * t.sinh()
    };
    let total = simpson(integrand, 1e-5, 40.0, 200_000);
    assert!((total - 1.0).abs() < 1e-4, "{total}");
}

#[test]
fn poisson_at_centre_closed_form() {
    for (alpha, n, big_r, y) in [(1.0, 3, 1.0, 1.7), (0.5, 2, 2.0, 5.0), (1.5, 4, 0.7, 0.9)] {
        let p = poisson_ball(0.0, y, 0.3, &BallKernelParams { radius: big_r, alpha, n }).unwrap();
        let c = poisson_constant(n, alpha).unwrap();
        let exact = c * f64::powf(big_r, alpha) * (y * y - big_r * big_r).powf(-0.5 * alpha) * f64::powi(y, -(n as i32));
        assert!((p - exact).abs() <= 1e-13 * exact);
    }
}

fn ball_point() -> impl Strategy<Value = (f64, f64, f64, f64, u32)> {
    (0.0f64..0.99, 0.01f64..3.0, -1.0f64..1.0, 0.1f64..1.9, 2u32..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_kernel_is_symmetric(r in 0.05f64..5.0, s in 0.05f64..5.0, gamma in 0.3f64..1.9, n in 3u32..6) {
        prop_assume!((r - s).abs() > 1e-3);
        let a = ring_kernel(r, s, gamma, n, &spec()).unwrap();
        let b = ring_kernel(s, r, gamma, n, &spec()).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.abs());
    }

    #[test]
    fn ball_kernels_are_nonnegative((x, y, c, alpha, n) in ball_point()) {
        let params = BallKernelParams { radius: 1.0, alpha, n };
        match green_ball(x, y, c, &params, &spec()).unwrap() {
            GreenValue::Finite(g) => prop_assert!(g >= 0.0),
            GreenValue::Coincident => {}
        }
        prop_assert!(poisson_ball(x, y, c, &params).unwrap() >= 0.0);
    }

    #[test]
    fn green_at_centre_uses_the_inner_integral(y in 0.05f64..0.95, big_r in 0.5f64..3.0, alpha in 0.1f64..1.9) {
        let y = y * big_r;
        let params = BallKernelParams { radius: big_r, alpha, n: 3 };
        let g = green_ball(0.0, y, 0.4, &params, &spec()).unwrap().value();
        let upper = big_r * big_r / (y * y) - 1.0;
        let expected = green_constant(3, alpha).unwrap()
            * y.powf(alpha - 3.0)
            * green_inner_integral(upper, alpha, 3, &spec()).unwrap();
        prop_assert!((g - expected).abs() <= 1e-10 * expected);
    }
}

#[test]
fn truncated_principal_value_converges_at_the_expected_order() {
    let u = RadialFunction::from_fn(
        &log_grid(1e-3, 1e3, 241),
        |r| 1.0 / (1.0 + r * r),
        TailPolicy::Matched { sigma: 2.0 },
        InnerPolicy::Even,
    )
    .unwrap();
    let tight = spec().with_rel_tol(1e-11);
    for alpha in [0.5, 1.0, 1.5] {
        let values: Vec<f64> = (0..6)
            .map(|k| integrate_pv_truncated(&u, 0.6, alpha, 3, 0.2 / 2f64.powi(k), &tight).unwrap())
            .collect();
        let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for w in diffs.windows(2).take(3) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 2.0 - alpha - 0.1, "alpha {alpha}: order {order}");
        }
    }
}
