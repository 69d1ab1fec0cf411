//! Built-in acceptance suite: thirteen numbered checks with closed-form or
//! independently computed oracles, each reporting pass or fail with the
//! measured quantity.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::averages::{decay_exponents, nonlocal_average};
use crate::error::Result;
use crate::kernels::{frac_laplacian, kelvin, ring_kernel, riesz_constant, riesz_potential};
use crate::lemmas::{build_counterexample, representation_identity, sign_lemma_sweep, Bump};
use crate::liouville::{
    bootstrap, classify_params, kelvin_defect, picard_iterate, region_map, region_map_is_symmetric, LimitClass,
    Verdict,
};
use crate::params::{validate, ProblemParams};
use crate::quad::QuadratureSpec;
use crate::radial::{log_grid, InnerPolicy, RadialFunction, TailPolicy, DEFAULT_GRID};

pub const CRITERIA: usize = 13;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "AC{:02} {:<32} {}  {} ({:.2} s)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail,
            self.seconds
        )
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "riesz constant",
        2 => "newton shell",
        3 => "inversion",
        4 => "bubble identity",
        5 => "sign trichotomy",
        6 => "monotone counterexample",
        7 => "representation identity",
        8 => "nonlocal average monotonicity",
        9 => "bubble pair decay",
        10 => "bootstrap sequences",
        11 => "classifier truth table",
        12 => "picard bubble fixed point",
        13 => "kelvin properties",
        _ => "unknown",
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Run criterion `id` (1 to 13). Numerical errors count as failures.
pub fn run_criterion(id: usize) -> CriterionResult {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let outcome = match id {
        1 => riesz_constants(),
        2 => newton_shell(&spec),
        3 => inversion(&spec),
        4 => bubble_identity(&spec),
        5 => sign_trichotomy(&spec),
        6 => counterexample(&spec),
        7 => representation(&spec),
        8 => average_monotonicity(&spec),
        9 => bubble_pair_decay(&spec),
        10 => bootstrap_sequences(),
        11 => truth_table(),
        12 => picard_fixed_point(&spec),
        13 => kelvin_properties(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name: criterion_name(id),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA).map(run_criterion).collect()
}

pub fn format_table(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&r.line());
        out.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} passed\n", results.len()));
    out
}

type Check = Result<(bool, String)>;

fn riesz_constants() -> Check {
    let cases = [(2.0, 3, 1.0 / (4.0 * PI)), (1.0, 2, 1.0 / (2.0 * PI)), (2.0, 4, 1.0 / (4.0 * PI * PI))];
    let mut worst = 0.0_f64;
    for (gamma, n, exact) in cases {
        worst = worst.max(rel(riesz_constant(gamma, n)?, exact));
    }
    Ok((worst <= 1e-12, format!("max rel err {worst:.3e}")))
}

fn newton_shell(spec: &QuadratureSpec) -> Check {
    let radii = log_grid(0.1, 10.0, 10);
    let mut worst = 0.0_f64;
    for &r in &radii {
        for &s in &radii {
            worst = worst.max(rel(ring_kernel(r, s, 2.0, 3, spec)?, 1.0 / r.max(s)));
        }
    }
    Ok((worst <= 1e-8, format!("max rel err {worst:.3e} on 10x10")))
}

fn inversion(spec: &QuadratureSpec) -> Check {
    let f = Bump::standard().to_radial()?;
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for alpha in [1.0, 0.5] {
        let rep = build_counterexample(alpha, 3, &f, spec)?;
        worst = worst.max(rep.residual_of_flap_vs_f);
        parts.push(format!("alpha={alpha}: {:.3e}", rep.residual_of_flap_vs_f));
    }
    Ok((worst <= 1e-2, parts.join(", ")))
}

fn bubble() -> Result<RadialFunction> {
    RadialFunction::from_fn(
        &log_grid(1e-3, 1e3, 241),
        |r| 1.0 / (1.0 + r * r),
        TailPolicy::Matched { sigma: 2.0 },
        InnerPolicy::Even,
    )
}

fn bubble_identity(spec: &QuadratureSpec) -> Check {
    let u = bubble()?;
    let radii = [0.0, 0.5, 1.0, 2.0];
    let errs: Vec<f64> = radii
        .par_iter()
        .map(|&r| Ok(rel(frac_laplacian(&u, 1.0, 3, r, spec)?, 2.0 / (1.0 + r * r).powi(2))))
        .collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok((worst <= 1e-3, format!("max rel err {worst:.3e}")))
}

fn sign_trichotomy(spec: &QuadratureSpec) -> Check {
    let sweep = sign_lemma_sweep(3, spec)?;
    let ok = sweep.signs_match
        && sweep.zero_case_relative <= 1e-8
        && sweep.evaluators_agree
        && sweep.max_ratio_spread <= 1e-3;
    Ok((
        ok,
        format!(
            "{} points, zero case {:.3e}, ratio spread {:.3e}",
            sweep.points.len(),
            sweep.zero_case_relative,
            sweep.max_ratio_spread
        ),
    ))
}

fn counterexample(spec: &QuadratureSpec) -> Check {
    let f = Bump::standard().to_radial()?;
    let rep = build_counterexample(1.0, 3, &f, spec)?;
    let ok = rep.strictly_increasing && rep.flap_min_relative >= -1e-3;
    Ok((
        ok,
        format!(
            "min step {:.3e} vs floor {:.3e}, min flap {:.3e}",
            rep.min_forward_difference,
            1e-10 * rep.max_u,
            rep.flap_min_relative
        ),
    ))
}

fn representation(spec: &QuadratureSpec) -> Check {
    let mut worst = 0.0_f64;
    for seed in 0..3 {
        let f = Bump::random(seed).to_radial()?;
        for big_r in [0.5, 1.0, 2.0] {
            worst = worst.max(representation_identity(&f, 1.0, 3, big_r, spec)?.gap());
        }
    }
    let far = representation_identity(&Bump::standard().to_radial()?, 1.0, 3, 20.0, spec)?.green_gap();
    Ok((
        worst <= 1e-3 && far <= 0.05,
        format!("max gap {worst:.3e}, green-only gap at R=20 {far:.3e}"),
    ))
}

fn average_monotonicity(spec: &QuadratureSpec) -> Check {
    let u = riesz_potential(&Bump::standard().to_radial()?, 1.0, 3, spec)?;
    let radii = log_grid(0.05, 20.0, 20);
    let a: Vec<f64> = radii
        .par_iter()
        .map(|&r| nonlocal_average(&u, 1.0, r, spec))
        .collect::<Result<_>>()?;
    let slack = 1e-6 * a[0];
    let worst = a.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok((worst <= slack, format!("largest increase {worst:.3e}, slack {slack:.3e}")))
}

fn critical_params() -> ProblemParams {
    ProblemParams {
        p: 2.0,
        q: 2.0,
        ..ProblemParams::default()
    }
}

fn bubble_pair() -> Result<RadialFunction> {
    RadialFunction::from_fn(
        &DEFAULT_GRID.radii(),
        |r| 2.0 / (1.0 + r * r),
        TailPolicy::Matched { sigma: 2.0 },
        InnerPolicy::Even,
    )
}

fn bubble_pair_decay(spec: &QuadratureSpec) -> Check {
    let (su, sv) = decay_exponents(&critical_params())?;
    let u = bubble_pair()?;
    let radii = log_grid(1.0, 100.0, 25);
    let mut worst = 0.0_f64;
    for &r in &radii {
        worst = worst.max(u.eval(r) * r).max(nonlocal_average(&u, 1.0, r, spec)? * r);
    }
    let ok = rel(su, 1.0) <= 1e-12 && rel(sv, 1.0) <= 1e-12 && worst <= 2.1;
    Ok((ok, format!("exponents ({su}, {sv}), max compensated {worst:.4}")))
}

fn bootstrap_sequences() -> Check {
    let at = |p: f64| validate(ProblemParams { p, q: p, ..ProblemParams::default() });
    let s = bootstrap(&at(1.5)?, 4)?;
    let a = rel(s.mu_u[2], -0.25) <= 1e-12
        && rel(s.mu_u[4], -3.0625) <= 1e-12
        && s.limit_class == LimitClass::DivergesToMinusInfinity;
    let s = bootstrap(&at(1.0)?, 10)?;
    let b = (0..=5).all(|j| (s.mu_u[2 * j] - (1.0 - 2.0 * j as f64)).abs() <= 1e-12)
        && s.limit_class == LimitClass::ArithmeticDecrease { decrement: 2.0 };
    let s = bootstrap(&at(0.5)?, 4)?;
    let c = matches!(s.limit_class, LimitClass::Converges { limit } if rel(limit, -2.0) <= 1e-12);
    Ok((a && b && c, format!("divergent {a}, arithmetic {b}, convergent {c}")))
}

fn truth_table() -> Check {
    let base = ProblemParams::default();
    let cases = [
        (ProblemParams { p: 1.0, q: 1.0, ..base }, Verdict::Thm12I),
        (ProblemParams { p: 2.0, q: 2.0, ..base }, Verdict::CriticalPairExcluded),
        (ProblemParams { p: 1.5, q: 1.5, ..base }, Verdict::Thm13Subcritical),
        (
            ProblemParams {
                n: 2,
                k: 1,
                alpha: 0.5,
                beta: 0.5,
                ..base
            },
            Verdict::Thm13HighOrder,
        ),
    ];
    let mut hits = 0;
    for (params, expected) in cases {
        if classify_params(params)?.verdict == expected {
            hits += 1;
        }
    }
    let map = region_map(&base, [1.0, 3.0], [1.0, 3.0], 21)?;
    let symmetric = region_map_is_symmetric(&map)?;
    Ok((hits == 4 && symmetric, format!("{hits}/4 verdicts, 21x21 symmetric {symmetric}")))
}

fn picard_fixed_point(spec: &QuadratureSpec) -> Check {
    let u0 = bubble_pair()?;
    let t = picard_iterate(&validate(critical_params())?, &u0, &u0, 5, spec)?;
    let worst = t.residuals.iter().copied().fold(0.0, f64::max);
    let ok = t.residuals.len() == 5 && worst <= 1e-2;
    Ok((ok, format!("{} steps, max residual {worst:.3e}", t.residuals.len())))
}

/// The three Kelvin clauses: involution on a bump potential, `r^{-σ}` left
/// unchanged, and a vanishing bubble defect at `λ = 1`.
pub fn kelvin_clauses() -> Result<[(bool, String); 3]> {
    let spec = QuadratureSpec::default();
    let (lambda, sigma) = (1.3, 2.0);
    let u = riesz_potential(&Bump::standard().to_radial()?, 1.0, 3, &spec)?;
    let back = kelvin(&kelvin(&u, lambda, sigma)?, lambda, sigma)?;
    let interior = log_grid(1e-2, 1e2, 41);
    let inv = interior
        .iter()
        .map(|&r| rel(back.eval(r), u.eval(r)))
        .fold(0.0, f64::max);

    let power = RadialFunction::from_fn(
        &log_grid(1e-3, 1e3, 97),
        |r| r.powf(-sigma),
        TailPolicy::Matched { sigma },
        InnerPolicy::Matched { exponent: -sigma },
    )?;
    let k = kelvin(&power, lambda, sigma)?;
    let fixed = interior
        .iter()
        .map(|&r| rel(k.eval(r), r.powf(-sigma)))
        .fold(0.0, f64::max);

    let b = RadialFunction::from_fn(
        &log_grid(1e-3, 1e3, 241),
        |r| 1.0 / (1.0 + r * r),
        TailPolicy::Matched { sigma: 2.0 },
        InnerPolicy::Even,
    )?;
    let defect = kelvin_defect(&b, 1.0, 2.0)?.sup_abs;
    Ok([
        (inv <= 1e-6, format!("involution {inv:.3e}")),
        (fixed <= 1e-12, format!("r^-sigma fixed point {fixed:.3e}")),
        (defect <= 1e-6, format!("bubble defect {defect:.3e}")),
    ])
}

fn kelvin_properties() -> Check {
    let clauses = kelvin_clauses()?;
    let ok = clauses.iter().all(|c| c.0);
    let detail: Vec<String> = clauses.into_iter().map(|c| c.1).collect();
    Ok((ok, detail.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        for id in [1, 10, 11] {
            let r = run_criterion(id);
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        let r = run_criterion(14);
        assert!(!r.passed);
        assert_eq!(r.name, "unknown");
    }

    #[test]
    fn table_counts_passes() {
        let t = format_table(&[run_criterion(1), run_criterion(14)]);
        assert!(t.ends_with("1/2 passed\n"));
        assert!(t.starts_with("AC01"));
    }
}
