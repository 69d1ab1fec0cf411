//! Riesz potentials of radial densities through the ring kernel
//! `Γ(r,s)`, the mean of `|x-y|^{γ-n}` over `|y| = s` at `|x| = r`.

use rayon::prelude::*;
use serde::Serialize;

use super::{polar_density, riesz_constant, unit_sphere_area};
use crate::error::{Error, Result};
use crate::quad::{integrate_report, Integrand1D, NestedStatus, Quadrature, QuadratureSpec};
use crate::radial::{merge_grids, RadialFunction, TailPolicy, InnerPolicy, DEFAULT_GRID};

fn check_gamma(gamma: f64, n: u32) -> Result<()> {
    if gamma > 0.0 && gamma < n as f64 {
        Ok(())
    } else {
        Err(Error::out_of_range("gamma", gamma, format!("must satisfy 0 < gamma < n = {n}")))
    }
}

/// Closed form of the ring kernel in three dimensions,
/// `[(r+s)^{γ-1} - |r-s|^{γ-1}] / (2(γ-1) r s)` with its `γ → 1` limit.
pub fn ring_kernel_closed_3d(r: f64, s: f64, gamma: f64) -> f64 {
    let (r, s) = (r.abs(), s.abs());
    if r == 0.0 || s == 0.0 {
        return r.max(s).powf(gamma - 3.0);
    }
    let c = gamma - 1.0;
    let sum = r + s;
    let d = (r - s).abs();
    if d == 0.0 {
        return if c > 0.0 {
            sum.powf(c) / (2.0 * c * r * s)
        } else {
            f64::INFINITY
        };
    }
    let x = (d / sum).ln();
    let e = if (c * x).abs() < 1e-300 { x } else { (c * x).exp_m1() / c };
    -sum.powf(c) * e / (2.0 * r * s)
}

fn ring_kernel_1d(r: f64, s: f64, gamma: f64) -> f64 {
    0.5 * ((r - s).abs().powf(gamma - 1.0) + (r + s).powf(gamma - 1.0))
}

/// `Γ(r,s)` by polar-angle quadrature with weight `sin^{n-2}θ` (closed form for `n = 1`).
pub fn ring_kernel(r: f64, s: f64, gamma: f64, n: u32, spec: &QuadratureSpec) -> Result<f64> {
    ring_kernel_report(r, s, gamma, n, spec)?.into_result()
}

pub(crate) fn ring_kernel_report(
    r: f64,
    s: f64,
    gamma: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    check_gamma(gamma, n)?;
    if !(r >= 0.0 && s >= 0.0 && r.is_finite() && s.is_finite()) {
        return Err(Error::out_of_range("radius", r.min(s), "radii must be finite and >= 0"));
    }
    let exact = |value: f64| Quadrature {
        value,
        error: 0.0,
        converged: true,
        panels: 0,
    };
    if r == s && gamma <= 1.0 {
        return Err(Error::Singular(format!(
            "r = s = {r} with gamma = {gamma} <= 1: the spherical mean diverges"
        )));
    }
    if r == 0.0 || s == 0.0 {
        return Ok(exact(r.max(s).powf(gamma - n as f64)));
    }
    if n == 1 {
        return Ok(exact(ring_kernel_1d(r, s, gamma)));
    }
    let nf = n as f64;
    let d2 = (r - s) * (r - s);
    let rs4 = 4.0 * r * s;
    let half_e = 0.5 * (gamma - nf);
    let f = move |theta: f64| {
        let h = (0.5 * theta).sin();
        let base = d2 + rs4 * h * h;
        let w = if n == 2 { 1.0 } else { theta.sin().powi(n as i32 - 2) };
        base.powf(half_e) * w
    };
    let mut integrand = Integrand1D::new(f, 0.0, std::f64::consts::PI).singular_at_b(2.0 - nf);
    integrand = if r == s {
        integrand.singular_at_a(2.0 - gamma)
    } else {
        integrand.singular_at_a(2.0 - nf)
    };
    let theta_c = (r - s).abs() / (r * s).sqrt();
    let mut t = theta_c;
    while t < std::f64::consts::PI && t > 0.0 {
        integrand = integrand.breakpoint(t, 0.0);
        t *= 4.0;
    }
    let mut q = integrate_report(&integrand, spec)?;
    let c = polar_density(n);
    q.value *= c;
    q.error *= c;
    Ok(q)
}

/// Ring kernel used inside radial integrals: closed forms where available.
fn ring_fast(r: f64, s: f64, gamma: f64, n: u32, spec: &QuadratureSpec, status: &NestedStatus) -> f64 {
    match n {
        1 => {
            if r == s {
                return f64::INFINITY;
            }
            ring_kernel_1d(r, s, gamma)
        }
        3 => ring_kernel_closed_3d(r, s, gamma),
        _ => {
            if r == s && gamma <= 1.0 {
                return f64::INFINITY;
            }
            status.value(ring_kernel_report(r, s, gamma, n, spec))
        }
    }
}

/// `I_γ f(r) = R_{γ,n} ω_{n-1} ∫_0^∞ s^{n-1} f(s) Γ(r,s) ds` at one radius.
pub fn riesz_at(f: &RadialFunction, gamma: f64, n: u32, r: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    check_gamma(gamma, n)?;
    let sigma = f.tail_sigma();
    if sigma <= gamma {
        return Err(Error::DivergentTail {
            sigma,
            required: gamma,
        });
    }
    let r = r.abs();
    let nf = n as f64;
    let scale = riesz_constant(gamma, n)? * unit_sphere_area(n);
    let mu_diag = if gamma < 1.0 { 1.0 - gamma } else { 0.0 };

    let status = NestedStatus::new();
    let body = |s: f64| {
        let v = f.eval(s);
        if v == 0.0 || s == r {
            return 0.0;
        }
        s.powf(nf - 1.0) * v * ring_fast(r, s, gamma, n, spec, &status)
    };
    let lo = f.support_start().unwrap_or(0.0);
    let hi = match f.support_end() {
        Some(end) => end,
        None => f.r_max().max(2.0 * r),
    };
    let mut total = Quadrature {
        value: 0.0,
        error: 0.0,
        converged: true,
        panels: 0,
    };
    if hi > lo {
        let mut near = Integrand1D::new(body, lo, hi).breakpoint(r, mu_diag);
        if lo == 0.0 {
            let inner_exp = match f.inner() {
                crate::radial::Inner::Power { exponent, .. } => exponent,
                _ => 0.0,
            };
            // at the centre Γ(0,s) = s^{γ-n}
            let power = if r == 0.0 { gamma - 1.0 } else { nf - 1.0 };
            near = near.singular_at_a(-(power + inner_exp));
        }
        if r == lo && lo > 0.0 {
            near = near.singular_at_a(mu_diag);
        }
        if r == hi {
            near = near.singular_at_b(mu_diag);
        }
        let mut marks = vec![f.r_min(), f.r_max()];
        let mut m = f.r_min();
        while m < hi {
            marks.push(m);
            m *= 8.0;
        }
        near = near.breakpoints(marks);
        let q = integrate_report(&near, spec)?;
        total.value += q.value;
        total.error += q.error;
        total.converged &= q.converged;
        total.panels += q.panels;
    }
    if let Some(t) = f.tail().filter(|t| t.c != 0.0 && f.support_end().is_none()) {
        // s = hi / τ maps [hi, ∞) onto (0, 1]
        let tail = |tau: f64| {
            if tau <= 0.0 {
                return 0.0;
            }
            let s = hi / tau;
            hi / (tau * tau) * s.powf(nf - 1.0) * t.c * s.powf(-t.sigma) * ring_fast(r, s, gamma, n, spec, &status)
        };
        let far = Integrand1D::new(tail, 0.0, 1.0).singular_at_a(1.0 + gamma - t.sigma);
        let q = integrate_report(&far, spec)?;
        total.value += q.value;
        total.error += q.error;
        total.converged &= q.converged;
        total.panels += q.panels;
    }
    let mut total = status.finish(Ok(total))?;
    total.value *= scale;
    total.error *= scale;
    Ok(total)
}

/// Riesz potential together with its convergence state.
#[derive(Debug, Clone, Serialize)]
pub struct RieszReport {
    #[serde(skip)]
    pub u: RadialFunction,
    pub converged: bool,
    /// Largest quadrature error bound over the output grid.
    pub max_error: f64,
}

/// Output grid: the input grid, its reflection through the input range and
/// the default grid.
fn output_grid(f: &RadialFunction) -> Vec<f64> {
    let g = f.grid();
    let prod = f.r_min() * f.r_max();
    let reflected: Vec<f64> = g.iter().map(|r| prod / r).collect();
    merge_grids(&[g, &reflected, &DEFAULT_GRID.radii()], 1e-9)
}

/// `I_γ f` on the union of the input grid, its reflection and the default grid.
pub fn riesz_potential(f: &RadialFunction, gamma: f64, n: u32, spec: &QuadratureSpec) -> Result<RadialFunction> {
    let rep = riesz_potential_report(f, gamma, n, &output_grid(f), spec)?;
    if !rep.converged {
        return Err(Error::NoConvergence {
            estimate: rep.u.sup_norm(),
            error_bound: rep.max_error,
        });
    }
    Ok(rep.u)
}

/// `I_γ f` sampled on a caller-chosen grid.
pub fn riesz_potential_on_grid(
    f: &RadialFunction,
    gamma: f64,
    n: u32,
    grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<RadialFunction> {
    let rep = riesz_potential_report(f, gamma, n, grid, spec)?;
    if !rep.converged {
        return Err(Error::NoConvergence {
            estimate: rep.u.sup_norm(),
            error_bound: rep.max_error,
        });
    }
    Ok(rep.u)
}

/// Evaluate on `grid` (any order, deduplicated) keeping the best estimate
/// when some points miss the tolerance.
pub fn riesz_potential_report(
    f: &RadialFunction,
    gamma: f64,
    n: u32,
    grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<RieszReport> {
    spec.validate()?;
    check_gamma(gamma, n)?;
    let nf = n as f64;
    let grid = merge_grids(&[grid], 1e-12);
    let points: Vec<Quadrature> = grid
        .par_iter()
        .map(|&r| riesz_at(f, gamma, n, r, spec))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = points.iter().map(|q| q.value).collect();
    let converged = points.iter().all(|q| q.converged);
    let max_error = points.iter().fold(0.0_f64, |m, q| m.max(q.error));
    let sigma_out = match f.support_end() {
        Some(_) => nf - gamma,
        None => (f.tail_sigma() - gamma).min(nf - gamma),
    };
    let u = RadialFunction::new(
        grid,
        values,
        TailPolicy::Matched { sigma: sigma_out },
        InnerPolicy::Even,
    )?;
    Ok(RieszReport {
        u,
        converged,
        max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{log_grid, Tail};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn newton_shell_theorem() {
        let v = ring_kernel(1.0, 2.0, 2.0, 3, &spec()).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        assert!((ring_kernel_closed_3d(1.0, 2.0, 2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn centre_value() {
        let v = ring_kernel(0.0, 2.0, 1.0, 3, &spec()).unwrap();
        assert_eq!(v, 0.25);
    }

    #[test]
    fn kernel_is_symmetric() {
        let a = ring_kernel(0.7, 1.3, 1.5, 3, &spec()).unwrap();
        let b = ring_kernel(1.3, 0.7, 1.5, 3, &spec()).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &(r, s, g) in &[(0.3, 2.0, 0.5), (1.0, 1.0, 1.5), (1.0, 1.001, 0.7), (5.0, 0.2, 2.5), (1.0, 1.2, 1.0)] {
            let q = ring_kernel(r, s, g, 3, &spec()).unwrap();
            let c = ring_kernel_closed_3d(r, s, g);
            assert!((q - c).abs() < 1e-8 * c.abs(), "{r} {s} {g}: {q} vs {c}");
        }
    }

    #[test]
    fn coincident_radii_need_gamma_above_one() {
        assert!(matches!(ring_kernel(1.0, 1.0, 1.0, 3, &spec()), Err(Error::Singular(_))));
        assert!(ring_kernel(1.0, 1.0, 1.2, 3, &spec()).is_ok());
    }

    #[test]
    fn uniform_ball_potential_at_centre() {
        let grid = log_grid(1e-3, 1.0, 64);
        let f = RadialFunction::from_fn(&grid, |_| 1.0, TailPolicy::Zero, InnerPolicy::Constant).unwrap();
        let q = riesz_at(&f, 2.0, 3, 0.0, &spec()).unwrap();
        assert!((q.value - 0.5).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn zero_density_gives_zero() {
        let f = RadialFunction::from_fn(&log_grid(0.1, 10.0, 16), |_| 0.0, TailPolicy::Zero, InnerPolicy::Constant)
            .unwrap();
        let u = riesz_potential(&f, 1.0, 3, &spec()).unwrap();
        assert!(u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slowly_decaying_density_diverges() {
        let f = RadialFunction::from_fn(
            &log_grid(0.1, 10.0, 16),
            |r| r.powi(-1),
            TailPolicy::Explicit(Tail { sigma: 1.0, c: 1.0 }),
            InnerPolicy::Constant,
        )
        .unwrap();
        assert!(matches!(riesz_potential(&f, 1.5, 3, &spec()), Err(Error::DivergentTail { .. })));
    }
}
