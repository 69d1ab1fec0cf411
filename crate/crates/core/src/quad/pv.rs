//! Hypersingular principal-value integrals of radial functions.
//!
//! For radial `u` and `|x| = r`,
//! `P.V.∫ (u(x)-u(y))/|x-y|^{n+α} dy = ω_{n-1} ∫_0^∞ ρ^{-1-α} (u(r) - M(ρ)) dρ`
//! where `M(ρ)` is the mean of `u` over the sphere of radius `ρ` about `x`.
//! Pairing antipodal points turns `u(r) - M(ρ)` into a mean of second
//! differences, which is `O(ρ²)` and removes the singularity at `ρ = 0`.

use crate::error::{Error, Result};
use crate::kernels::{polar_density, unit_sphere_area};
use crate::quad::{integrate_report, Integrand1D, NestedStatus, Quadrature, QuadratureSpec};
use crate::radial::RadialFunction;

/// Log-spacing above which a second difference at the grid scale is not trusted.
const MAX_LOG_SPACING: f64 = 0.25;

/// `P.V.∫ (u(x)-u(y))/|x-y|^{n+α} dy` at `|x| = x_radius`, without the
/// normalising constant of the fractional Laplacian.
pub fn integrate_pv_symmetric(
    u: &RadialFunction,
    x_radius: f64,
    alpha: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    pv_report(u, x_radius, alpha, n, None, spec)?.into_result()
}

/// Same integral with the ball `|y - x| < delta` removed.
pub fn integrate_pv_truncated(
    u: &RadialFunction,
    x_radius: f64,
    alpha: f64,
    n: u32,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::out_of_range("delta", delta, "cutoff must be positive"));
    }
    pv_report(u, x_radius, alpha, n, Some(delta), spec)?.into_result()
}

pub(crate) fn pv_report(
    u: &RadialFunction,
    x_radius: f64,
    alpha: f64,
    n: u32,
    cutoff: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::out_of_range("n", 0.0, "dimension must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::out_of_range("alpha", alpha, "must satisfy 0 < alpha < 2"));
    }
    let r = x_radius.abs();
    if !r.is_finite() {
        return Err(Error::out_of_range("x_radius", x_radius, "must be finite"));
    }
    if let Some(t) = u.tail() {
        if t.c != 0.0 && t.sigma <= -alpha {
            return Err(Error::NotInLalpha {
                sigma: t.sigma,
                alpha,
            });
        }
    }
    check_resolution(u, r)?;

    let ur = u.eval(r);
    let r_end = u.support_end().unwrap_or(u.r_max());
    let rho_far = r + r_end;
    let status = NestedStatus::new();

    let diff = |rho: f64| second_difference(u, r, rho, ur, n, spec, &status);
    let near = |rho: f64| -rho.powf(-1.0 - alpha) * diff(rho);

    let delta = spec.pv_cutoff_delta.min(0.5 * rho_far);
    // Below rho_0 the second difference is lost to rounding; it is O(ρ²) there,
    // so that piece is integrated in closed form from its value at rho_0.
    let rho_0 = 1e-3 * local_scale(u, r).min(delta);
    let mut head = 0.0;
    let lo = match cutoff {
        Some(c) => c,
        None => {
            let c = diff(rho_0) / (rho_0 * rho_0);
            head = -c * rho_0.powf(2.0 - alpha) / (2.0 - alpha);
            rho_0
        }
    };
    let mut body = Integrand1D::new(near, lo, rho_far);
    let mut marks = vec![delta, r, (r - u.r_min()).abs(), r + u.r_min(), (r_end - r).abs()];
    if let Some(s0) = u.support_start() {
        marks.push((r - s0).abs());
        marks.push(r + s0);
    }
    let mut m = delta.max(lo) * 8.0;
    while m < rho_far {
        marks.push(m);
        m *= 8.0;
    }
    body = body.breakpoints(marks);
    // a vanishing PV can only be resolved relative to the size of u
    let outer_spec = QuadratureSpec {
        abs_tol: spec.abs_tol.max(0.1 * spec.rel_tol * ur.abs()),
        ..*spec
    };
    let near_q = integrate_report(&body, &outer_spec);

    let mut total = status.finish(near_q)?;
    total.value += head;

    // Beyond rho_far the sphere about x lies where u follows its tail.
    total.value += ur * rho_far.powf(-alpha) / alpha;
    if let Some(t) = u.tail().filter(|t| t.c != 0.0) {
        let status = NestedStatus::new();
        let far = |tau: f64| {
            if tau <= 0.0 {
                return 0.0;
            }
            let rho = rho_far / tau;
            -rho_far.powf(-alpha) * tau.powf(alpha - 1.0) * sphere_mean(u, r, rho, n, spec, &status)
        };
        let far_int = Integrand1D::new(far, 0.0, 1.0).singular_at_a(1.0 - alpha - t.sigma);
        let q = integrate_report(&far_int, spec);
        let q = status.finish(q)?;
        total.value += q.value;
        total.error += q.error;
        total.converged &= q.converged;
    }
    total.value *= unit_sphere_area(n);
    total.error *= unit_sphere_area(n);
    Ok(total)
}

/// Length over which the interpolant near `r` is a single cubic piece.
fn local_scale(u: &RadialFunction, r: f64) -> f64 {
    let g = u.grid();
    if r < g[0] {
        return if r == 0.0 { g[0] } else { r.min(g[0] - r).max(1e-3 * r) };
    }
    if r > g[g.len() - 1] {
        return r;
    }
    let i = g.partition_point(|&x| x <= r).clamp(1, g.len() - 1);
    (g[i] - g[i - 1]).min(r)
}

fn check_resolution(u: &RadialFunction, r: f64) -> Result<()> {
    let g = u.grid();
    if r < g[0] || r > g[g.len() - 1] {
        return Ok(());
    }
    let i = g.partition_point(|&x| x <= r).clamp(1, g.len() - 1);
    let spacing = (g[i] / g[i - 1]).ln();
    if spacing > MAX_LOG_SPACING {
        return Err(Error::ResolutionTooCoarse { radius: r, spacing });
    }
    Ok(())
}

/// `M(ρ) - u(r)`, the spherical mean about `x` minus the centre value.
fn second_difference(
    u: &RadialFunction,
    r: f64,
    rho: f64,
    ur: f64,
    n: u32,
    spec: &QuadratureSpec,
    status: &NestedStatus,
) -> f64 {
    if r == 0.0 {
        return u.eval(rho) - ur;
    }
    if n == 1 {
        return 0.5 * (u.eval(r + rho) + u.eval((r - rho).abs())) - ur;
    }
    let two_r_rho = 2.0 * r * rho;
    let sum2 = (r + rho) * (r + rho);
    let dif2 = (r - rho) * (r - rho);
    let pair = |t: f64| {
        let s = 1.0 - t;
        let plus = (sum2 - two_r_rho * s).max(0.0).sqrt();
        let minus = (dif2 + two_r_rho * s).sqrt();
        let w = if n == 3 {
            1.0
        } else {
            (s * (1.0 + t)).powf(0.5 * (n as f64 - 3.0))
        };
        (u.eval(plus) + u.eval(minus) - 2.0 * ur) * w
    };
    let inner_spec = QuadratureSpec {
        abs_tol: spec.abs_tol.max(64.0 * f64::EPSILON * ur.abs()),
        ..*spec
    };
    let mut f = Integrand1D::new(pair, 0.0, 1.0);
    if n != 3 {
        f = f.singular_at_b(0.5 * (3.0 - n as f64));
    }
    // kinks where either point crosses the ends of the sampled range
    for edge in [u.r_min(), u.r_max()] {
        let e2 = edge * edge;
        f = f
            .breakpoint(1.0 - (e2 - dif2) / two_r_rho, 0.0)
            .breakpoint(1.0 - (sum2 - e2) / two_r_rho, 0.0);
    }
    polar_density(n) * status.value(integrate_report(&f, &inner_spec))
}

/// Mean of `u` over the sphere of radius `rho` about a point at distance `r`
/// from the origin.
fn sphere_mean(
    u: &RadialFunction,
    r: f64,
    rho: f64,
    n: u32,
    spec: &QuadratureSpec,
    status: &NestedStatus,
) -> f64 {
    if r == 0.0 {
        return u.eval(rho);
    }
    if n == 1 {
        return 0.5 * (u.eval(r + rho) + u.eval((rho - r).abs()));
    }
    let a = r * r + rho * rho;
    let b = 2.0 * r * rho;
    let e = 0.5 * (n as f64 - 3.0);
    let g = |t: f64| {
        let w = if n == 3 { 1.0 } else { ((1.0 - t) * (1.0 + t)).powf(e) };
        u.eval((a + b * t).max(0.0).sqrt()) * w
    };
    let mut f = Integrand1D::new(g, -1.0, 1.0);
    if n != 3 {
        f = f.singular_at_a(-e).singular_at_b(-e);
    }
    polar_density(n) * status.value(integrate_report(&f, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{log_grid, InnerPolicy, Tail, TailPolicy};

    fn bubble(n: u32, alpha: f64, points: usize) -> RadialFunction {
        let e = 0.5 * (n as f64 - alpha);
        RadialFunction::from_fn(
            &log_grid(1e-3, 1e4, points),
            |r| (1.0 + r * r).powf(-e),
            TailPolicy::Explicit(Tail { sigma: 2.0 * e, c: 1.0 }),
            InnerPolicy::Even,
        )
        .unwrap()
    }

    #[test]
    fn constant_has_zero_pv() {
        let u = RadialFunction::from_fn(
            &log_grid(1e-3, 1e4, 128),
            |_| 3.0,
            TailPolicy::Explicit(Tail { sigma: 0.0, c: 3.0 }),
            InnerPolicy::Constant,
        )
        .unwrap();
        for r in [0.0, 0.4, 2.0] {
            let v = integrate_pv_symmetric(&u, r, 1.0, 3, &QuadratureSpec::default()).unwrap();
            assert!(v.abs() < 1e-10, "r={r}: {v}");
        }
    }

    #[test]
    fn bubble_at_origin() {
        // ω_2 ∫ ρ^{-2} (1 - 1/(1+ρ²)) dρ = 4π · π/2
        let u = bubble(3, 1.0, 256);
        let v = integrate_pv_symmetric(&u, 0.0, 1.0, 3, &QuadratureSpec::default()).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!((v - exact).abs() < 1e-6 * exact, "{v} vs {exact}");
    }

    #[test]
    fn growing_tail_outside_l_alpha() {
        let u = RadialFunction::from_fn(
            &log_grid(1e-2, 1e2, 64),
            |r| r.sqrt(),
            TailPolicy::Matched { sigma: -0.5 },
            InnerPolicy::Constant,
        )
        .unwrap();
        let err = integrate_pv_symmetric(&u, 1.0, 0.4, 2, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, Error::NotInLalpha { .. }));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let u = RadialFunction::from_fn(
            &log_grid(1e-2, 1e2, 10),
            |r| 1.0 / (1.0 + r * r),
            TailPolicy::Matched { sigma: 2.0 },
            InnerPolicy::Constant,
        )
        .unwrap();
        let err = integrate_pv_symmetric(&u, 1.0, 1.0, 3, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, Error::ResolutionTooCoarse { .. }));
    }
}
