//! Closed-form kernels and the radial operators built from them.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::{pv::pv_report, Quadrature, QuadratureSpec};
use crate::radial::RadialFunction;

mod ball;
mod kelvin;
mod riesz;

pub use ball::{green_ball, green_inner_integral, poisson_ball, BallKernelParams, GreenValue};
pub use kelvin::kelvin;
pub use riesz::{
    ring_kernel, ring_kernel_closed_3d, riesz_at, riesz_potential, riesz_potential_on_grid,
    riesz_potential_report, RieszReport,
};

/// Surface area `ω_{n-1} = 2π^{n/2}/Γ(n/2)` of the unit sphere in `ℝⁿ`.
pub fn unit_sphere_area(n: u32) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * PI.powf(h) / gamma(h)
}

/// Density of `t = cos θ` for a uniform point on the unit sphere in `ℝⁿ`,
/// `ω_{n-2}/ω_{n-1}`, so that the mean of `g(t)` is
/// `c ∫_{-1}^{1} g(t)(1-t²)^{(n-3)/2} dt`. For `n = 1` it is the weight of
/// each of the two points.
pub fn polar_density(n: u32) -> f64 {
    if n <= 1 {
        return 0.5;
    }
    let h = 0.5 * n as f64;
    (ln_gamma(h) - ln_gamma(h - 0.5)).exp() / PI.sqrt()
}

/// `R_{γ,n} = Γ((n-γ)/2) / (π^{n/2} 2^γ Γ(γ/2))`.
pub fn riesz_constant(gamma_: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    if !(gamma_ > 0.0 && gamma_ < nf) {
        return Err(Error::out_of_range("gamma", gamma_, format!("must satisfy 0 < gamma < n = {n}")));
    }
    Ok((ln_gamma(0.5 * (nf - gamma_)) - 0.5 * nf * PI.ln() - gamma_ * std::f64::consts::LN_2
        - ln_gamma(0.5 * gamma_))
    .exp())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::out_of_range("alpha", alpha, "must satisfy 0 < alpha < 2"))
    }
}

/// `C_{n,α} = 2^α Γ((n+α)/2) / (π^{n/2} |Γ(-α/2)|)`.
pub fn frac_laplacian_constant(n: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let nf = n as f64;
    // |Γ(-α/2)| = Γ(1-α/2) / (α/2)
    let abs_gamma = (ln_gamma(1.0 - 0.5 * alpha) - (0.5 * alpha).ln()).exp();
    Ok(2f64.powf(alpha) * (ln_gamma(0.5 * (nf + alpha)) - 0.5 * nf * PI.ln()).exp() / abs_gamma)
}

/// `Γ(n/2) sin(πα/2) / π^{n/2+1}`.
pub fn poisson_constant(n: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let nf = n as f64;
    Ok((ln_gamma(0.5 * nf) - (0.5 * nf + 1.0) * PI.ln()).exp() * (0.5 * PI * alpha).sin())
}

/// Prefactor of the ball Green function,
/// `Γ(n/2) / (2^α π^{n/2} Γ(α/2)²)`; it makes the Green function tend to the
/// Riesz kernel `R_{α,n}|x-y|^{α-n}` as the ball exhausts space.
pub fn green_constant(n: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let nf = n as f64;
    Ok((ln_gamma(0.5 * nf)
        - alpha * std::f64::consts::LN_2
        - 0.5 * nf * PI.ln()
        - 2.0 * ln_gamma(0.5 * alpha))
    .exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConstants {
    pub c_frac: f64,
    pub c_poisson: f64,
    pub c_green: f64,
    pub riesz: f64,
    pub sphere_area: f64,
}

impl KernelConstants {
    pub fn new(n: u32, alpha: f64) -> Result<Self> {
        Ok(Self {
            c_frac: frac_laplacian_constant(n, alpha)?,
            c_poisson: poisson_constant(n, alpha)?,
            c_green: green_constant(n, alpha)?,
            riesz: riesz_constant(alpha, n)?,
            sphere_area: unit_sphere_area(n),
        })
    }
}

/// `(-Δ)^{α/2} u` at `|x| = x_radius`.
pub fn frac_laplacian(
    u: &RadialFunction,
    alpha: f64,
    n: u32,
    x_radius: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    frac_laplacian_report(u, alpha, n, x_radius, spec)?.into_result()
}

/// As [`frac_laplacian`], keeping the estimate when the target is missed.
pub fn frac_laplacian_report(
    u: &RadialFunction,
    alpha: f64,
    n: u32,
    x_radius: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let c = frac_laplacian_constant(n, alpha)?;
    let mut q = pv_report(u, x_radius, alpha, n, None, spec)?;
    q.value *= c;
    q.error *= c;
    Ok(q)
}
