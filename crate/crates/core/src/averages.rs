//! Nonlocal averages, the decay exponents of solutions, and empirical
//! decay-rate fitting.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::quad::{integrate_report, Integrand1D, Quadrature, QuadratureSpec};
use crate::radial::RadialFunction;

/// Slope tolerance (in log-log) below which compensated products count as bounded.
pub const BOUNDED_SLOPE: f64 = 0.05;

/// `A(R) = ∫_R^∞ R^α / (r (r²-R²)^{α/2}) ū(r) dr`.
pub fn nonlocal_average(u: &RadialFunction, alpha: f64, big_r: f64, spec: &QuadratureSpec) -> Result<f64> {
    nonlocal_average_report(u, alpha, big_r, spec)?.into_result()
}

/// As [`nonlocal_average`], keeping the estimate when the target is missed.
///
/// After `t = R/r` the integral is `∫_0^1 t^{α-1} (1-t²)^{-α/2} ū(R/t) dt`:
/// a Jacobi endpoint of order `α/2` at `t = 1` and, through the tail
/// `ū ~ c r^{-σ}`, of order `1-α-σ` at `t = 0`.
pub fn nonlocal_average_report(
    u: &RadialFunction,
    alpha: f64,
    big_r: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::out_of_range("alpha", alpha, "must satisfy 0 < alpha < 2"));
    }
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::out_of_range("R", big_r, "must be positive and finite"));
    }
    spec.validate()?;
    let zero = Quadrature {
        value: 0.0,
        error: 0.0,
        converged: true,
        panels: 0,
    };
    let f = move |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        t.powf(alpha - 1.0) * ((1.0 - t) * (1.0 + t)).powf(-0.5 * alpha) * u.eval(big_r / t)
    };
    let (t0, mu0) = match u.support_end() {
        Some(end) => {
            if big_r >= end {
                return Ok(zero);
            }
            (big_r / end, 0.0)
        }
        None => {
            let sigma = u.tail_sigma();
            if sigma <= -alpha {
                return Err(Error::DivergentTail {
                    sigma,
                    required: -alpha,
                });
            }
            (0.0, 1.0 - alpha - sigma)
        }
    };
    let mut marks = vec![big_r / u.r_max(), big_r / u.r_min()];
    let mut m = (big_r / u.r_max()).max(t0).max(1e-300);
    while m < 1.0 {
        marks.push(m);
        m *= 4.0;
    }
    let integrand = Integrand1D::new(f, t0, 1.0)
        .singular_at_a(mu0)
        .singular_at_b(0.5 * alpha)
        .breakpoints(marks);
    integrate_report(&integrand, spec)
}

/// `(σ_u, σ_v)`, the decay exponents of solutions:
/// `σ_u = (2k+α+a+p(2l+β+b))/(pq-1)` and symmetrically for `v`.
pub fn decay_exponents(params: &ProblemParams) -> Result<(f64, f64)> {
    let pq = params.pq();
    if !(pq > 1.0) {
        return Err(Error::PqNotSupercritical(pq));
    }
    let su = params.order_u() + params.a;
    let sv = params.order_v() + params.b;
    Ok(((su + params.p * sv) / (pq - 1.0), (sv + params.q * su) / (pq - 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// Minus the least-squares slope of `log u` against `log r`.
    pub fitted: f64,
    pub theoretical: Option<f64>,
    pub window: [f64; 2],
    /// Largest deviation from the fitted line in `log u`.
    pub residual: f64,
}

impl DecayReport {
    pub fn with_theoretical(mut self, exponent: f64) -> Self {
        self.theoretical = Some(exponent);
        self
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Fit `u ≈ c r^{-σ}` to the grid samples inside `[lo, hi]`.
pub fn fit_decay(u: &RadialFunction, lo: f64, hi: f64) -> Result<DecayReport> {
    let bad = |reason: &str| Error::BadWindow {
        lo,
        hi,
        reason: reason.into(),
    };
    if !(lo < hi) || !(lo > 0.0) {
        return Err(bad("need 0 < lo < hi"));
    }
    let tol = 1e-12;
    if lo < u.r_min() * (1.0 - tol) || hi > u.r_max() * (1.0 + tol) {
        return Err(bad("window must lie inside the sampled range"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&r, &v) in u.grid().iter().zip(u.values()) {
        if r < lo * (1.0 - tol) || r > hi * (1.0 + tol) {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::NonPositiveValues { radius: r, value: v });
        }
        xs.push(r.ln());
        ys.push(v.ln());
    }
    if xs.len() < 8 {
        return Err(bad(&format!("only {} samples in window, need 8", xs.len())));
    }
    let (c, slope) = least_squares(&xs, &ys);
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - c - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(DecayReport {
        fitted: -slope,
        theoretical: None,
        window: [lo, hi],
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalDecayReport {
    pub sigma_u: f64,
    pub sigma_v: f64,
    pub radii: Vec<f64>,
    /// `ū(R) R^{σ_u}`.
    pub u_products: Vec<f64>,
    /// `v̄(R) R^{σ_v}`.
    pub v_products: Vec<f64>,
    /// Nonlocal average of `u` (order α) times `R^{σ_u}`.
    pub u_average_products: Vec<f64>,
    /// Nonlocal average of `v` (order β) times `R^{σ_v}`.
    pub v_average_products: Vec<f64>,
    pub max_u: f64,
    pub max_v: f64,
    /// Log-log growth rate of the products over the radii.
    pub slope_u: f64,
    pub slope_v: f64,
    pub bounded: bool,
    /// Set when `k = l = 0`, where the local form of the estimate is not
    /// established; the verdict is then informational only.
    pub exploratory: bool,
}

fn growth_slope(radii: &[f64], products: &[f64]) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(products)
        .filter(|(_, p)| **p > 0.0)
        .map(|(r, p)| (r.ln(), p.ln()))
        .unzip();
    if xs.len() < 2 {
        return 0.0;
    }
    least_squares(&xs, &ys).1
}

/// Compensated products `ū(R) R^{σ_u}`, `v̄(R) R^{σ_v}` (and the same for the
/// nonlocal averages) over `radii`, with a boundedness verdict.
pub fn local_decay_check(
    u: &RadialFunction,
    v: &RadialFunction,
    params: &ProblemParams,
    radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<LocalDecayReport> {
    let (sigma_u, sigma_v) = decay_exponents(params)?;
    for &r in radii {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::out_of_range("R", r, "radii must be positive"));
        }
    }
    let u_products: Vec<f64> = radii.iter().map(|&r| u.eval(r) * r.powf(sigma_u)).collect();
    let v_products: Vec<f64> = radii.iter().map(|&r| v.eval(r) * r.powf(sigma_v)).collect();
    let averaged = |w: &RadialFunction, order: f64, sigma: f64| -> Result<Vec<f64>> {
        radii
            .par_iter()
            .map(|&r| {
                let q = nonlocal_average_report(w, order, r, spec)?;
                Ok(q.value * r.powf(sigma))
            })
            .collect()
    };
    let u_average_products = averaged(u, params.alpha, sigma_u)?;
    let v_average_products = averaged(v, params.beta, sigma_v)?;
    let max_of = |xs: &[f64]| xs.iter().fold(0.0_f64, |m, x| m.max(*x));
    let slope_u = growth_slope(radii, &u_products).max(growth_slope(radii, &u_average_products));
    let slope_v = growth_slope(radii, &v_products).max(growth_slope(radii, &v_average_products));
    Ok(LocalDecayReport {
        sigma_u,
        sigma_v,
        max_u: max_of(&u_products),
        max_v: max_of(&v_products),
        radii: radii.to_vec(),
        u_products,
        v_products,
        u_average_products,
        v_average_products,
        slope_u,
        slope_v,
        bounded: slope_u <= BOUNDED_SLOPE && slope_v <= BOUNDED_SLOPE,
        exploratory: params.k == 0 && params.l == 0,
    })
}
