//! Green function and Poisson kernel of `(-Δ)^{α/2}` on a ball.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{green_constant, poisson_constant};
use crate::error::{Error, Result};
use crate::quad::{integrate, Integrand1D, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallKernelParams {
    pub radius: f64,
    pub alpha: f64,
    pub n: u32,
}

impl BallKernelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::out_of_range("R", self.radius, "ball radius must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::out_of_range("alpha", self.alpha, "must satisfy 0 < alpha < 2"));
        }
        if self.n == 0 {
            return Err(Error::out_of_range("n", 0.0, "dimension must be at least 1"));
        }
        Ok(())
    }
}

/// Green function value; coincident interior points carry a tag instead of
/// an error so callers can excise them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GreenValue {
    Finite(f64),
    Coincident,
}

impl GreenValue {
    /// Numeric value, `+∞` for coincident points.
    pub fn value(self) -> f64 {
        match self {
            GreenValue::Finite(v) => v,
            GreenValue::Coincident => f64::INFINITY,
        }
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `∫_0^B b^{α/2-1} (1+b)^{-n/2} db`.
///
/// With `x = b/(1+b)` this is an incomplete Beta integral with parameters
/// `(α/2, (n-α)/2)`; the half of `[0,1]` nearer to the upper limit is taken
/// as a complement so both Jacobi endpoints stay well separated from it.
pub fn green_inner_integral(upper: f64, alpha: f64, n: u32, spec: &QuadratureSpec) -> Result<f64> {
    if !(upper >= 0.0) {
        return Err(Error::out_of_range("upper", upper, "upper limit must be >= 0"));
    }
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::out_of_range("alpha", alpha, "must satisfy 0 < alpha < n"));
    }
    if upper == 0.0 {
        return Ok(0.0);
    }
    let p = 0.5 * alpha;
    let q = 0.5 * (n as f64 - alpha);
    let full = ln_beta(p, q).exp();
    if upper.is_infinite() {
        return Ok(full);
    }
    let x = upper / (1.0 + upper);
    if x <= 0.5 {
        let g = move |t: f64| t.powf(p - 1.0) * (1.0 - t).powf(q - 1.0);
        integrate(&Integrand1D::new(g, 0.0, x).singular_at_a(1.0 - p), spec)
    } else {
        // y = 1 - x on [0, 1/(1+B)]
        let y = 1.0 / (1.0 + upper);
        let g = move |t: f64| t.powf(q - 1.0) * (1.0 - t).powf(p - 1.0);
        let rest = integrate(&Integrand1D::new(g, 0.0, y).singular_at_a(1.0 - q), spec)?;
        Ok(full - rest)
    }
}

/// `|x-y|` from the two radii and the cosine of the angle between them.
pub(crate) fn distance(x: f64, y: f64, cos_angle: f64) -> f64 {
    let c = cos_angle.clamp(-1.0, 1.0);
    // (x-y)² + 2xy(1-c) avoids cancellation for nearby points
    ((x - y) * (x - y) + 2.0 * x * y * (1.0 - c)).max(0.0).sqrt()
}

/// `G_R^α(x,y)` from `(|x|, |y|, cos∠(x,y))`.
pub fn green_ball(
    x_radius: f64,
    y_radius: f64,
    cos_angle: f64,
    params: &BallKernelParams,
    spec: &QuadratureSpec,
) -> Result<GreenValue> {
    params.validate()?;
    let (x, y) = (x_radius.abs(), y_radius.abs());
    let big_r = params.radius;
    if x >= big_r || y >= big_r {
        return Ok(GreenValue::Finite(0.0));
    }
    let d = distance(x, y, cos_angle);
    if d == 0.0 {
        return Ok(GreenValue::Coincident);
    }
    let r2 = big_r * big_r;
    let t_r = (1.0 - x * x / r2) * (1.0 - y * y / r2);
    let s_r = d * d / r2;
    let inner = green_inner_integral(t_r / s_r, params.alpha, params.n, spec)?;
    let c = green_constant(params.n, params.alpha)?;
    Ok(GreenValue::Finite(c * d.powf(params.alpha - params.n as f64) * inner))
}

/// `P_R^α(x,y)`; zero for `|y| < R`, requires `|x| < R`.
pub fn poisson_ball(x_radius: f64, y_radius: f64, cos_angle: f64, params: &BallKernelParams) -> Result<f64> {
    params.validate()?;
    let (x, y) = (x_radius.abs(), y_radius.abs());
    let big_r = params.radius;
    if x >= big_r {
        return Err(Error::XOutsideBall { x, radius: big_r });
    }
    if y < big_r {
        return Ok(0.0);
    }
    if y == big_r {
        return Ok(f64::INFINITY);
    }
    let ratio = (big_r - x) * (big_r + x) / ((y - big_r) * (y + big_r));
    let d = distance(x, y, cos_angle);
    Ok(poisson_constant(params.n, params.alpha)? * ratio.powf(0.5 * params.alpha) * d.powf(-(params.n as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta_reg;

    fn params() -> BallKernelParams {
        BallKernelParams {
            radius: 1.0,
            alpha: 1.0,
            n: 3,
        }
    }

    #[test]
    fn inner_integral_matches_regularized_beta() {
        let spec = QuadratureSpec::default();
        for (upper, alpha, n) in [(3.0, 1.0, 3), (0.2, 0.5, 3), (50.0, 1.5, 2), (1e6, 1.2, 5), (1.0, 0.3, 1)] {
            let got = green_inner_integral(upper, alpha, n, &spec).unwrap();
            let p = 0.5 * alpha;
            let q = 0.5 * (n as f64 - alpha);
            let x = upper / (1.0 + upper);
            let expected = beta_reg(p, q, x) * ln_beta(p, q).exp();
            assert!((got - expected).abs() < 1e-9 * expected, "{upper} {alpha} {n}: {got} vs {expected}");
        }
    }

    #[test]
    fn green_vanishes_outside() {
        let spec = QuadratureSpec::default();
        assert_eq!(green_ball(0.5, 1.0, 0.3, &params(), &spec).unwrap(), GreenValue::Finite(0.0));
        assert_eq!(green_ball(1.5, 0.2, 0.3, &params(), &spec).unwrap(), GreenValue::Finite(0.0));
    }

    #[test]
    fn green_is_symmetric_and_tags_coincidence() {
        let spec = QuadratureSpec::default();
        let a = green_ball(0.3, 0.6, 0.2, &params(), &spec).unwrap().value();
        let b = green_ball(0.6, 0.3, 0.2, &params(), &spec).unwrap().value();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-12 * a);
        assert_eq!(green_ball(0.4, 0.4, 1.0, &params(), &spec).unwrap(), GreenValue::Coincident);
    }

    #[test]
    fn poisson_support_and_domain() {
        assert_eq!(poisson_ball(0.2, 0.9, 0.0, &params()).unwrap(), 0.0);
        assert!(matches!(poisson_ball(1.2, 2.0, 0.0, &params()), Err(Error::XOutsideBall { .. })));
        assert!(poisson_ball(0.2, 1.5, -0.4, &params()).unwrap() > 0.0);
    }
}
