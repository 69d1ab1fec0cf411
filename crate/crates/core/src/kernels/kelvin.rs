use crate::error::{Error, Result};
use crate::radial::{Inner, InnerPolicy, RadialFunction, Tail, TailPolicy};

/// `u_λ(r) = (λ/r)^σ u(λ²/r)` on the grid reflected through `r = λ`.
///
/// The inner extension of `u` becomes the tail of `u_λ` and vice versa, so
/// the result is defined on all of `(0, ∞)` without extrapolating samples.
pub fn kelvin(u: &RadialFunction, lambda: f64, sigma: f64) -> Result<RadialFunction> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::out_of_range("lambda", lambda, "must be positive and finite"));
    }
    if !sigma.is_finite() {
        return Err(Error::out_of_range("sigma", sigma, "must be finite"));
    }
    let l2 = lambda * lambda;
    let grid: Vec<f64> = u.grid().iter().rev().map(|g| l2 / g).collect();
    // at r = λ²/g the weight (λ/r)^σ equals (g/λ)^σ
    let values: Vec<f64> = u
        .grid()
        .iter()
        .zip(u.values())
        .rev()
        .map(|(g, v)| (g / lambda).powf(sigma) * v)
        .collect();

    let tail = match u.inner() {
        Inner::Zero => TailPolicy::Zero,
        Inner::Constant => TailPolicy::Explicit(Tail {
            sigma,
            c: u.values()[0] * lambda.powf(sigma),
        }),
        Inner::Power { exponent, c } => TailPolicy::Explicit(Tail {
            sigma: sigma + exponent,
            c: c * lambda.powf(sigma + 2.0 * exponent),
        }),
        // leading order of value + curvature r²
        Inner::Quadratic { value, .. } if value != 0.0 => TailPolicy::Explicit(Tail {
            sigma,
            c: value * lambda.powf(sigma),
        }),
        Inner::Quadratic { curvature, .. } => TailPolicy::Explicit(Tail {
            sigma: sigma + 2.0,
            c: curvature * lambda.powf(sigma + 4.0),
        }),
    };
    let inner = match u.tail() {
        None => InnerPolicy::Zero,
        Some(t) => InnerPolicy::Explicit {
            exponent: t.sigma - sigma,
            c: t.c * lambda.powf(sigma - 2.0 * t.sigma),
        },
    };
    RadialFunction::new(grid, values, tail, inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::log_grid;

    fn sample() -> RadialFunction {
        RadialFunction::from_fn(
            &log_grid(1e-2, 1e2, 80),
            |r| (1.0 + r).powf(-1.5) * (2.0 + (r).ln().sin()),
            TailPolicy::Matched { sigma: 1.5 },
            InnerPolicy::Constant,
        )
        .unwrap()
    }

    #[test]
    fn involution() {
        let u = sample();
        let back = kelvin(&kelvin(&u, 1.3, 2.0).unwrap(), 1.3, 2.0).unwrap();
        for r in [5e-3, 0.02, 0.5, 3.0, 70.0, 400.0] {
            let (a, b) = (u.eval(r), back.eval(r));
            assert!((a - b).abs() <= 1e-6 * a.abs(), "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn extensions_match_pointwise_definition() {
        let u = sample();
        let (lambda, sigma) = (0.7, 1.2);
        let k = kelvin(&u, lambda, sigma).unwrap();
        for r in [1e-5, 1e-3, 0.3, 10.0, 1e3, 1e6] {
            let direct = (lambda / r).powf(sigma) * u.eval(lambda * lambda / r);
            assert!((k.eval(r) - direct).abs() <= 1e-9 * direct.abs(), "r={r}");
        }
    }

    #[test]
    fn half_exponent_power_is_fixed() {
        let sigma = 2.0;
        let u = RadialFunction::from_fn(
            &log_grid(1e-2, 1e2, 64),
            |r| r.powf(-0.5 * sigma),
            TailPolicy::Matched { sigma: 0.5 * sigma },
            InnerPolicy::Matched { exponent: -0.5 * sigma },
        )
        .unwrap();
        let k = kelvin(&u, 1.7, sigma).unwrap();
        for r in [1e-3f64, 0.05, 1.0, 33.0, 1e3] {
            let exact = r.powf(-0.5 * sigma);
            assert!((k.eval(r) - exact).abs() < 1e-12 * exact, "r={r}");
        }
    }

    #[test]
    fn constant_maps_to_power() {
        let u = RadialFunction::from_fn(
            &log_grid(1e-2, 1e2, 32),
            |_| 1.0,
            TailPolicy::Matched { sigma: 0.0 },
            InnerPolicy::Constant,
        )
        .unwrap();
        let k = kelvin(&u, 1.0, 1.5).unwrap();
        for r in [1e-3, 0.5, 2.0, 1e4] {
            assert!((k.eval(r) - r.powf(-1.5)).abs() < 1e-12 * r.powf(-1.5));
        }
    }
}
