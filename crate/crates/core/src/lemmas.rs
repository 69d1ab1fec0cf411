//! The sign lemma for the surface integral `∫_{|y|=R} x·(x-y)/|x-y|^{n-γ+2} dσ_y`,
//! the positive radial super-harmonic counterexample, and the representation
//! of a potential at the origin through the ball Green and Poisson kernels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::averages::nonlocal_average;
use crate::error::{Error, Result};
use crate::kernels::{
    frac_laplacian_report, green_constant, green_inner_integral, poisson_constant, riesz_at, riesz_constant,
    riesz_potential_on_grid, unit_sphere_area,
};
use crate::quad::{integrate, integrate_report, Integrand1D, NestedStatus, QuadratureSpec};
use crate::radial::{merge_grids, log_grid, InnerPolicy, RadialFunction, TailPolicy, DEFAULT_GRID};

/// Relative size below which a sign-lemma value counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Zero,
    Negative,
}

impl Sign {
    /// Sign of `value` with anything within `threshold * scale` of zero reported as zero.
    pub fn of(value: f64, scale: f64, threshold: f64) -> Sign {
        if value.abs() <= threshold * scale {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

fn check_sign_inputs(gamma: f64, n: u32, r: f64, big_r: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::out_of_range("n", n as f64, "the sign lemma needs n >= 2"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::out_of_range("gamma", gamma, "must be positive"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::out_of_range("r", r, "must be positive"));
    }
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::out_of_range("R", big_r, "must be positive"));
    }
    if r == big_r {
        return Err(Error::Singular(format!("r = R = {r}: the integrand is not integrable on the sphere")));
    }
    Ok(())
}

/// Integrand of the polar reduction and the corresponding sphere factor.
fn surface_parts(gamma: f64, n: u32, r: f64, big_r: f64) -> (impl Fn(f64) -> f64, f64) {
    let e = -0.5 * (n as f64 - gamma + 2.0);
    let m = n as i32 - 2;
    let g = move |theta: f64| {
        let (s, c) = theta.sin_cos();
        let half = (0.5 * theta).sin();
        // |x-y|² = (r-R)² + 4rR sin²(θ/2)
        let d2 = (r - big_r) * (r - big_r) + 4.0 * r * big_r * half * half;
        r * (r - big_r * c) * d2.powf(e) * s.powi(m)
    };
    let factor = big_r.powi(n as i32 - 1) * unit_sphere_area(n - 1);
    (g, factor)
}

fn surface_integrand(g: impl Fn(f64) -> f64, r: f64, big_r: f64) -> Integrand1D<impl Fn(f64) -> f64> {
    // the kernel concentrates near θ = 0 when r and R are close
    let scale = ((r - big_r).abs() / r.max(big_r)).max(1e-12);
    let mut marks = Vec::new();
    let mut t = scale;
    while t < 1.0 {
        marks.push(t);
        t *= 4.0;
    }
    Integrand1D::new(g, 0.0, std::f64::consts::PI).breakpoints(marks)
}

/// `∫_{|y|=R} x·(x-y)/|x-y|^{n-γ+2} dσ_y` for `|x| = r`, reduced to the
/// polar angle between `x` and `y`.
pub fn sign_integral_surface(gamma: f64, n: u32, r: f64, big_r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_sign_inputs(gamma, n, r, big_r)?;
    let (g, factor) = surface_parts(gamma, n, r, big_r);
    Ok(factor * integrate(&surface_integrand(g, r, big_r), spec)?)
}

/// `∫_{|y|=R} |x·(x-y)|/|x-y|^{n-γ+2} dσ_y`, the scale against which a zero is judged.
pub fn sign_integral_magnitude(gamma: f64, n: u32, r: f64, big_r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_sign_inputs(gamma, n, r, big_r)?;
    let (g, factor) = surface_parts(gamma, n, r, big_r);
    let abs_g = move |t: f64| g(t).abs();
    // x·(x-y) changes sign where cos θ = r/R
    let mut f = surface_integrand(abs_g, r, big_r);
    if r < big_r {
        f = f.breakpoint((r / big_r).acos(), 0.0);
    }
    Ok(factor * integrate(&f, spec)?)
}

/// The chord form at `|x| = 1`, `R > 1`:
/// `∫_0^{π/2} cos θ sin^{n-2} θ (|PD|^{γ-2} - |PC|^{γ-2}) / cos δ dθ`
/// with `sin δ = sin θ / R`, `|PC| = R cos δ - cos θ`, `|PD| = R cos δ + cos θ`.
///
/// Equal to the surface integral divided by the area of the unit
/// `(n-2)`-sphere.
pub fn sign_integral_theta(gamma: f64, n: u32, big_r: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(big_r > 1.0 && big_r.is_finite()) {
        return Err(Error::out_of_range("R", big_r, "the chord form needs R > 1 = |x|"));
    }
    check_sign_inputs(gamma, n, 1.0, big_r)?;
    let m = n as i32 - 2;
    let g = move |theta: f64| {
        let (s, c) = theta.sin_cos();
        let sd = s / big_r;
        let cd = (1.0 - sd * sd).sqrt();
        let pc = big_r * cd - c;
        let pd = big_r * cd + c;
        c * s.powi(m) * (pd.powf(gamma - 2.0) - pc.powf(gamma - 2.0)) / cd
    };
    integrate(&Integrand1D::new(g, 0.0, std::f64::consts::FRAC_PI_2), spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignLemmaResult {
    pub gamma: f64,
    pub n: u32,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub value_surface: f64,
    /// Chord form at the normalised ratio `R/r`; present only for `R > r`.
    pub value_theta: Option<f64>,
    pub magnitude: f64,
    pub sign: Sign,
    pub sign_expected: Sign,
}

/// Expected sign: positive for `R < r`; for `R > r` the sign of `γ - 2`.
pub fn expected_sign(gamma: f64, r: f64, big_r: f64) -> Sign {
    if big_r < r || gamma > 2.0 {
        Sign::Positive
    } else if gamma == 2.0 {
        Sign::Zero
    } else {
        Sign::Negative
    }
}

/// Both evaluators at one point, with the observed and expected signs.
pub fn sign_lemma(gamma: f64, n: u32, r: f64, big_r: f64, spec: &QuadratureSpec) -> Result<SignLemmaResult> {
    let value_surface = sign_integral_surface(gamma, n, r, big_r, spec)?;
    let magnitude = sign_integral_magnitude(gamma, n, r, big_r, spec)?;
    let value_theta = if big_r > r {
        Some(sign_integral_theta(gamma, n, big_r / r, spec)?)
    } else {
        None
    };
    Ok(SignLemmaResult {
        gamma,
        n,
        r,
        big_r,
        value_surface,
        value_theta,
        magnitude,
        sign: Sign::of(value_surface, magnitude, ZERO_THRESHOLD),
        sign_expected: expected_sign(gamma, r, big_r),
    })
}

/// Sweep over `γ × R` at `r = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct SignSweep {
    pub n: u32,
    pub points: Vec<SignLemmaResult>,
    /// Largest relative spread of surface/θ ratios over `R`, per `γ ≠ 2`.
    pub max_ratio_spread: f64,
    /// Largest `|value|` at `γ = 2` relative to the largest `|value|` at `γ = 3`.
    pub zero_case_relative: f64,
    pub signs_match: bool,
    pub evaluators_agree: bool,
}

pub const SWEEP_GAMMAS: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
pub const SWEEP_OUTER: [f64; 3] = [1.2, 2.0, 5.0];
pub const SWEEP_INNER: [f64; 3] = [0.2, 0.5, 0.8];

pub fn sign_lemma_sweep(n: u32, spec: &QuadratureSpec) -> Result<SignSweep> {
    let cases: Vec<(f64, f64)> = SWEEP_GAMMAS
        .iter()
        .flat_map(|&g| SWEEP_OUTER.iter().chain(&SWEEP_INNER).map(move |&big_r| (g, big_r)))
        .collect();
    let points: Vec<SignLemmaResult> = cases
        .par_iter()
        .map(|&(g, big_r)| sign_lemma(g, n, 1.0, big_r, spec))
        .collect::<Result<_>>()?;

    let mut max_ratio_spread = 0.0_f64;
    let mut evaluators_agree = true;
    for &g in &SWEEP_GAMMAS {
        let outer: Vec<&SignLemmaResult> = points.iter().filter(|p| p.gamma == g && p.big_r > p.r).collect();
        for p in &outer {
            let theta = p.value_theta.unwrap_or(f64::NAN);
            let theta_sign = Sign::of(theta, p.magnitude / unit_sphere_area(n - 1), ZERO_THRESHOLD);
            evaluators_agree &= theta_sign == p.sign;
        }
        if g == 2.0 {
            continue;
        }
        let ratios: Vec<f64> = outer
            .iter()
            .map(|p| p.value_surface / p.value_theta.unwrap_or(f64::NAN))
            .collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = (hi - lo) / lo.abs().max(hi.abs());
        max_ratio_spread = if spread.is_nan() { f64::INFINITY } else { max_ratio_spread.max(spread) };
    }
    let largest = |g: f64| {
        points
            .iter()
            .filter(|p| p.gamma == g && p.big_r > p.r)
            .fold(0.0_f64, |m, p| m.max(p.value_surface.abs()))
    };
    let zero_case_relative = largest(2.0) / largest(3.0);
    let signs_match = points.iter().all(|p| p.sign == p.sign_expected);
    Ok(SignSweep {
        n,
        points,
        max_ratio_spread,
        zero_case_relative,
        signs_match,
        evaluators_agree: evaluators_agree && max_ratio_spread <= 1e-3,
    })
}

/// Smooth nonnegative source supported in `(lo, hi) ⊂ [1, 2]`:
/// `amplitude · exp(-sharpness/((s-lo)(hi-s))) · (1 + tilt·ξ)` with `ξ ∈ (-1, 1)`
/// the position across the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub lo: f64,
    pub hi: f64,
    pub amplitude: f64,
    pub sharpness: f64,
    pub tilt: f64,
}

pub const BUMP_SAMPLES: usize = 400;

impl Default for Bump {
    fn default() -> Self {
        Self::standard()
    }
}

impl Bump {
    /// `exp(-1/((s-1)(2-s)))` on `(1, 2)`.
    pub fn standard() -> Self {
        Self {
            lo: 1.0,
            hi: 2.0,
            amplitude: 1.0,
            sharpness: 1.0,
            tilt: 0.0,
        }
    }

    /// Randomised profile, reproducible from `seed`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            lo: rng.random_range(1.0..1.2),
            hi: rng.random_range(1.8..2.0),
            amplitude: rng.random_range(0.5..2.0),
            sharpness: rng.random_range(0.5..1.5),
            tilt: rng.random_range(-0.5..0.5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo >= 1.0 && self.lo < self.hi && self.hi <= 2.0) {
            return Err(Error::BumpInvalid(format!(
                "support ({}, {}) must be a nonempty subinterval of [1, 2]",
                self.lo, self.hi
            )));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::BumpInvalid(format!("amplitude {} must be positive", self.amplitude)));
        }
        if !(self.sharpness > 0.0 && self.sharpness.is_finite()) {
            return Err(Error::BumpInvalid(format!("sharpness {} must be positive", self.sharpness)));
        }
        if !(self.tilt.abs() < 1.0) {
            return Err(Error::BumpInvalid(format!("|tilt| = {} must be below 1", self.tilt.abs())));
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= self.lo || s >= self.hi {
            return 0.0;
        }
        let xi = (2.0 * s - self.lo - self.hi) / (self.hi - self.lo);
        self.amplitude * (-self.sharpness / ((s - self.lo) * (self.hi - s))).exp() * (1.0 + self.tilt * xi)
    }

    /// Samples on the support, zero outside.
    pub fn to_radial(&self) -> Result<RadialFunction> {
        self.validate()?;
        RadialFunction::from_fn(
            &log_grid(self.lo, self.hi, BUMP_SAMPLES),
            |s| self.eval(s),
            TailPolicy::Zero,
            InnerPolicy::Zero,
        )
    }
}

/// A source is admissible when it is nonnegative, not identically zero and
/// vanishes outside `[1, 2]`.
pub fn validate_source(f: &RadialFunction) -> Result<()> {
    if f.values().iter().any(|&v| v < 0.0) {
        return Err(Error::BumpInvalid("source takes negative values".into()));
    }
    if f.values().iter().all(|&v| v == 0.0) {
        return Err(Error::BumpInvalid("source vanishes identically".into()));
    }
    let inside = |r: f64| (1.0..=2.0).contains(&r);
    if let Some((r, _)) = f.grid().iter().zip(f.values()).find(|&(&r, &v)| v != 0.0 && !inside(r)) {
        return Err(Error::BumpInvalid(format!("source is nonzero at r = {r}, outside [1, 2]")));
    }
    if f.support_start().is_none() || f.support_end().is_none() {
        return Err(Error::BumpInvalid("source extensions must vanish below 1 and above 2".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub alpha: f64,
    pub n: u32,
    #[serde(skip)]
    pub u: RadialFunction,
    /// Uniform radii in `[r_lo, r_hi]` where `u` was sampled for monotonicity.
    pub window: [f64; 2],
    pub min_forward_difference: f64,
    pub max_u: f64,
    pub strictly_increasing: bool,
    /// `max |(-Δ)^{α/2} u - f| / max f` over the sampled radii.
    pub residual_of_flap_vs_f: f64,
    /// Smallest sampled value of `(-Δ)^{α/2} u`, in units of `max f`.
    pub flap_min_relative: f64,
    pub f_nonneg: bool,
    pub converged: bool,
}

pub const MONOTONE_WINDOW: [f64; 2] = [0.05, 0.95];
pub const MONOTONE_SAMPLES: usize = 96;
pub const MONOTONE_FLOOR: f64 = 1e-10;

fn uniform(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// `u = I_α f` for an admissible source and the checks on it: strict increase
/// on `(0.05, 0.95)`, and `(-Δ)^{α/2} u ≈ f ≥ 0` at radii in `(0, 4]`
/// and across the support.
pub fn build_counterexample(
    alpha: f64,
    n: u32,
    f: &RadialFunction,
    spec: &QuadratureSpec,
) -> Result<CounterexampleReport> {
    if !(alpha > 0.0 && alpha < 2.0_f64.min(n as f64)) {
        return Err(Error::out_of_range("alpha", alpha, "must satisfy 0 < alpha < min(2, n)"));
    }
    validate_source(f)?;
    let [lo, hi] = MONOTONE_WINDOW;
    let monotone = uniform(lo, hi, MONOTONE_SAMPLES);
    let prod = f.r_min() * f.r_max();
    let reflected: Vec<f64> = f.grid().iter().map(|r| prod / r).collect();
    let grid = merge_grids(&[f.grid(), &reflected, &DEFAULT_GRID.radii(), &monotone], 1e-9);
    let u = riesz_potential_on_grid(f, alpha, n, &grid, spec)?;

    let samples: Vec<f64> = monotone.iter().map(|&r| u.eval(r)).collect();
    let min_forward_difference = samples
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let max_u = u.sup_norm();
    let max_f = f.sup_norm();

    let support = uniform(f.r_min(), f.r_max(), 21);
    let probes: Vec<f64> = uniform(0.05, 4.0, 40).into_iter().chain(support.iter().copied()).collect();
    let flap: Vec<(f64, bool)> = probes
        .par_iter()
        .map(|&r| frac_laplacian_report(&u, alpha, n, r, spec).map(|q| (q.value, q.converged)))
        .collect::<Result<_>>()?;
    let residual = probes
        .iter()
        .zip(&flap)
        .map(|(&r, &(v, _))| (v - f.eval(r)).abs())
        .fold(0.0_f64, f64::max);
    let flap_min = flap.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    Ok(CounterexampleReport {
        alpha,
        n,
        window: MONOTONE_WINDOW,
        min_forward_difference,
        max_u,
        strictly_increasing: min_forward_difference > MONOTONE_FLOOR * max_u,
        residual_of_flap_vs_f: residual / max_f,
        flap_min_relative: flap_min / max_f,
        f_nonneg: f.values().iter().all(|&v| v >= 0.0),
        converged: flap.iter().all(|p| p.1),
        u,
    })
}

/// `du/dr` of `I_γ f` at `r` from the differentiated kernel:
/// `R_{γ,n} (γ-n)/r ∫ f(s) S(s) ds` where `S(s)` is the sign-lemma surface
/// integral over `|y| = s`. `r` must lie outside the support of `f`.
pub fn riesz_derivative(f: &RadialFunction, gamma: f64, n: u32, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    let lo = f.support_start().unwrap_or(0.0);
    let Some(hi) = f.support_end() else {
        return Err(Error::out_of_range("f", f.tail_sigma(), "source must have compact support"));
    };
    if r > 0.0 && r >= lo && r <= hi {
        return Err(Error::Singular(format!("r = {r} lies in the source support [{lo}, {hi}]")));
    }
    let status = NestedStatus::new();
    let body = |s: f64| {
        let v = f.eval(s);
        if v == 0.0 || s <= 0.0 {
            return 0.0;
        }
        v * status.value(
            sign_integral_surface(gamma, n, r, s, spec).map(|value| crate::quad::Quadrature {
                value,
                error: 0.0,
                converged: true,
                panels: 0,
            }),
        )
    };
    let q = integrate_report(&Integrand1D::new(body, lo, hi).breakpoints(f.grid().iter().copied().step_by(40)), spec);
    let q = status.finish(q)?.into_result()?;
    Ok(riesz_constant(gamma, n)? * (gamma - n as f64) / r * q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Representation {
    pub lhs: f64,
    pub rhs_green: f64,
    pub rhs_poisson: f64,
}

impl Representation {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs_green - self.rhs_poisson).abs() / self.lhs.abs()
    }

    pub fn green_gap(&self) -> f64 {
        (self.lhs - self.rhs_green).abs() / self.lhs.abs()
    }
}

/// Value of `u = I_α f` at the origin and its two ball-representation terms:
/// `C₀ ∫_0^R r^{α-1} J(R²/r² - 1) f(r) dr` with `J` the Green inner integral,
/// and `C'₀ ∫_R^∞ R^α/(r (r²-R²)^{α/2}) u(r) dr`.
pub fn representation_identity(
    f: &RadialFunction,
    alpha: f64,
    n: u32,
    big_r: f64,
    spec: &QuadratureSpec,
) -> Result<Representation> {
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::out_of_range("R", big_r, "ball radius must be positive"));
    }
    if f.values().iter().all(|&v| v == 0.0) && f.support_start().is_some() && f.support_end().is_some() {
        return Ok(Representation {
            lhs: 0.0,
            rhs_green: 0.0,
            rhs_poisson: 0.0,
        });
    }
    let lhs = riesz_at(f, alpha, n, 0.0, spec)?.into_result()?;

    let area = unit_sphere_area(n);
    let c0 = area * green_constant(n, alpha)?;
    let lo = f.support_start().unwrap_or(0.0);
    let hi = f.support_end().unwrap_or(f64::INFINITY).min(big_r);
    let rhs_green = if hi > lo {
        let status = NestedStatus::new();
        let body = |r: f64| {
            let v = f.eval(r);
            if v == 0.0 || r <= 0.0 {
                return 0.0;
            }
            let upper = (big_r / r).powi(2) - 1.0;
            let j = green_inner_integral(upper.max(0.0), alpha, n, spec).map(|value| crate::quad::Quadrature {
                value,
                error: 0.0,
                converged: true,
                panels: 0,
            });
            r.powf(alpha - 1.0) * v * status.value(j)
        };
        let mut g = Integrand1D::new(body, lo, hi);
        if lo == 0.0 {
            g = g.singular_at_a(1.0 - alpha);
        }
        if hi == big_r {
            g = g.singular_at_b(-0.5 * alpha);
        }
        let marks: Vec<f64> = f.grid().iter().copied().step_by(32).chain([f.r_min(), f.r_max()]).collect();
        let q = integrate_report(&g.breakpoints(marks), spec);
        c0 * status.finish(q)?.into_result()?
    } else {
        0.0
    };

    // u itself is needed outside the ball for the Poisson term
    let r_top = f.support_end().unwrap_or(f.r_max()).max(big_r);
    let grid = merge_grids(
        &[
            &DEFAULT_GRID.radii(),
            &log_grid(big_r, 1e3 * r_top, 256),
            f.grid(),
        ],
        1e-9,
    );
    let u = riesz_potential_on_grid(f, alpha, n, &grid, spec)?;
    let rhs_poisson = area * poisson_constant(n, alpha)? * nonlocal_average(&u, alpha, big_r, spec)?;
    Ok(Representation {
        lhs,
        rhs_green,
        rhs_poisson,
    })
}
