//! Radial scalar fields sampled on a positive grid.
//!
//! Between the first and last radius a [`RadialFunction`] is a monotone
//! piecewise cubic in `log r`. Strictly positive samples are interpolated
//! as `log value`, so power laws are reproduced exactly; data with zeros or
//! sign changes are interpolated as plain values. Beyond the last radius the
//! function follows an explicit power-law tail `c r^{-σ}` (or vanishes), and
//! below the first radius an inner extension policy applies.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::{csv_header_comment, fmt_f64, to_json_pretty, SCHEMA_VERSION};

pub const MIN_SAMPLES: usize = 8;

/// Window and resolution of the grid used by the built-in experiments.
pub const DEFAULT_GRID: GridSpec = GridSpec {
    r_min: 1e-3,
    r_max: 1e4,
    points: 256,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn radii(&self) -> Vec<f64> {
        log_grid(self.r_min, self.r_max, self.points)
    }
}

/// `points` radii equally spaced in `log r`, endpoints exact.
pub fn log_grid(r_min: f64, r_max: f64, points: usize) -> Vec<f64> {
    assert!(r_min > 0.0 && r_max > r_min && points >= 2);
    // measured from the geometric centre so that symmetric windows hit 1 exactly
    let centre = (r_min * r_max).sqrt();
    let ratio = r_max / r_min;
    let m = (points - 1) as f64;
    let mut out: Vec<f64> = (0..points)
        .map(|i| centre * ratio.powf((2.0 * i as f64 - m) / (2.0 * m)))
        .collect();
    out[0] = r_min;
    out[points - 1] = r_max;
    out
}

/// Merge radius sets, dropping points closer than `rel_gap` (relative) to a kept neighbour.
pub fn merge_grids(parts: &[&[f64]], rel_gap: f64) -> Vec<f64> {
    let mut all: Vec<f64> = parts
        .iter()
        .flat_map(|p| p.iter().copied())
        .filter(|r| r.is_finite() && *r > 0.0)
        .collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for r in all {
        match out.last() {
            Some(&last) if r <= last * (1.0 + rel_gap) => {}
            _ => out.push(r),
        }
    }
    out
}

/// Power-law behaviour `c r^{-σ}` beyond the last grid radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub sigma: f64,
    pub c: f64,
}

/// Extension below the first grid radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inner {
    /// Hold the first sample.
    Constant,
    Zero,
    /// `c r^{exponent}`.
    Power { exponent: f64, c: f64 },
    /// `value + curvature r²`, the even extension of a function smooth at the origin.
    Quadratic { value: f64, curvature: f64 },
}

/// How [`make_radial`] builds the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// Identically zero beyond the last sample.
    Zero,
    /// `r^{-σ}` decay with the coefficient chosen to match the last sample.
    Matched { sigma: f64 },
    Explicit(Tail),
}

/// How [`make_radial`] builds the inner extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerPolicy {
    Constant,
    Zero,
    /// `r^{e}` behaviour with the coefficient chosen to match the first sample.
    Matched { exponent: f64 },
    Explicit { exponent: f64, c: f64 },
    /// `a + b r²` matching the first sample and the slope there.
    Even,
    ExplicitQuadratic { value: f64, curvature: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Vec<f64>,
    log_grid: Vec<f64>,
    values: Vec<f64>,
    /// Interpolated ordinate: `ln value` when every sample is positive.
    log_values: bool,
    ordinate: Vec<f64>,
    /// d ordinate / d log r at the nodes.
    slopes: Vec<f64>,
    tail: Option<Tail>,
    inner: Inner,
}

/// Build a radial function from `(radius, value)` samples in any order.
pub fn make_radial(
    samples: &[(f64, f64)],
    tail: TailPolicy,
    inner: InnerPolicy,
) -> Result<RadialFunction> {
    let mut sorted = samples.to_vec();
    for &(r, v) in &sorted {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::out_of_range("radius", r, "radii must be positive and finite"));
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteValue(r));
        }
    }
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (grid, values): (Vec<f64>, Vec<f64>) = sorted.into_iter().unzip();
    RadialFunction::new(grid, values, tail, inner)
}

impl RadialFunction {
    /// `grid` must be strictly increasing.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, tail: TailPolicy, inner: InnerPolicy) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Parse(format!(
                "{} radii but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                required: MIN_SAMPLES,
                got: grid.len(),
            });
        }
        for (i, (&r, &v)) in grid.iter().zip(&values).enumerate() {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::out_of_range("radius", r, "radii must be positive and finite"));
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(r));
            }
            if i > 0 && r <= grid[i - 1] {
                return Err(if r == grid[i - 1] {
                    Error::DuplicateRadius(r)
                } else {
                    Error::out_of_range("radius", r, "grid must be strictly increasing")
                });
            }
        }
        let last = grid.len() - 1;
        let tail = match tail {
            TailPolicy::Zero => None,
            TailPolicy::Matched { sigma } => Some(Tail {
                sigma,
                c: values[last] * grid[last].powf(sigma),
            }),
            TailPolicy::Explicit(t) => Some(t),
        };
        if let Some(t) = tail {
            if !(t.sigma.is_finite() && t.c.is_finite()) {
                return Err(Error::out_of_range("tail", t.sigma, "tail must be finite"));
            }
        }
        let inner_value = match inner {
            InnerPolicy::Constant | InnerPolicy::Even => Inner::Constant,
            InnerPolicy::Zero => Inner::Zero,
            InnerPolicy::Matched { exponent } => Inner::Power {
                exponent,
                c: values[0] * grid[0].powf(-exponent),
            },
            InnerPolicy::Explicit { exponent, c } => Inner::Power { exponent, c },
            InnerPolicy::ExplicitQuadratic { value, curvature } => Inner::Quadratic { value, curvature },
        };
        let log_grid: Vec<f64> = grid.iter().map(|r| r.ln()).collect();
        let mut out = Self::assemble(grid, log_grid, values, tail, inner_value);
        if inner == InnerPolicy::Even {
            let r0 = out.grid[0];
            let curvature = out.derivative(r0) / (2.0 * r0);
            out.inner = Inner::Quadratic {
                value: out.values[0] - curvature * r0 * r0,
                curvature,
            };
        }
        Ok(out)
    }

    fn assemble(grid: Vec<f64>, log_grid: Vec<f64>, values: Vec<f64>, tail: Option<Tail>, inner: Inner) -> Self {
        let log_values = values.iter().all(|&v| v > 0.0);
        let ordinate: Vec<f64> = if log_values {
            values.iter().map(|v| v.ln()).collect()
        } else {
            values.clone()
        };
        let slopes = monotone_slopes(&log_grid, &ordinate);
        Self {
            grid,
            log_grid,
            values,
            log_values,
            ordinate,
            slopes,
            tail,
            inner,
        }
    }

    /// Sample `f` on `grid`.
    pub fn from_fn(
        grid: &[f64],
        f: impl Fn(f64) -> f64,
        tail: TailPolicy,
        inner: InnerPolicy,
    ) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid.to_vec(), values, tail, inner)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn r_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    pub fn inner(&self) -> Inner {
        self.inner
    }

    /// Decay exponent at infinity; `+∞` for a vanishing tail.
    pub fn tail_sigma(&self) -> f64 {
        match self.tail {
            Some(t) if t.c != 0.0 => t.sigma,
            _ => f64::INFINITY,
        }
    }

    /// Smallest radius beyond which the function vanishes identically, if any.
    pub fn support_end(&self) -> Option<f64> {
        match self.tail {
            Some(t) if t.c != 0.0 => None,
            _ => Some(self.r_max()),
        }
    }

    /// Largest radius below which the function vanishes identically, if any.
    pub fn support_start(&self) -> Option<f64> {
        match self.inner {
            Inner::Zero => Some(self.r_min()),
            Inner::Power { c, .. } if c == 0.0 => Some(self.r_min()),
            Inner::Constant if self.values[0] == 0.0 => Some(self.r_min()),
            Inner::Quadratic { value, curvature } if value == 0.0 && curvature == 0.0 => Some(self.r_min()),
            _ => None,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r < self.grid[0] {
            return match self.inner {
                Inner::Constant => self.values[0],
                Inner::Zero => 0.0,
                Inner::Power { exponent, c } => {
                    if exponent == 0.0 {
                        c
                    } else {
                        c * r.powf(exponent)
                    }
                }
                Inner::Quadratic { value, curvature } => value + curvature * r * r,
            };
        }
        let last = self.grid.len() - 1;
        if r > self.grid[last] {
            return match self.tail {
                Some(t) => t.c * r.powf(-t.sigma),
                None => 0.0,
            };
        }
        let i = self.cell(r);
        if r == self.grid[i] {
            return self.values[i];
        }
        if r == self.grid[i + 1] {
            return self.values[i + 1];
        }
        let (t, h) = self.local(i, r);
        let dy = hermite_increment(
            t,
            h,
            self.ordinate[i + 1] - self.ordinate[i],
            self.slopes[i],
            self.slopes[i + 1],
        );
        if self.log_values {
            self.values[i] * dy.exp()
        } else {
            self.values[i] + dy
        }
    }

    /// du/dr of the interpolant (or of the extension outside the grid).
    pub fn derivative(&self, r: f64) -> f64 {
        let r = r.abs();
        if r < self.grid[0] {
            return match self.inner {
                Inner::Power { exponent, c } if exponent != 0.0 => c * exponent * r.powf(exponent - 1.0),
                Inner::Quadratic { curvature, .. } => 2.0 * curvature * r,
                _ => 0.0,
            };
        }
        let last = self.grid.len() - 1;
        if r > self.grid[last] {
            return match self.tail {
                Some(t) => -t.sigma * t.c * r.powf(-t.sigma - 1.0),
                None => 0.0,
            };
        }
        let i = self.cell(r);
        let (t, h) = self.local(i, r);
        let (y0, y1, d0, d1) = (
            self.ordinate[i],
            self.ordinate[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
        );
        let dydt = (6.0 * t * t - 6.0 * t) * y0
            + (3.0 * t * t - 4.0 * t + 1.0) * h * d0
            + (-6.0 * t * t + 6.0 * t) * y1
            + (3.0 * t * t - 2.0 * t) * h * d1;
        let dy = dydt / h / r;
        if self.log_values {
            self.eval(r) * dy
        } else {
            dy
        }
    }

    fn local(&self, i: usize, r: f64) -> (f64, f64) {
        let h = self.log_grid[i + 1] - self.log_grid[i];
        (((r.ln() - self.log_grid[i]) / h).clamp(0.0, 1.0), h)
    }

    fn cell(&self, r: f64) -> usize {
        let last = self.grid.len() - 1;
        let idx = self.grid.partition_point(|&g| g <= r);
        idx.clamp(1, last) - 1
    }

    /// Pointwise map of the sampled values with matching transforms of the
    /// extensions.
    fn map_parts(&self, values: Vec<f64>, tail: Option<Tail>, inner: Inner) -> Self {
        Self::assemble(self.grid.clone(), self.log_grid.clone(), values, tail, inner)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let values = self.values.iter().map(|v| v * factor).collect();
        let tail = self.tail.map(|t| Tail {
            sigma: t.sigma,
            c: t.c * factor,
        });
        let inner = match self.inner {
            Inner::Power { exponent, c } => Inner::Power {
                exponent,
                c: c * factor,
            },
            Inner::Quadratic { value, curvature } => Inner::Quadratic {
                value: value * factor,
                curvature: curvature * factor,
            },
            other => other,
        };
        self.map_parts(values, tail, inner)
    }

    /// `f^p` for nonnegative `f`.
    pub fn pow(&self, p: f64) -> Self {
        let values = self.values.iter().map(|v| v.powf(p)).collect();
        let tail = self.tail.map(|t| Tail {
            sigma: t.sigma * p,
            c: t.c.powf(p),
        });
        let inner = match self.inner {
            Inner::Power { exponent, c } => Inner::Power {
                exponent: exponent * p,
                c: c.powf(p),
            },
            // first order in r² about the origin
            Inner::Quadratic { value, curvature } if value > 0.0 => Inner::Quadratic {
                value: value.powf(p),
                curvature: p * value.powf(p - 1.0) * curvature,
            },
            Inner::Quadratic { curvature, .. } => Inner::Power {
                exponent: 2.0 * p,
                c: curvature.abs().powf(p),
            },
            other => other,
        };
        self.map_parts(values, tail, inner)
    }

    /// `r^a f(r)`.
    pub fn mul_power(&self, a: f64) -> Self {
        if a == 0.0 {
            return self.clone();
        }
        let values = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(r, v)| v * r.powf(a))
            .collect();
        let tail = self.tail.map(|t| Tail {
            sigma: t.sigma - a,
            c: t.c,
        });
        let inner = match self.inner {
            Inner::Constant => Inner::Power {
                exponent: a,
                c: self.values[0],
            },
            Inner::Zero => Inner::Zero,
            Inner::Power { exponent, c } => Inner::Power {
                exponent: exponent + a,
                c,
            },
            // leading term only
            Inner::Quadratic { value, .. } if value != 0.0 => Inner::Power { exponent: a, c: value },
            Inner::Quadratic { curvature, .. } => Inner::Power {
                exponent: a + 2.0,
                c: curvature,
            },
        };
        self.map_parts(values, tail, inner)
    }

    /// Replace the tail by a pure power law with the given exponent matched
    /// to the last sample.
    pub fn with_matched_tail(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        let last = self.grid.len() - 1;
        out.tail = Some(Tail {
            sigma,
            c: self.values[last] * self.grid[last].powf(sigma),
        });
        out
    }

    /// Evaluate on another grid, keeping the extension policies.
    pub fn resample(&self, grid: &[f64]) -> Result<Self> {
        let values: Vec<f64> = grid.iter().map(|&r| self.eval(r)).collect();
        let tail = match self.tail {
            Some(t) => TailPolicy::Explicit(t),
            None => TailPolicy::Zero,
        };
        let inner = match self.inner {
            Inner::Constant => InnerPolicy::Constant,
            Inner::Zero => InnerPolicy::Zero,
            Inner::Power { exponent, c } => InnerPolicy::Explicit { exponent, c },
            Inner::Quadratic { value, curvature } => InnerPolicy::ExplicitQuadratic { value, curvature },
        };
        Self::new(grid.to_vec(), values, tail, inner)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn sidecar(&self) -> Sidecar {
        let mut side = Sidecar {
            schema: SCHEMA_VERSION,
            tail: self.tail,
            inner: String::new(),
            inner_power: None,
            inner_quadratic: None,
        };
        side.inner = match self.inner {
            Inner::Constant => "constant",
            Inner::Zero => "zero",
            Inner::Power { exponent, c } => {
                side.inner_power = Some(InnerPower { exponent, c });
                "power"
            }
            Inner::Quadratic { value, curvature } => {
                side.inner_quadratic = Some(InnerQuadratic { value, curvature });
                "quadratic"
            }
        }
        .to_string();
        side
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = csv_header_comment();
        s.push_str("\nr,value\n");
        for (r, v) in self.grid.iter().zip(&self.values) {
            s.push_str(&fmt_f64(*r));
            s.push(',');
            s.push_str(&fmt_f64(*v));
            s.push('\n');
        }
        s
    }

    /// Write `path` (CSV) and its JSON sidecar next to it.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        fs::write(path, self.to_csv_string())?;
        let side = sidecar_path(path);
        fs::write(&side, to_json_pretty(&self.sidecar())? + "\n")?;
        Ok(side)
    }

    /// Read a CSV written by [`RadialFunction::write`]. A missing sidecar
    /// means constant inner extension and zero tail.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "value" {
            return Err(Error::Parse(format!(
                "expected header `r,value`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
            };
            samples.push((parse(&rec[0])?, parse(&rec[1])?));
        }
        let side = sidecar_path(path);
        let sidecar = if side.exists() {
            serde_json::from_str::<Sidecar>(&fs::read_to_string(&side)?)?
        } else {
            Sidecar {
                schema: SCHEMA_VERSION,
                tail: None,
                inner: "constant".into(),
                inner_power: None,
                inner_quadratic: None,
            }
        };
        let (tail, inner) = sidecar.policies()?;
        make_radial(&samples, tail, inner)
    }
}

/// JSON sidecar describing the extensions of a serialized [`RadialFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub tail: Option<Tail>,
    pub inner: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_power: Option<InnerPower>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_quadratic: Option<InnerQuadratic>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerPower {
    pub exponent: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerQuadratic {
    pub value: f64,
    pub curvature: f64,
}

impl Sidecar {
    pub fn policies(&self) -> Result<(TailPolicy, InnerPolicy)> {
        let tail = match self.tail {
            Some(t) => TailPolicy::Explicit(t),
            None => TailPolicy::Zero,
        };
        let inner = match (self.inner.as_str(), self.inner_power, self.inner_quadratic) {
            ("constant", ..) => InnerPolicy::Constant,
            ("zero", ..) => InnerPolicy::Zero,
            ("even", ..) => InnerPolicy::Even,
            ("power", Some(p), _) => InnerPolicy::Explicit {
                exponent: p.exponent,
                c: p.c,
            },
            ("quadratic", _, Some(q)) => InnerPolicy::ExplicitQuadratic {
                value: q.value,
                curvature: q.curvature,
            },
            (other, ..) => {
                return Err(Error::Parse(format!(
                    "unknown inner policy `{other}` (expected constant, zero, even, \
                     power with inner_power or quadratic with inner_quadratic)"
                )))
            }
        };
        Ok((tail, inner))
    }
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Cubic Hermite interpolant minus its left value, so that flat data stay
/// exactly flat.
fn hermite_increment(t: f64, h: f64, dy: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (3.0 * t2 - 2.0 * t3) * dy + h * ((t3 - 2.0 * t2 + t) * d0 + (t3 - t2) * d1)
}

/// Derivative at `xs[at]` of the Lagrange polynomial through `(xs, ys)`.
fn lagrange_derivative(xs: &[f64], ys: &[f64], at: usize) -> f64 {
    let x0 = xs[at];
    let mut d = 0.0;
    for j in 0..xs.len() {
        let coef = if j == at {
            xs.iter()
                .enumerate()
                .filter(|&(m, _)| m != at)
                .map(|(_, &xm)| 1.0 / (x0 - xm))
                .sum::<f64>()
        } else {
            let mut num = 1.0;
            let mut den = 1.0;
            for (m, &xm) in xs.iter().enumerate() {
                if m != j {
                    den *= xs[j] - xm;
                }
                if m != j && m != at {
                    num *= x0 - xm;
                }
            }
            num / den
        };
        d += coef * ys[j];
    }
    d
}

/// Node slopes for the monotone cubic: five-point estimates limited so that
/// every cell between strictly monotone data stays monotone.
///
/// At a strict data extremum the estimate is kept (bounded by three times the
/// steeper neighbouring secant), so the cells on either side may carry the
/// interior extremum of the underlying function.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let secant: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let width = 5.min(n);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let raw = lagrange_derivative(&x[start..start + width], &y[start..start + width], i - start);
            let left = (i > 0).then(|| secant[i - 1]);
            let right = (i < n - 1).then(|| secant[i]);
            limit_slope(raw, left, right)
        })
        .collect()
}

fn limit_slope(d: f64, left: Option<f64>, right: Option<f64>) -> f64 {
    match (left, right) {
        (Some(sl), Some(sr)) => {
            if sl * sr > 0.0 {
                if d * sr <= 0.0 {
                    0.0
                } else {
                    d.signum() * d.abs().min(3.0 * sl.abs().min(sr.abs()))
                }
            } else if sl == 0.0 || sr == 0.0 {
                0.0
            } else {
                d.signum() * d.abs().min(3.0 * sl.abs().max(sr.abs()))
            }
        }
        (Some(s), None) | (None, Some(s)) => {
            if d * s <= 0.0 {
                0.0
            } else {
                d.signum() * d.abs().min(3.0 * s.abs())
            }
        }
        (None, None) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_law(sigma: f64) -> RadialFunction {
        RadialFunction::from_fn(
            &log_grid(0.01, 100.0, 64),
            |r| r.powf(-sigma),
            TailPolicy::Matched { sigma },
            InnerPolicy::Constant,
        )
        .unwrap()
    }

    #[test]
    fn power_law_matches_its_tail() {
        let u = power_law(2.0);
        assert!((u.eval(5.0) - 0.04).abs() < 1e-8 * 0.04);
        assert!((u.eval(500.0) - 4e-6).abs() < 1e-12 * 4e-6 + 1e-20);
        for r in [0.013, 0.7, 3.3, 77.0] {
            let rel = (u.eval(r) - r.powi(-2)).abs() / r.powi(-2);
            assert!(rel < 1e-12, "r={r} rel={rel}");
        }
    }

    #[test]
    fn empty_and_short_inputs_are_rejected() {
        assert!(matches!(
            make_radial(&[], TailPolicy::Zero, InnerPolicy::Constant),
            Err(Error::TooFewSamples { .. })
        ));
        let few: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 1.0)).collect();
        assert!(make_radial(&few, TailPolicy::Zero, InnerPolicy::Constant).is_err());
    }

    #[test]
    fn duplicate_and_non_finite_samples() {
        let mut s: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0)).collect();
        s.push((3.0, 2.0));
        assert_eq!(
            make_radial(&s, TailPolicy::Zero, InnerPolicy::Constant).unwrap_err(),
            Error::DuplicateRadius(3.0)
        );
        let mut s: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0)).collect();
        s[4].1 = f64::NAN;
        assert_eq!(
            make_radial(&s, TailPolicy::Zero, InnerPolicy::Constant).unwrap_err(),
            Error::NonFiniteValue(5.0)
        );
    }

    #[test]
    fn reproduces_grid_samples_exactly() {
        let grid = log_grid(0.01, 100.0, 65);
        let u = RadialFunction::from_fn(
            &grid,
            |r| 1.0 / (1.0 + r * r),
            TailPolicy::Explicit(Tail { sigma: 2.0, c: 1.0 }),
            InnerPolicy::Constant,
        )
        .unwrap();
        assert_eq!(grid[32], 1.0);
        assert_eq!(u.eval(1.0), 0.5);
        for (r, v) in grid.iter().zip(u.values()) {
            assert_eq!(u.eval(*r), *v);
        }
    }

    #[test]
    fn unsorted_samples_are_sorted() {
        let s: Vec<(f64, f64)> = (1..=10).rev().map(|i| (i as f64, i as f64)).collect();
        let u = make_radial(&s, TailPolicy::Zero, InnerPolicy::Constant).unwrap();
        assert_eq!(u.r_min(), 1.0);
        assert_eq!(u.eval(7.0), 7.0);
    }

    #[test]
    fn extensions() {
        let grid = log_grid(1.0, 2.0, 16);
        let u = RadialFunction::from_fn(&grid, |r| r, TailPolicy::Zero, InnerPolicy::Zero).unwrap();
        assert_eq!(u.eval(0.5), 0.0);
        assert_eq!(u.eval(3.0), 0.0);
        assert_eq!(u.support_end(), Some(2.0));
        let v = RadialFunction::from_fn(
            &grid,
            |r| r * r,
            TailPolicy::Matched { sigma: 1.0 },
            InnerPolicy::Matched { exponent: 2.0 },
        )
        .unwrap();
        assert!((v.eval(0.5) - 0.25).abs() < 1e-15);
        // c = 2² · 2 from the last sample
        assert!((v.eval(4.0) - 2.0).abs() < 1e-15);
        assert!(v.support_end().is_none());
    }

    #[test]
    fn value_transforms_carry_extensions() {
        let u = power_law(1.0);
        let w = u.pow(2.0).mul_power(1.0).scale(3.0);
        for r in [0.001, 0.5, 2.0, 1e3] {
            let u_r = u.eval(r);
            let expected = 3.0 * r * u_r * u_r;
            assert!(
                (w.eval(r) - expected).abs() <= 1e-12 * expected.abs(),
                "r={r}: {} vs {expected}",
                w.eval(r)
            );
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let grid = log_grid(0.01, 100.0, 200);
        let u = RadialFunction::from_fn(&grid, |r| (-r).exp(), TailPolicy::Zero, InnerPolicy::Constant)
            .unwrap();
        for r in [0.05, 0.3, 1.7, 4.0] {
            let h = 1e-6 * r;
            let fd = (u.eval(r + h) - u.eval(r - h)) / (2.0 * h);
            assert!((u.derivative(r) - fd).abs() < 1e-6 * fd.abs().max(1e-3));
            assert!((u.derivative(r) + (-r).exp()).abs() < 1e-5);
        }
    }

    #[test]
    fn csv_and_sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let u = power_law(2.0).mul_power(0.5);
        let side = u.write(&path).unwrap();
        assert!(side.ends_with("u.json"));
        let json = fs::read_to_string(&side).unwrap();
        assert!(json.contains("\"sigma\""));
        assert!(json.contains("\"inner\": \"constant\"") || json.contains("\"inner\": \"power\""));
        let back = RadialFunction::read(&path).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn even_extension_is_smooth_at_the_first_sample() {
        let grid = log_grid(1e-2, 10.0, 120);
        let u = RadialFunction::from_fn(&grid, |r| 1.0 / (1.0 + r * r), TailPolicy::Zero, InnerPolicy::Even)
            .unwrap();
        let Inner::Quadratic { value, curvature } = u.inner() else {
            panic!("expected quadratic inner extension");
        };
        assert!((value - 1.0).abs() < 1e-7);
        assert!((curvature + 1.0).abs() < 1e-3);
        for r in [0.0, 1e-3, 5e-3] {
            assert!((u.eval(r) - 1.0 / (1.0 + r * r)).abs() < 1e-7);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("even.csv");
        u.write(&path).unwrap();
        assert_eq!(RadialFunction::read(&path).unwrap(), u);
    }

    #[test]
    fn mixed_sign_data_uses_plain_values() {
        let grid = log_grid(0.1, 10.0, 40);
        let u = RadialFunction::from_fn(&grid, |r| r.ln(), TailPolicy::Zero, InnerPolicy::Constant).unwrap();
        for r in [0.15, 0.9, 1.1, 7.0] {
            assert!((u.eval(r) - r.ln()).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn deterministic_evaluation() {
        let u = power_law(1.3);
        let a: Vec<u64> = (1..200).map(|i| u.eval(0.011 * i as f64).to_bits()).collect();
        let b: Vec<u64> = (1..200).map(|i| u.eval(0.011 * i as f64).to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn merged_grid_is_sorted_and_deduplicated() {
        let g = merge_grids(&[&[1.0, 2.0, 3.0], &[2.0 + 1e-15, 0.5, 4.0]], 1e-9);
        assert_eq!(g, vec![0.5, 1.0, 2.0, 3.0, 4.0]);
    }
}
