//! Adaptive quadrature for integrands with algebraic endpoint singularities.
//!
//! Every panel is integrated with a Gauss-Jacobi rule whose weight absorbs
//! the declared singularities at that panel's ends; interior panels reduce to
//! Gauss-Legendre. Panels are bisected in order of decreasing error estimate
//! (difference between the N- and 2N-point rules) until the global target
//! is met or the subdivision budget runs out.

use std::cell::{Cell, RefCell};
use std::collections::BinaryHeap;
use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod jacobi;
pub(crate) mod pv;

pub use pv::{integrate_pv_symmetric, integrate_pv_truncated};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub gauss_nodes: usize,
    /// Radius of the innermost ball in principal-value integrals.
    pub pv_cutoff_delta: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdivisions: 400,
            gauss_nodes: 10,
            pv_cutoff_delta: 0.05,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::out_of_range("rel_tol", self.rel_tol, "must be positive"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::out_of_range("abs_tol", self.abs_tol, "must be nonnegative"));
        }
        if self.gauss_nodes < 4 {
            return Err(Error::out_of_range(
                "gauss_nodes",
                self.gauss_nodes as f64,
                "at least 4 nodes per panel are required",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::out_of_range("max_subdivisions", 0.0, "must be positive"));
        }
        if !(self.pv_cutoff_delta > 0.0) {
            return Err(Error::out_of_range(
                "pv_cutoff_delta",
                self.pv_cutoff_delta,
                "must be positive",
            ));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Integrand on `[a, b]` behaving like `(t-a)^{-μ_a}` and `(b-t)^{-μ_b}` at
/// the ends, optionally with interior points `c` where it behaves like
/// `|t-c|^{-μ}` (or merely has a kink, `μ = 0`).
pub struct Integrand1D<F> {
    f: F,
    a: f64,
    b: f64,
    mu_a: f64,
    mu_b: f64,
    breaks: Vec<(f64, f64)>,
}

impl<F: Fn(f64) -> f64> Integrand1D<F> {
    pub fn new(f: F, a: f64, b: f64) -> Self {
        Self {
            f,
            a,
            b,
            mu_a: 0.0,
            mu_b: 0.0,
            breaks: Vec::new(),
        }
    }

    pub fn singular_at_a(mut self, mu: f64) -> Self {
        self.mu_a = mu;
        self
    }

    pub fn singular_at_b(mut self, mu: f64) -> Self {
        self.mu_b = mu;
        self
    }

    /// Split at `c` with singularity exponent `mu`; ignored unless `c` lies strictly inside.
    pub fn breakpoint(mut self, c: f64, mu: f64) -> Self {
        if c > self.a.min(self.b) && c < self.a.max(self.b) && c.is_finite() {
            self.breaks.push((c, mu));
        }
        self
    }

    pub fn breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        for c in points {
            self = self.breakpoint(c, 0.0);
        }
        self
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub panels: usize,
}

impl Quadrature {
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NoConvergence {
                estimate: self.value,
                error_bound: self.error,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    x0: f64,
    x1: f64,
    mu_l: f64,
    mu_r: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn check_exponent(name: &'static str, mu: f64) -> Result<()> {
    if mu.is_finite() && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::out_of_range(
            name,
            mu,
            "singularity exponent must be below 1 for integrability",
        ))
    }
}

fn eval_panel<F: Fn(f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    mu_l: f64,
    mu_r: f64,
    nodes: usize,
) -> Result<Panel> {
    let half = 0.5 * (x1 - x0);
    let rule_n = jacobi::cached(nodes, -mu_r, -mu_l);
    let rule_2n = jacobi::cached(2 * nodes, -mu_r, -mu_l);
    let mut bad = None;
    let mut smooth = |xi: f64| {
        let dl = half * (1.0 + xi);
        let dr = half * (1.0 - xi);
        let t = if xi <= 0.0 { x0 + dl } else { x1 - dr };
        let mut g = f(t);
        if mu_l != 0.0 {
            g *= dl.powf(mu_l);
        }
        if mu_r != 0.0 {
            g *= dr.powf(mu_r);
        }
        if !g.is_finite() && bad.is_none() {
            bad = Some(t);
        }
        g
    };
    let scale = half.powf(1.0 - mu_l - mu_r);
    let q1 = scale * rule_n.apply(&mut smooth);
    let q2 = scale * rule_2n.apply(&mut smooth);
    if let Some(t) = bad {
        return Err(Error::Singular(format!("integrand is not finite at t = {t}")));
    }
    Ok(Panel {
        x0,
        x1,
        mu_l,
        mu_r,
        value: q2,
        error: (q2 - q1).abs(),
    })
}

/// Integrate, reporting the best estimate even when the target is missed.
pub fn integrate_report<F: Fn(f64) -> f64>(
    f: &Integrand1D<F>,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    check_exponent("mu_a", f.mu_a)?;
    check_exponent("mu_b", f.mu_b)?;
    for &(_, mu) in &f.breaks {
        check_exponent("breakpoint mu", mu)?;
    }
    if !(f.a.is_finite() && f.b.is_finite()) {
        return Err(Error::BadWindow {
            lo: f.a,
            hi: f.b,
            reason: "integration limits must be finite".into(),
        });
    }
    if f.a == f.b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            converged: true,
            panels: 0,
        });
    }
    if f.a > f.b {
        let mut q = adapt(&f.f, f.b, f.a, f.mu_b, f.mu_a, &f.breaks, spec)?;
        q.value = -q.value;
        return Ok(q);
    }
    adapt(&f.f, f.a, f.b, f.mu_a, f.mu_b, &f.breaks, spec)
}

fn adapt<F: Fn(f64) -> f64>(
    func: &F,
    a: f64,
    b: f64,
    mu_a: f64,
    mu_b: f64,
    breaks: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    let mut cuts: Vec<(f64, f64)> = Vec::with_capacity(breaks.len() + 2);
    cuts.push((a, mu_a));
    let mut inner = breaks.to_vec();
    inner.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (c, mu) in inner {
        match cuts.last_mut() {
            Some(last) if c <= last.0 => last.1 = last.1.max(mu),
            _ => cuts.push((c, mu)),
        }
    }
    if cuts.last().map(|l| l.0 >= b).unwrap_or(false) {
        cuts.pop();
    }
    cuts.push((b, mu_b));

    let nodes = spec.gauss_nodes.max(4);
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for w in cuts.windows(2) {
        heap.push(eval_panel(func, w[0].0, w[1].0, w[0].1, w[1].1, nodes)?);
    }
    let budget = spec.max_subdivisions.max(heap.len());
    loop {
        let (value, error, magnitude) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0, 0.0), |(v, e, m), p| (v + p.value, e + p.error, m + p.value.abs()));
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        let floor = 50.0 * f64::EPSILON * magnitude;
        let panels = heap.len() + frozen.len();
        if error <= target || error <= floor || heap.is_empty() || panels >= budget {
            let converged = error <= target || error <= floor;
            return Ok(Quadrature {
                value,
                error,
                converged,
                panels,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.x0 + worst.x1);
        if !(mid > worst.x0 && mid < worst.x1) || (worst.x1 - worst.x0) < 1e-15 * worst.x0.abs().max(worst.x1.abs()) {
            frozen.push(worst);
            continue;
        }
        heap.push(eval_panel(func, worst.x0, mid, worst.mu_l, 0.0, nodes)?);
        heap.push(eval_panel(func, mid, worst.x1, 0.0, worst.mu_r, nodes)?);
    }
}

/// Integrate to the tolerances of `spec`; `NoConvergence` carries the best estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: &Integrand1D<F>, spec: &QuadratureSpec) -> Result<f64> {
    integrate_report(f, spec)?.into_result()
}

/// Smooth integrand on a finite interval.
pub fn integrate_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate(&Integrand1D::new(f, a, b), spec)
}

/// Collects the convergence state of inner integrals evaluated inside an
/// outer integrand, where errors cannot be propagated directly.
#[derive(Debug, Default)]
pub struct NestedStatus {
    failed: Cell<bool>,
    error: RefCell<Option<Error>>,
}

impl NestedStatus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Value of an inner integral; remembers non-convergence and hard errors.
    pub fn value(&self, q: Result<Quadrature>) -> f64 {
        match q {
            Ok(q) => {
                if !q.converged {
                    self.failed.set(true);
                }
                q.value
            }
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    pub fn fail(&self) {
        self.failed.set(true);
    }

    /// Combine with the outer result.
    pub fn finish(self, outer: Result<Quadrature>) -> Result<Quadrature> {
        if let Some(e) = self.error.into_inner() {
            return Err(e);
        }
        let mut q = outer?;
        if self.failed.get() {
            q.converged = false;
        }
        Ok(q)
    }
}
