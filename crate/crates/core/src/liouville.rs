//! Parameter regions where the Hénon-Lane-Emden system has no nontrivial
//! nonnegative solution, the exponent recursion of the scaling-sphere
//! argument, Kelvin defects and Picard iteration of the integral system.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::averages::{decay_exponents, fit_decay};
use crate::error::{Error, Result};
use crate::kernels::{kelvin, riesz_potential_report};
use crate::output::{csv_header_comment, fmt_f64};
use crate::params::{validate, ProblemParams, ValidatedParams};
use crate::quad::QuadratureSpec;
use crate::radial::{log_grid, InnerPolicy, RadialFunction, TailPolicy, DEFAULT_GRID};

/// Relative tolerance for deciding that an exponent sits on a boundary of
/// the subcritical box.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "Nonexistence_Thm12_i")]
    Thm12I,
    #[serde(rename = "Nonexistence_Thm12_ii")]
    Thm12Ii,
    #[serde(rename = "Nonexistence_Thm12_iii")]
    Thm12Iii,
    #[serde(rename = "Nonexistence_Thm13_subcritical")]
    Thm13Subcritical,
    #[serde(rename = "Nonexistence_Thm13_highorder")]
    Thm13HighOrder,
    #[serde(rename = "CriticalPair_excluded")]
    CriticalPairExcluded,
    #[serde(rename = "OutsideTheorems")]
    OutsideTheorems,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Thm12I => "Nonexistence_Thm12_i",
            Verdict::Thm12Ii => "Nonexistence_Thm12_ii",
            Verdict::Thm12Iii => "Nonexistence_Thm12_iii",
            Verdict::Thm13Subcritical => "Nonexistence_Thm13_subcritical",
            Verdict::Thm13HighOrder => "Nonexistence_Thm13_highorder",
            Verdict::CriticalPairExcluded => "CriticalPair_excluded",
            Verdict::OutsideTheorems => "OutsideTheorems",
        }
    }

    /// The verdict for the system with `u` and `v` exchanged.
    pub fn swap_image(self) -> Self {
        match self {
            Verdict::Thm12Ii => Verdict::Thm12Iii,
            Verdict::Thm12Iii => Verdict::Thm12Ii,
            other => other,
        }
    }

    pub fn is_nonexistence(self) -> bool {
        !matches!(self, Verdict::CriticalPairExcluded | Verdict::OutsideTheorems)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub verdict: Verdict,
    pub reason: String,
    /// Every condition that holds, in checking order; `verdict` is the first.
    pub holds: Vec<Verdict>,
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= BOUNDARY_TOL * x.abs().max(y.abs()).max(1.0)
}

/// Checks, in order: high order in dimension `n ≥ 2`; `p = q = 1`; the two
/// decay-rate conditions for `p, q ≥ 1`, `pq > 1`; the subcritical box with
/// the critical pair removed.
pub fn classify(params: &ValidatedParams) -> RegionVerdict {
    let pr = params.params();
    let n = pr.dim();
    let (ou, ov) = (pr.order_u(), pr.order_v());
    let (p, q) = (pr.p, pr.q);
    let mut found: Vec<(Verdict, String)> = Vec::new();

    if params.high_order && pr.n >= 2 {
        found.push((
            Verdict::Thm13HighOrder,
            format!("max{{2k+alpha, 2l+beta}} = {} >= n = {} and n >= 2", ou.max(ov), pr.n),
        ));
    }
    if p == 1.0 && q == 1.0 {
        found.push((Verdict::Thm12I, "p = q = 1".to_string()));
    }
    let pq = pr.pq();
    if p >= 1.0 && q >= 1.0 && pq > 1.0 && !near(pq, 1.0) {
        if let Ok((su, sv)) = decay_exponents(pr) {
            if su > n - ou && !near(su, n - ou) {
                found.push((
                    Verdict::Thm12Ii,
                    format!(
                        "pq = {pq} > 1 and (2k+alpha+a+p(2l+beta+b))/(pq-1) = {su} > n-2k-alpha = {}",
                        n - ou
                    ),
                ));
            }
            if sv > n - ov && !near(sv, n - ov) {
                found.push((
                    Verdict::Thm12Iii,
                    format!(
                        "pq = {pq} > 1 and (2l+beta+b+q(2k+alpha+a))/(pq-1) = {sv} > n-2l-beta = {}",
                        n - ov
                    ),
                ));
            }
        }
    }
    if params.subcritical_order {
        let (pc, qc) = pr.critical_pair();
        let p_in = p > 0.0 && (p < pc || near(p, pc));
        let q_in = q > 0.0 && (q < qc || near(q, qc));
        if p_in && q_in {
            if near(p, pc) && near(q, qc) {
                found.push((
                    Verdict::CriticalPairExcluded,
                    format!("(p, q) = ({p}, {q}) equals the critical pair ({pc}, {qc})"),
                ));
            } else {
                found.push((
                    Verdict::Thm13Subcritical,
                    format!("0 < p = {p} <= {pc} and 0 < q = {q} <= {qc}, (p, q) != ({pc}, {qc})"),
                ));
            }
        }
    }

    // a nonexistence result outranks the exclusion of the critical pair
    let first = found
        .iter()
        .find(|(v, _)| v.is_nonexistence())
        .or(found.first())
        .cloned();
    let (verdict, reason) = first.unwrap_or_else(|| {
        (
            Verdict::OutsideTheorems,
            format!("no theorem applies at n = {}, (p, q) = ({p}, {q})", pr.n),
        )
    });
    RegionVerdict {
        verdict,
        reason,
        holds: found.into_iter().map(|(v, _)| v).collect(),
    }
}

/// Validate and classify in one step.
pub fn classify_params(params: ProblemParams) -> Result<RegionVerdict> {
    Ok(classify(&validate(params)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCell {
    pub p: f64,
    pub q: f64,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub template: ProblemParams,
    pub p_range: [f64; 2],
    pub q_range: [f64; 2],
    pub resolution: usize,
    /// Row-major in `p`: cell `(i, j)` has `p = p_i`, `q = q_j`.
    pub cells: Vec<RegionCell>,
}

/// `resolution` points from `lo` to `hi` inclusive; a single point sits at `lo`.
pub fn linspace(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    if resolution == 1 {
        return vec![lo];
    }
    (0..resolution)
        .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
        .collect()
}

/// [`classify`] over a `resolution × resolution` grid of `(p, q)`.
pub fn region_map(
    template: &ProblemParams,
    p_range: [f64; 2],
    q_range: [f64; 2],
    resolution: usize,
) -> Result<RegionMap> {
    if resolution == 0 {
        return Err(Error::out_of_range("resolution", 0.0, "need at least one cell"));
    }
    for (field, [lo, hi]) in [("p_range", p_range), ("q_range", q_range)] {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::out_of_range(field, lo, "ranges must be positive with lo <= hi"));
        }
    }
    validate(*template)?;
    let ps = linspace(p_range[0], p_range[1], resolution);
    let qs = linspace(q_range[0], q_range[1], resolution);
    let pairs: Vec<(f64, f64)> = ps.iter().flat_map(|&p| qs.iter().map(move |&q| (p, q))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(p, q)| {
            let v = classify_params(ProblemParams { p, q, ..*template })?;
            Ok(RegionCell {
                p,
                q,
                verdict: v.verdict,
                reason: v.reason,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionMap {
        template: *template,
        p_range,
        q_range,
        resolution,
        cells,
    })
}

impl RegionMap {
    pub fn cell(&self, i: usize, j: usize) -> &RegionCell {
        &self.cells[i * self.resolution + j]
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(["p", "q", "verdict", "reason"])?;
        for c in &self.cells {
            w.write_record([fmt_f64(c.p), fmt_f64(c.q), c.verdict.name().to_string(), c.reason.clone()])?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok(format!("{}\n{}", csv_header_comment(), body))
    }
}

/// Checks that classifying the swapped system over the swapped grid gives
/// the mirrored verdicts: the set of conditions that hold maps onto itself
/// under `(ii) ↔ (iii)`, and so does the reported verdict unless both
/// decay conditions hold at once.
pub fn region_map_is_symmetric(map: &RegionMap) -> Result<bool> {
    let swapped = map.template.swapped();
    for c in &map.cells {
        let a = classify_params(ProblemParams { p: c.p, q: c.q, ..map.template })?;
        let b = classify_params(ProblemParams { p: c.q, q: c.p, ..swapped })?;
        let mut ha: Vec<Verdict> = a.holds.iter().map(|v| v.swap_image()).collect();
        let mut hb = b.holds.clone();
        ha.sort_by_key(|v| v.name());
        hb.sort_by_key(|v| v.name());
        if ha != hb {
            return Ok(false);
        }
        let both = a.holds.contains(&Verdict::Thm12Ii) && a.holds.contains(&Verdict::Thm12Iii);
        if !both && a.verdict.swap_image() != b.verdict {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitClass {
    DivergesToMinusInfinity,
    DivergesToPlusInfinity,
    Converges { limit: f64 },
    ArithmeticDecrease { decrement: f64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSequence {
    pub mu_u: Vec<f64>,
    pub mu_v: Vec<f64>,
    /// Behaviour of the even subsequence `μ_{u,2j}`.
    pub limit_class: LimitClass,
    pub limit_class_v: LimitClass,
    /// `n + 2k + α + 2a - p(n - 2l - β)`.
    pub tau: f64,
}

/// Two-step fixed point `(p(b+2l+β) + (a+2k+α))/(pq-1)` of the `u` exponents
/// and its mirror for `v`; `None` when `pq = 1`.
pub fn bootstrap_limits(params: &ProblemParams) -> Option<(f64, f64)> {
    let pq = params.pq();
    if pq == 1.0 {
        return None;
    }
    let au = params.a + params.order_u();
    let bv = params.b + params.order_v();
    Some(((params.p * bv + au) / (pq - 1.0), (params.q * au + bv) / (pq - 1.0)))
}

fn limit_class(pq: f64, seed: f64, limit: Option<f64>, decrement: f64) -> LimitClass {
    match limit {
        None if decrement > 0.0 => LimitClass::ArithmeticDecrease { decrement },
        None if decrement == 0.0 => LimitClass::Constant { value: seed },
        None => LimitClass::DivergesToPlusInfinity,
        Some(l) if pq < 1.0 => LimitClass::Converges { limit: l },
        Some(l) if seed < l => LimitClass::DivergesToMinusInfinity,
        Some(l) if seed > l => LimitClass::DivergesToPlusInfinity,
        Some(l) => LimitClass::Constant { value: l },
    }
}

/// `μ_{u,i+1} = p μ_{v,i} - (a+2k+α)`, `μ_{v,i+1} = q μ_{u,i} - (b+2l+β)`
/// from `μ_{u,0} = (n-2k-α)/2`, `μ_{v,0} = (n-2l-β)/2`, for `i < i_max`.
pub fn bootstrap(params: &ValidatedParams, i_max: usize) -> Result<ExponentSequence> {
    if !params.subcritical_order {
        return Err(Error::NotSubcritical);
    }
    if i_max < 2 {
        return Err(Error::out_of_range("i_max", i_max as f64, "need at least two steps"));
    }
    let pr = params.params();
    let n = pr.dim();
    let au = pr.a + pr.order_u();
    let bv = pr.b + pr.order_v();
    let mut mu_u = vec![0.5 * (n - pr.order_u())];
    let mut mu_v = vec![0.5 * (n - pr.order_v())];
    for i in 0..i_max {
        mu_u.push(pr.p * mu_v[i] - au);
        mu_v.push(pr.q * mu_u[i] - bv);
    }
    let limits = bootstrap_limits(pr);
    let pq = pr.pq();
    Ok(ExponentSequence {
        limit_class: limit_class(pq, mu_u[0], limits.map(|l| l.0), pr.p * bv + au),
        limit_class_v: limit_class(pq, mu_v[0], limits.map(|l| l.1), pr.q * au + bv),
        tau: n + pr.order_u() + 2.0 * pr.a - pr.p * (n - pr.order_v()),
        mu_u,
        mu_v,
    })
}

/// Relative tolerance, against `max |u|` on the sampled range, below which
/// a negative defect is ignored.
pub const DEFECT_TOL: f64 = 1e-8;
pub const DEFECT_POINTS: usize = 256;

#[derive(Debug, Clone, Serialize)]
pub struct KelvinDefect {
    pub lambda: f64,
    pub sigma: f64,
    #[serde(skip)]
    pub omega: RadialFunction,
    pub sup_abs: f64,
    pub negative_set: Vec<[f64; 2]>,
}

/// `ω(r) = (λ/r)^σ u(λ²/r) - u(r)` on a log grid in `(0, λ]`, with the
/// intervals where `ω < -tol`.
pub fn kelvin_defect(u: &RadialFunction, lambda: f64, sigma: f64) -> Result<KelvinDefect> {
    let k = kelvin(u, lambda, sigma)?;
    let lo = (lambda * lambda / u.r_max()).max(1e-4 * lambda).min(0.5 * lambda);
    let grid = log_grid(lo, lambda, DEFECT_POINTS);
    let values: Vec<f64> = grid.iter().map(|&r| k.eval(r) - u.eval(r)).collect();
    let scale = grid.iter().map(|&r| u.eval(r).abs()).fold(0.0, f64::max);
    let tol = DEFECT_TOL * scale;
    let mut negative_set: Vec<[f64; 2]> = Vec::new();
    let mut open: Option<f64> = None;
    for (&r, &w) in grid.iter().zip(&values) {
        match (w < -tol, open) {
            (true, None) => open = Some(r),
            (false, Some(start)) => {
                negative_set.push([start, r]);
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        negative_set.push([start, lambda]);
    }
    let sup_abs = values.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    let omega = RadialFunction::new(grid, values, TailPolicy::Zero, InnerPolicy::Constant)?;
    Ok(KelvinDefect {
        lambda,
        sigma,
        omega,
        sup_abs,
        negative_set,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PicardOutcome {
    CollapseToZero,
    BlowUp,
    Stationary,
    MaxIters,
}

pub const COLLAPSE_RATIO: f64 = 1e-8;
pub const BLOW_UP_RATIO: f64 = 1e8;
pub const STATIONARY_RESIDUAL: f64 = 1e-3;
/// Largest log-log deviation accepted when refitting a tail.
pub const TAIL_REFIT_RESIDUAL: f64 = 0.2;

#[derive(Debug, Clone, Serialize)]
pub struct PicardTrajectory {
    #[serde(skip)]
    pub iterates: Vec<(RadialFunction, RadialFunction)>,
    /// `[sup u, sup v]` for the initial pair and every iterate.
    pub sup_norms: Vec<[f64; 2]>,
    /// `max(|u_{m+1}-u_m|/|u_m|, |v_{m+1}-v_m|/|v_m|)` in the sup norm.
    pub residuals: Vec<f64>,
    pub outcome: PicardOutcome,
    /// Picard dynamics carry no theorem; outcomes are observations.
    pub exploratory: bool,
    pub converged: bool,
    pub warnings: Vec<String>,
}

fn rel_change(new: &RadialFunction, old: &RadialFunction) -> f64 {
    let scale = old.sup_norm();
    let diff = new
        .grid()
        .iter()
        .zip(new.values())
        .map(|(&r, &v)| (v - old.eval(r)).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / scale
    }
}

/// One application of the integral system: `I_{2k+α}(|y|^a v^p)`.
fn hie_step(
    v: &RadialFunction,
    weight: f64,
    power: f64,
    order: f64,
    n: u32,
    grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<(RadialFunction, bool)> {
    let source = v.pow(power).mul_power(weight);
    let sigma = source.tail_sigma();
    if sigma <= order {
        return Err(Error::DivergentConvolution {
            sigma,
            required: order,
        });
    }
    let rep = riesz_potential_report(&source, order, n, grid, spec)?;
    Ok((rep.u, rep.converged))
}

/// Replace the tail by a power law fitted over the last decade.
fn refit_tail(u: &RadialFunction) -> Result<Option<RadialFunction>> {
    if u.values().iter().all(|&v| v == 0.0) {
        return Ok(Some(u.clone()));
    }
    let hi = u.r_max();
    let fit = fit_decay(u, 0.1 * hi, hi)?;
    if fit.residual > TAIL_REFIT_RESIDUAL {
        return Ok(None);
    }
    Ok(Some(u.with_matched_tail(fit.fitted)))
}

/// `u_{m+1} = I_{2k+α}(|y|^a v_m^p)`, `v_{m+1} = I_{2l+β}(|y|^b u_m^q)` on the
/// default grid.
pub fn picard_iterate(
    params: &ValidatedParams,
    u0: &RadialFunction,
    v0: &RadialFunction,
    steps: usize,
    spec: &QuadratureSpec,
) -> Result<PicardTrajectory> {
    if !params.subcritical_order {
        return Err(Error::NotSubcritical);
    }
    for (name, f) in [("u0", u0), ("v0", v0)] {
        if f.values().iter().any(|&x| x < 0.0) {
            return Err(Error::out_of_range(name, f.values().iter().copied().fold(0.0, f64::min), "must be nonnegative"));
        }
    }
    let pr = params.params();
    let grid = DEFAULT_GRID.radii();
    let initial = u0.sup_norm().max(v0.sup_norm());
    let mut sup_norms = vec![[u0.sup_norm(), v0.sup_norm()]];
    let mut residuals = Vec::new();
    let mut warnings = Vec::new();
    let mut converged = true;
    let mut iterates = vec![(u0.clone(), v0.clone())];
    let mut outcome = None;

    for m in 0..steps {
        let (u, v) = iterates.last().cloned().expect("initial pair present");
        let (u_next, cu) = hie_step(&v, pr.a, pr.p, pr.order_u(), pr.n, &grid, spec)?;
        let (v_next, cv) = hie_step(&u, pr.b, pr.q, pr.order_v(), pr.n, &grid, spec)?;
        converged &= cu && cv;
        let (Some(u_next), Some(v_next)) = (refit_tail(&u_next)?, refit_tail(&v_next)?) else {
            warnings.push(format!("tail refit residual above {TAIL_REFIT_RESIDUAL} at step {}", m + 1));
            outcome = Some(PicardOutcome::MaxIters);
            break;
        };
        residuals.push(rel_change(&u_next, &u).max(rel_change(&v_next, &v)));
        let sup = [u_next.sup_norm(), v_next.sup_norm()];
        sup_norms.push(sup);
        iterates.push((u_next, v_next));
        let current = sup[0].max(sup[1]);
        if current < COLLAPSE_RATIO * initial || current == 0.0 {
            outcome = Some(PicardOutcome::CollapseToZero);
            break;
        }
        if current > BLOW_UP_RATIO * initial {
            outcome = Some(PicardOutcome::BlowUp);
            break;
        }
    }
    let outcome = outcome.unwrap_or(match residuals.last() {
        Some(&r) if r < STATIONARY_RESIDUAL => PicardOutcome::Stationary,
        _ => PicardOutcome::MaxIters,
    });
    Ok(PicardTrajectory {
        iterates,
        sup_norms,
        residuals,
        outcome,
        exploratory: true,
        converged,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(p: f64, q: f64) -> ProblemParams {
        ProblemParams {
            p,
            q,
            ..ProblemParams::default()
        }
    }

    fn verdict(p: ProblemParams) -> Verdict {
        classify_params(p).unwrap().verdict
    }

    #[test]
    fn worked_classifications() {
        assert_eq!(verdict(base(1.0, 1.0)), Verdict::Thm12I);
        assert_eq!(verdict(base(2.0, 2.0)), Verdict::CriticalPairExcluded);
        assert_eq!(verdict(base(1.5, 1.5)), Verdict::Thm13Subcritical);
        let high = ProblemParams {
            n: 2,
            k: 1,
            alpha: 0.5,
            beta: 0.5,
            ..base(1.0, 1.0)
        };
        assert_eq!(verdict(high), Verdict::Thm13HighOrder);
        assert_eq!(verdict(base(3.0, 3.0)), Verdict::OutsideTheorems);
    }

    #[test]
    fn reasons_carry_numbers() {
        let v = classify_params(base(2.0, 2.0)).unwrap();
        assert!(v.reason.contains("(2, 2)"), "{}", v.reason);
        let v = classify_params(base(1.5, 1.5)).unwrap();
        assert!(v.reason.contains("1.5") && v.reason.contains("<= 2"), "{}", v.reason);
    }

    #[test]
    fn decay_conditions_fire() {
        // n = 3, α = β = 1: σ_u = (1+p)/(pq-1) > 2 at p = q = 1.2
        let v = classify_params(base(1.2, 1.2)).unwrap();
        assert!(v.holds.contains(&Verdict::Thm12Ii));
        assert!(v.holds.contains(&Verdict::Thm12Iii));
        assert_eq!(v.verdict, Verdict::Thm12Ii);
    }

    #[test]
    fn weight_shift_moves_the_critical_pair() {
        let shifted = ProblemParams { a: 0.1, ..base(1.0, 1.0) };
        let (pc, qc) = shifted.critical_pair();
        assert!((pc - (3.0 + 1.0 + 0.2) / 2.0).abs() < 1e-15);
        assert_eq!(qc, 2.0);
        assert_eq!(verdict(ProblemParams { p: pc, q: qc, ..shifted }), Verdict::CriticalPairExcluded);
        assert_eq!(verdict(ProblemParams { p: 2.0, q: 2.0, ..shifted }), Verdict::Thm13Subcritical);
    }

    #[test]
    fn region_map_cells() {
        let map = region_map(&base(1.0, 1.0), [1.0, 3.0], [1.0, 3.0], 3).unwrap();
        assert_eq!(map.cell(1, 1).verdict, Verdict::CriticalPairExcluded);
        assert_eq!(map.cell(0, 0).verdict, Verdict::Thm12I);
        let single = region_map(&base(1.0, 1.0), [1.5, 1.5], [1.5, 1.5], 1).unwrap();
        assert_eq!(single.cells.len(), 1);
        assert_eq!(single.cells[0].verdict, verdict(base(1.5, 1.5)));
        let csv = map.to_csv_string().unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), "p,q,verdict,reason");
        assert_eq!(lines.count(), 9);
        assert!(region_map_is_symmetric(&map).unwrap());
    }

    #[test]
    fn worked_sequences() {
        let s = bootstrap(&validate(base(1.5, 1.5)).unwrap(), 4).unwrap();
        assert_eq!(s.mu_u[0], 1.0);
        assert!((s.mu_u[2] + 0.25).abs() < 1e-12);
        assert!((s.mu_u[4] + 3.0625).abs() < 1e-12);
        assert_eq!(s.limit_class, LimitClass::DivergesToMinusInfinity);

        let s = bootstrap(&validate(base(1.0, 1.0)).unwrap(), 10).unwrap();
        for j in 0..=5 {
            assert!((s.mu_u[2 * j] - (1.0 - 2.0 * j as f64)).abs() < 1e-12);
        }
        assert_eq!(s.limit_class, LimitClass::ArithmeticDecrease { decrement: 2.0 });

        let s = bootstrap(&validate(base(0.5, 0.5)).unwrap(), 4).unwrap();
        assert_eq!(s.limit_class, LimitClass::Converges { limit: -2.0 });
        assert_eq!(s.tau, 3.0 + 1.0 - 0.5 * 2.0);
    }

    #[test]
    fn bootstrap_rejects_high_order() {
        let high = ProblemParams {
            n: 2,
            k: 1,
            alpha: 0.5,
            beta: 0.5,
            ..base(1.0, 1.0)
        };
        assert_eq!(bootstrap(&validate(high).unwrap(), 4).unwrap_err(), Error::NotSubcritical);
        assert!(bootstrap(&validate(base(1.0, 1.0)).unwrap(), 1).is_err());
    }

    #[test]
    fn constant_defect_is_positive() {
        let u = RadialFunction::from_fn(
            &log_grid(1e-3, 1e3, 64),
            |_| 2.0,
            TailPolicy::Matched { sigma: 0.0 },
            InnerPolicy::Constant,
        )
        .unwrap();
        let d = kelvin_defect(&u, 1.0, 1.5).unwrap();
        assert!(d.negative_set.is_empty());
        for (&r, &w) in d.omega.grid().iter().zip(d.omega.values()) {
            let exact = 2.0 * (r.powf(-1.5) - 1.0);
            assert!((w - exact).abs() <= 1e-12 * exact.abs().max(1.0), "r={r}");
        }
    }

    #[test]
    fn defect_finds_negative_intervals() {
        // increasing profile: ω < 0 near λ for σ = 0
        let u = RadialFunction::from_fn(
            &log_grid(1e-3, 1e3, 64),
            |r| r / (1.0 + r),
            TailPolicy::Matched { sigma: 0.0 },
            InnerPolicy::Matched { exponent: 1.0 },
        )
        .unwrap();
        let d = kelvin_defect(&u, 1.0, 0.0).unwrap();
        assert!(d.negative_set.is_empty());
        let d = kelvin_defect(&u.scale(-1.0), 1.0, 0.0).unwrap();
        assert_eq!(d.negative_set.len(), 1);
        assert!(d.negative_set[0][1] <= 1.0);
    }

    #[test]
    fn zero_pair_collapses() {
        let zero = RadialFunction::from_fn(&DEFAULT_GRID.radii(), |_| 0.0, TailPolicy::Zero, InnerPolicy::Zero).unwrap();
        let t = picard_iterate(&validate(base(2.0, 2.0)).unwrap(), &zero, &zero, 3, &QuadratureSpec::default()).unwrap();
        assert_eq!(t.outcome, PicardOutcome::CollapseToZero);
        assert!(t.sup_norms.iter().all(|s| s == &[0.0, 0.0]));
    }
}
