use std::path::Path;

use fraclap::averages::{decay_exponents, fit_decay, local_decay_check, nonlocal_average_report};
use fraclap::kernels::{
    frac_laplacian_report, green_ball, kelvin, poisson_ball, ring_kernel, riesz_constant, riesz_potential_report,
    BallKernelParams, GreenValue,
};
use fraclap::lemmas::{build_counterexample, representation_identity, sign_lemma, sign_lemma_sweep, Bump};
use fraclap::liouville::{bootstrap, classify, kelvin_defect, picard_iterate, region_map};
use fraclap::radial::{log_grid, merge_grids, DEFAULT_GRID};
use fraclap::{validate, InnerPolicy, QuadratureSpec, RadialFunction, TailPolicy};
use serde_json::{json, Value};

use crate::args::{BallArgs, Command, Global, ParamArgs, Profile, Source};
use crate::emit::{json_object, CliError, CliResult, Output};

fn load_profile(p: &Profile) -> CliResult<RadialFunction> {
    if let Some(path) = &p.input {
        return Ok(RadialFunction::read(path)?.scale(p.amplitude));
    }
    if p.grid.points < 8 || !(p.grid.rmin > 0.0 && p.grid.rmin < p.grid.rmax) {
        return Err(CliError::BadFlag(
            "grid needs 0 < --rmin < --rmax and --points >= 8".into(),
        ));
    }
    let grid = log_grid(p.grid.rmin, p.grid.rmax, p.grid.points);
    let amp = p.amplitude;
    let u = match (p.constant, p.bubble) {
        (Some(c), _) => {
            RadialFunction::from_fn(&grid, |_| amp * c, TailPolicy::Matched { sigma: 0.0 }, InnerPolicy::Constant)?
        }
        (_, Some(e)) => RadialFunction::from_fn(
            &grid,
            |r| amp * (1.0 + r * r).powf(-e),
            TailPolicy::Matched { sigma: 2.0 * e },
            InnerPolicy::Even,
        )?,
        _ => return Err(CliError::BadFlag("one of --input, --const or --bubble is required".into())),
    };
    Ok(u)
}

fn load_source(s: &Source) -> CliResult<(RadialFunction, Value)> {
    match (&s.source, s.seed) {
        (Some(path), _) => Ok((RadialFunction::read(path)?, json!({ "file": path.display().to_string() }))),
        (None, Some(seed)) => {
            let bump = Bump::random(seed);
            Ok((bump.to_radial()?, json!({ "bump": bump, "seed": seed })))
        }
        (None, None) => {
            let bump = Bump::standard();
            Ok((bump.to_radial()?, json!({ "bump": bump })))
        }
    }
}

fn read_file(path: &Path) -> CliResult<RadialFunction> {
    Ok(RadialFunction::read(path)?)
}

fn ball(b: &BallArgs) -> BallKernelParams {
    BallKernelParams {
        radius: b.big_r,
        alpha: b.alpha,
        n: b.n,
    }
}

fn validated(p: &ParamArgs) -> CliResult<fraclap::ValidatedParams> {
    Ok(validate(p.params())?)
}

fn range(v: &[f64], flag: &str) -> CliResult<[f64; 2]> {
    match v {
        [lo, hi] => Ok([*lo, *hi]),
        _ => Err(CliError::BadFlag(format!("--{flag} takes two values lo,hi"))),
    }
}

pub fn run(command: &Command, global: &Global) -> CliResult<Output> {
    let spec: QuadratureSpec = global.spec();
    spec.validate()?;
    match command {
        Command::Frlap {
            alpha,
            n,
            radii,
            profile,
        } => {
            let u = load_profile(profile)?;
            let points = radii
                .iter()
                .map(|&r| {
                    let q = frac_laplacian_report(&u, *alpha, *n, r, &spec)?;
                    Ok(json!({ "r": r, "value": q.value, "error": q.error, "converged": q.converged }))
                })
                .collect::<CliResult<Vec<Value>>>()?;
            let converged = points.iter().all(|p| p["converged"] == Value::Bool(true));
            Output::json(&json!({ "alpha": alpha, "n": n, "points": points }), converged)
        }
        Command::Riesz {
            gamma,
            n,
            ring,
            source,
            profile,
        } => {
            if let Some(rs) = ring {
                let [r, s] = range(rs, "ring")?;
                let value = ring_kernel(r, s, *gamma, *n, &spec)?;
                return Output::json(&json!({ "gamma": gamma, "n": n, "r": r, "s": s, "ring_kernel": value }), true);
            }
            let use_profile = profile.input.is_some() || profile.constant.is_some() || profile.bubble.is_some();
            let (f, origin) = if use_profile {
                (load_profile(profile)?, json!("profile"))
            } else {
                load_source(source)?
            };
            let g = f.grid();
            let prod = f.r_min() * f.r_max();
            let reflected: Vec<f64> = g.iter().map(|r| prod / r).collect();
            let grid = merge_grids(&[g, &reflected, &DEFAULT_GRID.radii()], 1e-9);
            let rep = riesz_potential_report(&f, *gamma, *n, &grid, &spec)?;
            let meta = json!({
                "gamma": gamma,
                "n": n,
                "source": origin,
                "riesz_constant": riesz_constant(*gamma, *n)?,
                "max_error": rep.max_error,
            });
            Output::profile(rep.u, &meta, rep.converged, global)
        }
        Command::Green { ball: b } => {
            let value = green_ball(b.x, b.y, b.cos, &ball(b), &spec)?;
            let v = match value {
                GreenValue::Finite(v) => json!(v),
                GreenValue::Coincident => json!("coincident"),
            };
            Output::json(&json!({ "params": ball(b), "x": b.x, "y": b.y, "cos": b.cos, "green": v }), true)
        }
        Command::Poisson { ball: b } => {
            let value = poisson_ball(b.x, b.y, b.cos, &ball(b))?;
            Output::json(&json!({ "params": ball(b), "x": b.x, "y": b.y, "cos": b.cos, "poisson": value }), true)
        }
        Command::Navg { alpha, big_r, profile } => {
            let u = load_profile(profile)?;
            let points = big_r
                .iter()
                .map(|&r| {
                    let q = nonlocal_average_report(&u, *alpha, r, &spec)?;
                    Ok(json!({ "R": r, "value": q.value, "error": q.error, "converged": q.converged }))
                })
                .collect::<CliResult<Vec<Value>>>()?;
            let converged = points.iter().all(|p| p["converged"] == Value::Bool(true));
            let mut body = json!({ "alpha": alpha, "points": points });
            if let [single] = big_r.as_slice() {
                body["R"] = json!(single);
                body["value"] = points[0]["value"].clone();
            }
            Output::json(&body, converged)
        }
        Command::SignLemma {
            gamma,
            n,
            r,
            big_r,
            sweep,
        } => {
            if *sweep {
                let s = sign_lemma_sweep(*n, &spec)?;
                return Output::json(&s, true);
            }
            let (Some(gamma), Some(big_r)) = (gamma, big_r) else {
                return Err(CliError::BadFlag("--gamma and --R are required without --sweep".into()));
            };
            Output::json(&sign_lemma(*gamma, *n, *r, *big_r, &spec)?, true)
        }
        Command::Counterexample {
            alpha,
            n,
            source,
            profile_out,
        } => {
            let (f, origin) = load_source(source)?;
            let rep = build_counterexample(*alpha, *n, &f, &spec)?;
            if let Some(path) = profile_out {
                rep.u.write(path)?;
            }
            let mut body = json_object(&rep, rep.converged)?;
            body["source"] = origin;
            Ok(Output {
                body: crate::emit::Body::Json(body),
                converged: rep.converged,
            })
        }
        Command::Represent {
            alpha,
            n,
            big_r,
            source,
        } => {
            let (f, origin) = load_source(source)?;
            let rep = representation_identity(&f, *alpha, *n, *big_r, &spec)?;
            Output::json(
                &json!({
                    "alpha": alpha,
                    "n": n,
                    "R": big_r,
                    "source": origin,
                    "lhs": rep.lhs,
                    "rhs_green": rep.rhs_green,
                    "rhs_poisson": rep.rhs_poisson,
                    "gap": rep.gap(),
                    "green_gap": rep.green_gap(),
                }),
                true,
            )
        }
        Command::Classify { params } => {
            let v = validated(params)?;
            let verdict = classify(&v);
            Output::json(&json!({ "params": v, "verdict": verdict.verdict, "reason": verdict.reason, "holds": verdict.holds }), true)
        }
        Command::Bootstrap { params, i_max } => {
            let v = validated(params)?;
            let seq = bootstrap(&v, *i_max)?;
            Output::json(&json!({ "params": v, "sequence": seq }), true)
        }
        Command::RegionMap {
            params,
            p_range,
            q_range,
            resolution,
        } => {
            let map = region_map(&params.params(), range(p_range, "p-range")?, range(q_range, "q-range")?, *resolution)?;
            let csv = map.to_csv_string()?;
            Output::table(&map, csv, true, global)
        }
        Command::Iterate {
            params,
            steps,
            u0,
            v0,
            init_amplitude,
        } => {
            let v = validated(params)?;
            let pr = v.params();
            let start = |file: &Option<std::path::PathBuf>, order: f64| -> CliResult<RadialFunction> {
                match file {
                    Some(path) => read_file(path),
                    None => {
                        let e = 0.5 * (pr.dim() - order);
                        Ok(RadialFunction::from_fn(
                            &DEFAULT_GRID.radii(),
                            |r| init_amplitude * (1.0 + r * r).powf(-e),
                            TailPolicy::Matched { sigma: 2.0 * e },
                            InnerPolicy::Even,
                        )?)
                    }
                }
            };
            let (u, w) = (start(u0, pr.order_u())?, start(v0, pr.order_v())?);
            let t = picard_iterate(&v, &u, &w, *steps, &spec)?;
            let final_residual = t.residuals.last().copied();
            let mut body = json_object(&t, t.converged)?;
            body["final_residual"] = json!(final_residual);
            body["params"] = serde_json::to_value(v)?;
            Ok(Output {
                body: crate::emit::Body::Json(body),
                converged: t.converged,
            })
        }
        Command::DecayFit {
            params,
            profile,
            lo,
            hi,
            v,
            radii,
        } => {
            let u = load_profile(profile)?;
            let mut fit = fit_decay(&u, *lo, *hi)?;
            let pr = params.params();
            let exponents = decay_exponents(&pr).ok();
            if let Some((su, _)) = exponents {
                fit = fit.with_theoretical(su);
            }
            let mut body = json!({ "fit": fit, "decay_exponents": exponents });
            if let Some(path) = v {
                let w = read_file(path)?;
                let radii = radii.clone().unwrap_or_else(|| log_grid(*lo, *hi, 16));
                body["local"] = serde_json::to_value(local_decay_check(&u, &w, &pr, &radii, &spec)?)?;
            }
            Output::json(&body, true)
        }
        Command::Kelvin {
            lambda,
            sigma,
            defect,
            profile,
        } => {
            let u = load_profile(profile)?;
            if *defect {
                let d = kelvin_defect(&u, *lambda, *sigma)?;
                let mut body = json_object(&d, true)?;
                body["r"] = serde_json::to_value(d.omega.grid())?;
                body["omega"] = serde_json::to_value(d.omega.values())?;
                return Ok(Output {
                    body: crate::emit::Body::Json(body),
                    converged: true,
                });
            }
            let k = kelvin(&u, *lambda, *sigma)?;
            Output::profile(k, &json!({ "lambda": lambda, "sigma": sigma }), true, global)
        }
    }
}
