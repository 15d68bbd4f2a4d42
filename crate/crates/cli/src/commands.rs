use serde_json::{json, Value};
use wssus::bloch_solver::{classify_channel, extremal_family, solve_fidelity};
use wssus::linalg::ComplexVector;
use wssus::mc_sim::{estimate_expectations, sweep_p0, worst_case_family, McReport};
use wssus::multiplex::{rank_schemes, select_schemes, stream_sinrs, Scheme};
use wssus::numeric_opt::{
    alternating_fidelity_max, brute_force_bloch_oracle, fidelity_lower_bound_search,
};
use wssus::{Density, Noise, OptimizerConfig, Quad, Solution};

use crate::config::{Command, RunConfig};
use crate::output::{float, CsvLayout};

/// Gap allowed between the closed form and a sampled search without axes.
/// A search of `n` uniform sphere points misses both caps of angular radius
/// `theta` around the optimal axis with probability at most
/// `exp(-n theta^2 / 2)`, and the loss inside a cap is at most `theta^2 / 4`,
/// so the gap exceeds `20 / n` with probability below `exp(-40)`.
pub fn oracle_tolerance(samples: usize, include_axes: bool) -> f64 {
    if include_axes {
        1e-9
    } else {
        (20.0 / samples as f64).min(1.0)
    }
}

pub fn csv_layout(command: Command) -> CsvLayout {
    match command {
        Command::Solve => CsvLayout {
            rows: None,
            columns: &[
                ("p0", "/p/0"),
                ("p1", "/p/1"),
                ("p2", "/p/2"),
                ("p3", "/p/3"),
                ("fidelity", "/solution/fidelity"),
                ("n_star", "/solution/n_star"),
                ("equalizer_sign", "/solution/equalizer_sign"),
                ("degenerate", "/solution/degenerate"),
                ("scheme_1", "/schemes/0/shift"),
                ("scheme_2", "/schemes/1/shift"),
            ],
        },
        Command::Classify => CsvLayout {
            rows: None,
            columns: &[
                ("p0", "/p/0"),
                ("p1", "/p/1"),
                ("p2", "/p/2"),
                ("p3", "/p/3"),
                ("class", "/class"),
                ("case", "/case"),
                ("extremal_case", "/extremal_case"),
                ("fidelity", "/fidelity"),
            ],
        },
        Command::Oracle { .. } => CsvLayout {
            rows: None,
            columns: &[
                ("closed_form", "/closed_form"),
                ("oracle", "/oracle"),
                ("gap", "/gap"),
                ("tolerance", "/tolerance"),
                ("samples", "/samples"),
                ("include_axes", "/include_axes"),
                ("seed", "/seed"),
            ],
        },
        Command::Simulate => CsvLayout {
            rows: None,
            columns: &[
                ("trials", "/report/trials"),
                ("seed", "/seed"),
                ("mean_gain", "/report/mean_gain"),
                ("stderr_gain", "/report/stderr_gain"),
                ("analytic_gain", "/report/analytic_gain"),
                ("mean_interf", "/report/mean_interf"),
                ("stderr_interf", "/report/stderr_interf"),
                ("analytic_interf", "/report/analytic_interf"),
                ("sinr_empirical", "/report/sinr_empirical"),
                ("sinr_analytic", "/report/sinr_analytic"),
            ],
        },
        Command::Sweep { .. } => CsvLayout {
            rows: Some("/rows"),
            columns: &[
                ("p0", "/p0"),
                ("analytic", "/analytic"),
                ("mc_gain", "/mc_gain"),
                ("stderr", "/stderr"),
                ("trials", "/trials"),
                ("seed", "/seed"),
            ],
        },
        Command::General { .. } => CsvLayout {
            rows: None,
            columns: &[
                ("L", "/L"),
                ("lower_bound", "/lower_bound"),
                ("alternating_best", "/alternating/best_value"),
                ("converged", "/alternating/converged"),
                ("closed_form", "/closed_form"),
                ("samples", "/samples"),
                ("restarts", "/restarts"),
                ("seed", "/seed"),
            ],
        },
    }
}

fn pulse_json(v: &ComplexVector<f64>) -> Value {
    Value::Array(v.entries().iter().map(|z| json!([z.re, z.im])).collect())
}

/// Field by field, since `serde_json` maps non-finite floats to `null`.
fn report_json(r: &McReport<f64>) -> Value {
    json!({
        "trials": r.trials,
        "seed": r.seed,
        "mean_gain": float(r.mean_gain),
        "mean_interf": float(r.mean_interf),
        "stderr_gain": float(r.stderr_gain),
        "stderr_interf": float(r.stderr_interf),
        "analytic_gain": float(r.analytic_gain),
        "analytic_interf": float(r.analytic_interf),
        "sinr_empirical": float(r.sinr_empirical),
        "sinr_analytic": float(r.sinr_analytic),
    })
}

fn quad_of(cfg: &RunConfig) -> Quad {
    cfg.quad.expect("validated configuration carries a quad")
}

fn solution_json(s: &Solution) -> wssus::Result<Value> {
    let mut v = serde_json::to_value(s).map_err(|e| wssus::Error::InvalidInput(e.to_string()))?;
    v["precoder"] = pulse_json(s.precoder.vector());
    v["equalizer"] = pulse_json(s.equalizer.vector());
    Ok(v)
}

/// Zero-crosstalk schemes for the solution's axis, best first, with the
/// SINR of both streams.
struct RankedScheme {
    scheme: Scheme,
    interference: f64,
    sinrs: (f64, f64),
}

fn ranked_schemes(quad: &Quad, s: &Solution, noise: Noise) -> wssus::Result<Vec<RankedScheme>> {
    let c = quad.to_scattering();
    let gamma = Density::from_pulse(&s.precoder);
    let g = Density::from_pulse(&s.equalizer);
    rank_schemes(&c, &gamma, &g, select_schemes(s.n_star.index())?)?
        .into_iter()
        .map(|(scheme, interference)| {
            let sinrs = stream_sinrs(&c, &gamma, &g, &scheme, noise)?;
            Ok(RankedScheme {
                scheme,
                interference,
                sinrs,
            })
        })
        .collect()
}

pub fn dispatch(cfg: &RunConfig) -> wssus::Result<Value> {
    let noise = Noise::new(cfg.sigma2)?;
    let mut doc = match cfg.command {
        Command::Solve => {
            let quad = quad_of(cfg);
            let s = solve_fidelity(&quad)?;
            let schemes: Vec<Value> = ranked_schemes(&quad, &s, noise)?
                .into_iter()
                .map(|r| {
                    let mu = r.scheme.partner()?;
                    Ok(json!({
                        "shift": mu.to_string(),
                        "interference": r.interference,
                        "sinr": [float(r.sinrs.0), float(r.sinrs.1)],
                    }))
                })
                .collect::<wssus::Result<_>>()?;
            json!({
                "p": quad.p(),
                "solution": solution_json(&s)?,
                "schemes": schemes,
                "sigma2": cfg.sigma2,
            })
        }
        Command::Classify => {
            let quad = quad_of(cfg);
            let class = classify_channel(&quad);
            let family = extremal_family(&quad);
            json!({
                "p": quad.p(),
                "class": class,
                "case": class.case_number(),
                "narrative": class.narrative(),
                "extremal": family,
                "extremal_case": family.map(|f| f.case_number()),
                "fidelity": solve_fidelity(&quad)?.fidelity,
            })
        }
        Command::Oracle { include_axes } => {
            let quad = quad_of(cfg);
            let closed = solve_fidelity(&quad)?.fidelity;
            let oracle = brute_force_bloch_oracle(&quad, cfg.samples, include_axes, cfg.seed)?;
            let tolerance = oracle_tolerance(cfg.samples, include_axes);
            json!({
                "p": quad.p(),
                "closed_form": closed,
                "oracle": oracle,
                "gap": closed - oracle,
                "tolerance": tolerance,
                "within_tolerance": (closed - oracle).abs() <= tolerance,
                "samples": cfg.samples,
                "include_axes": include_axes,
                "seed": cfg.seed,
            })
        }
        Command::Simulate => {
            let quad = quad_of(cfg);
            let s = solve_fidelity(&quad)?;
            let scheme = ranked_schemes(&quad, &s, noise)?
                .into_iter()
                .next()
                .map(|r| r.scheme)
                .ok_or_else(|| wssus::Error::BadScheme("no zero-crosstalk scheme".into()))?;
            let report = estimate_expectations(
                &quad.to_scattering(),
                &s.precoder,
                &s.equalizer,
                &scheme,
                noise,
                cfg.trials,
                cfg.seed,
            )?;
            json!({
                "p": quad.p(),
                "n_star": s.n_star,
                "scheme": scheme.partner()?.to_string(),
                "sigma2": cfg.sigma2,
                "seed": cfg.seed,
                "report": report_json(&report),
            })
        }
        Command::Sweep { points } => {
            let grid: Vec<f64> = (0..points)
                .map(|i| i as f64 / (points - 1) as f64)
                .collect();
            let rows = sweep_p0(worst_case_family, &grid, cfg.trials, cfg.seed)?;
            json!({
                "family": "worst_case",
                "trials": cfg.trials,
                "seed": cfg.seed,
                "rows": rows,
            })
        }
        Command::General { restarts } => {
            let c = cfg
                .scattering
                .as_ref()
                .expect("validated configuration carries a scattering grid");
            let lower = fidelity_lower_bound_search(c, cfg.samples, cfg.seed)?;
            let opt = OptimizerConfig {
                restarts,
                seed: cfg.seed,
                ..OptimizerConfig::default()
            };
            let trace = alternating_fidelity_max(c, &opt)?;
            let closed = match cfg.dim {
                2 => Some(solve_fidelity(&Quad::from_scattering(c)?)?.fidelity),
                _ => None,
            };
            let (gamma, g) = &trace.best_pair;
            json!({
                "L": cfg.dim,
                "samples": cfg.samples,
                "restarts": restarts,
                "seed": cfg.seed,
                "lower_bound": lower,
                "closed_form": closed,
                "alternating": {
                    "best_value": trace.best_value,
                    "converged": trace.converged,
                    "objective_history": trace.objective_history,
                    "restart_values": trace.restarts.iter().map(|r| r.value()).collect::<Vec<_>>(),
                    "precoder": pulse_json(gamma.vector()),
                    "equalizer": pulse_json(g.vector()),
                },
            })
        }
    };
    doc["command"] = json!(cfg.command.name());
    Ok(doc)
}
