//! Scenarios that evaluate or minimize the functional on grids.

use std::f64::consts::PI;

use serde_json::json;
use spslab_core::energy::{e_norm, eval_i, limit_epsilon, m_functional, EnergyBreakdown, Params};
use spslab_core::grid::{BoxGrid, Field3D, RadialField, RadialGrid};
use spslab_core::minimize::{
    init, minimize, minimize_3d as run_3d, minimize_radial as run_radial, MinimizerResult,
    SolverConfig,
};

use super::{
    extend, invalid, par_map, param_grid, radial_grid, sample_profile, solver, to_row, Output,
};
use crate::config::{list, InitSpec, ProfileSpec, ScenarioConfig};
use crate::error::{Context, Result};
use crate::report::{FieldData, Verdict};

/// Relative slack for `total = Σ terms`.
const SUM_TOL: f64 = 1e-14;
/// Allowed mismatch between a radial field and its box lift.
const LIFT_TOL: f64 = 0.02;
/// Energy floor for the positivity check.
const POSITIVITY_FLOOR: f64 = -1e-8;

fn breakdown_consistent(b: &EnergyBreakdown) -> bool {
    let scale = b.kinetic.abs() + b.mass.abs() + b.coulomb.abs() + b.power.abs();
    let sum = b.kinetic + b.mass + b.coulomb + b.power;
    (b.total - sum).abs() <= SUM_TOL * scale
        && b.kinetic >= 0.0
        && b.mass >= 0.0
        && b.coulomb >= 0.0
        && b.power <= 0.0
}

fn monotone(energies: &[f64]) -> bool {
    energies.windows(2).all(|w| w[1] <= w[0])
}

fn lift(u: &RadialField, grid: BoxGrid, mask: Option<f64>) -> Result<Field3D> {
    let r_max = u.grid().r_max();
    Field3D::sample_radial(grid, mask, [0.0; 3], |r| if r <= r_max { u.interpolate(r) } else { 0.0 })
        .context(|| "lifting a radial profile to the box".into())
}

pub(crate) fn energy(cfg: &ScenarioConfig) -> Result<Output> {
    let params = param_grid(cfg, &[2.8], &[1.0], 1.0)?;
    let spec = cfg.profile.clone().unwrap_or(ProfileSpec::Gaussian {
        amplitude: 1.0,
        width: 1.0,
    });
    let u = sample_profile(&spec, radial_grid(cfg, 2049, 12.0)?)?;
    let boxes = match &cfg.box_grid.n {
        Some(_) => list(&cfg.box_grid.n, "box.n", &[])?,
        None => Vec::new(),
    };
    let half_width = cfg.box_grid.half_width.unwrap_or(u.grid().r_max());
    let en = e_norm(&u).context(|| "E-norm".into())?;
    let m = m_functional(&u).context(|| "M functional".into())?;

    let mut out = Output::default();
    let mut consistent = Vec::new();
    let mut agreement = Vec::new();
    for prm in &params {
        let start = std::time::Instant::now();
        let b = eval_i(&u, prm).context(|| format!("evaluating I at {prm:?}"))?;
        let mut row = to_row(json!({"grid": "radial", "n": u.grid().n(), "extent": u.grid().r_max()}));
        extend(&mut row, b.row(prm));
        row.insert("e_norm".into(), json!(en));
        row.insert("M".into(), json!(m));
        let i = out.push(row, start.elapsed().as_secs_f64());
        consistent.push((i, breakdown_consistent(&b)));
        for &n in &boxes {
            let start = std::time::Instant::now();
            let grid = BoxGrid::new(n, half_width).context(|| format!("box n={n}"))?;
            let field = lift(&u, grid, None)?;
            let b3 = eval_i(&field, prm).context(|| format!("evaluating I on the box n={n}"))?;
            let mut row = to_row(json!({"grid": "box", "n": n, "extent": half_width}));
            extend(&mut row, b3.row(prm));
            let j = out.push(row, start.elapsed().as_secs_f64());
            consistent.push((j, breakdown_consistent(&b3)));
            let rel = (b3.total - b.total).abs() / b.total.abs().max(f64::MIN_POSITIVE);
            agreement.push((i, j, rel));
        }
    }
    out.fields.push(("profile".into(), FieldData::Radial(u)));
    out.verdict(Verdict::new(
        "breakdown-consistent",
        consistent.iter().all(|c| c.1),
        format!("total equals the sum of terms to {SUM_TOL:e} relative and every term has its sign"),
        consistent.iter().map(|c| c.0).collect(),
    ));
    if !agreement.is_empty() {
        let worst = agreement.iter().map(|a| a.2).fold(0.0, f64::max);
        out.verdict(Verdict::new(
            "radial-box-agreement",
            worst <= LIFT_TOL,
            format!("largest relative difference of totals {worst:.3e} (tolerance {LIFT_TOL})"),
            agreement.iter().flat_map(|a| [a.0, a.1]).collect(),
        ));
    }
    Ok(out)
}

struct RadialTask {
    params: Params,
    init: RadialField,
    label: String,
    seed: Option<u64>,
}

fn summary_row<F>(res: &MinimizerResult<F>, params: &Params) -> serde_json::Map<String, serde_json::Value> {
    let mut row = to_row(res.breakdown.row(params));
    let s = res.summary();
    for (k, v) in [
        ("residual_norm", json!(s.residual_norm)),
        ("relative_residual", json!(s.relative_residual)),
        ("e_norm", json!(s.e_norm)),
        ("iters", json!(s.iters)),
        ("asymmetry", json!(s.asymmetry)),
        ("converged", json!(s.converged)),
        ("status", serde_json::to_value(s.status).unwrap_or_default()),
        ("min_energy", json!(res.energies.iter().cloned().fold(f64::INFINITY, f64::min))),
    ] {
        row.insert(k.into(), v);
    }
    row
}

fn convergence_verdicts(out: &mut Output, runs: &[(usize, bool, bool)]) {
    let failed: Vec<usize> = runs.iter().filter(|r| !r.1).map(|r| r.0).collect();
    out.verdict(Verdict::new(
        "converged",
        failed.is_empty(),
        if failed.is_empty() {
            format!("all {} runs met the residual test", runs.len())
        } else {
            format!("rows {failed:?} did not converge")
        },
        runs.iter().map(|r| r.0).collect(),
    ));
    out.verdict(Verdict::new(
        "monotone-descent",
        runs.iter().all(|r| r.2),
        "every accepted step lowered the energy",
        runs.iter().map(|r| r.0).collect(),
    ));
}

pub(crate) fn minimize_radial(cfg: &ScenarioConfig) -> Result<Output> {
    let params = param_grid(cfg, &[2.8], &[1e-3], 1.0)?;
    let radii: Vec<Option<f64>> = match &cfg.radius {
        Some(_) => list(&cfg.radius, "R", &[])?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let spec = cfg.profile.clone().unwrap_or(ProfileSpec::Gaussian {
        amplitude: 10.0,
        width: 1.0,
    });
    let scfg = solver(cfg, SolverConfig::radial())?;
    let mut tasks = Vec::new();
    for prm in &params {
        for &radius in &radii {
            let grid = match radius {
                Some(r) => {
                    let n = cfg.grid.n.unwrap_or(2049);
                    RadialGrid::new(n, r).context(|| format!("radial grid n={n}, R={r}"))?
                }
                None => radial_grid(cfg, 2049, 10.0)?,
            };
            let prm = match radius {
                Some(r) => prm.with_radius(r),
                None => *prm,
            };
            match cfg.restarts {
                Some(k) => {
                    for i in 0..k as u64 {
                        let seed = cfg.seed + i;
                        tasks.push(RadialTask {
                            params: prm,
                            init: init::seeded_radial(grid, seed, (0.1, 30.0), (0.1, 5.0))
                                .context(|| format!("seeded start {seed}"))?,
                            label: "seeded".into(),
                            seed: Some(seed),
                        });
                    }
                }
                None => tasks.push(RadialTask {
                    params: prm,
                    init: sample_profile(&spec, grid)?,
                    label: "profile".into(),
                    seed: None,
                }),
            }
        }
    }
    let results = par_map(&tasks, |_, t| {
        run_radial(&t.params, &t.init, &scfg).context(|| format!("radial minimization at {:?}", t.params))
    })?;
    let mut out = Output::default();
    let mut runs = Vec::new();
    for (k, (task, (res, secs))) in tasks.iter().zip(results).enumerate() {
        let mut row = to_row(json!({
            "run": k, "init": task.label, "seed": task.seed,
            "n": res.field.grid().n(), "r_max": res.field.grid().r_max(),
        }));
        extend(&mut row, summary_row(&res, &task.params));
        let i = out.push(row, secs);
        runs.push((i, res.converged, monotone(&res.energies)));
        out.fields.push((format!("u_{k}"), FieldData::Radial(res.field)));
    }
    convergence_verdicts(&mut out, &runs);
    Ok(out)
}

pub(crate) fn minimize_3d(cfg: &ScenarioConfig) -> Result<Output> {
    let params = param_grid(cfg, &[2.7], &[1.0], 0.0)?;
    let radii = list(&cfg.radius, "R", &[200.0])?;
    let sizes = list(&cfg.box_grid.n, "box.n", &[32])?;
    let inits = list(
        &cfg.init,
        "init",
        &[InitSpec::Gaussian {
            amplitude: 0.01,
            width: 50.0,
            center: [0.0; 3],
        }],
    )?;
    let restarts = cfg.restarts.unwrap_or(1).max(1);
    let scfg = solver(cfg, SolverConfig::box3d())?;
    let mut tasks = Vec::new();
    for prm in &params {
        for &radius in &radii {
            let half_width = cfg.box_grid.half_width.unwrap_or(1.04 * radius);
            if half_width < radius {
                return Err(invalid(format!(
                    "box half-width {half_width} smaller than the ball radius {radius}"
                )));
            }
            for &n in &sizes {
                let grid = BoxGrid::new(n, half_width).context(|| format!("box n={n}"))?;
                for (j, spec) in inits.iter().enumerate() {
                    let reps = if matches!(spec, InitSpec::Seeded { .. }) { restarts } else { 1 };
                    for rep in 0..reps {
                        let seed = cfg.seed + rep as u64;
                        let field = init_3d(spec, grid, radius, seed)?;
                        tasks.push((prm.with_radius(radius), field, j, seed));
                    }
                }
            }
        }
    }
    let results = par_map(&tasks, |_, t| {
        run_3d(&t.0, &t.1, &scfg).context(|| format!("3D minimization at {:?}", t.0))
    })?;
    let mut out = Output::default();
    let mut runs = Vec::new();
    for (k, ((prm, _, j, seed), (res, secs))) in tasks.iter().zip(results).enumerate() {
        let g = *res.field.grid();
        let mut row = to_row(json!({
            "run": k, "init": j, "seed": seed, "n": g.n(), "L": g.half_width(),
        }));
        extend(&mut row, summary_row(&res, prm));
        let i = out.push(row, secs);
        runs.push((i, res.converged, monotone(&res.energies)));
        out.fields.push((format!("u_{k}"), FieldData::Box(res.field)));
    }
    convergence_verdicts(&mut out, &runs);
    Ok(out)
}

fn init_3d(spec: &InitSpec, grid: BoxGrid, radius: f64, seed: u64) -> Result<Field3D> {
    let ctx = || format!("initial field {spec:?}");
    match spec {
        InitSpec::Gaussian {
            amplitude,
            width,
            center,
        } => init::gaussian_3d(grid, Some(radius), *center, *amplitude, *width).context(ctx),
        InitSpec::MultiBump {
            amplitude,
            width,
            centers,
        } => init::multi_bump(grid, Some(radius), centers, *amplitude, *width).context(ctx),
        InitSpec::Seeded {
            bumps,
            amplitude,
            width,
        } => init::seeded_3d(
            grid,
            Some(radius),
            seed,
            *bumps,
            (amplitude[0], amplitude[1]),
            (width[0], width[1]),
        )
        .context(ctx),
    }
}

pub(crate) fn lambda_positivity(cfg: &ScenarioConfig) -> Result<Output> {
    let params = param_grid(cfg, &[2.8], &[0.2], 1.0)?;
    let restarts = cfg.restarts.unwrap_or(50);
    if restarts == 0 {
        return Err(crate::error::Error::EmptyGrid("restarts"));
    }
    let grid = radial_grid(cfg, 2049, 20.0)?;
    let scfg = solver(cfg, SolverConfig::radial())?;
    let mut tasks = Vec::new();
    for prm in &params {
        for i in 0..restarts as u64 {
            tasks.push((*prm, cfg.seed + i));
        }
    }
    let results = par_map(&tasks, |_, &(prm, seed)| {
        let u0 = init::seeded_radial(grid, seed, (0.1, 100.0), (0.05, 5.0))
            .context(|| format!("seeded start {seed}"))?;
        run_radial(&prm, &u0, &scfg).context(|| format!("radial minimization, seed {seed}"))
    })?;
    let mut out = Output::default();
    let mut by_lambda: Vec<(f64, Vec<usize>, f64)> = Vec::new();
    for ((prm, seed), (res, secs)) in tasks.iter().zip(results) {
        let mut row = to_row(json!({"seed": seed}));
        extend(&mut row, summary_row(&res, prm));
        let lowest = res.energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let i = out.push(row, secs);
        match by_lambda.iter_mut().find(|e| e.0 == prm.lambda) {
            Some(e) => {
                e.1.push(i);
                e.2 = e.2.min(lowest);
            }
            None => by_lambda.push((prm.lambda, vec![i], lowest)),
        }
    }
    let bound = 1.0 / (2.0 * PI);
    for (lambda, rows, lowest) in by_lambda {
        let name = format!("no-negative-energy-lambda{lambda}");
        if lambda < bound {
            out.verdict(Verdict::inconclusive(
                name,
                format!("lambda = {lambda} < 1/(2π); the positivity bound does not apply (lowest energy {lowest:.3e})"),
                rows,
            ));
        } else {
            out.verdict(Verdict::new(
                name,
                lowest >= POSITIVITY_FLOOR,
                format!(
                    "lowest energy over {} runs and all their iterates: {lowest:.3e} (floor {POSITIVITY_FLOOR:e})",
                    rows.len()
                ),
                rows,
            ));
        }
    }
    Ok(out)
}

/// `‖a − b‖` in the radial `L²` norm (trapezoid in `r`, weight `4πr²`).
fn l2_distance(a: &RadialField, b: &RadialField, sign: f64) -> f64 {
    let g = a.grid();
    (0..g.n())
        .map(|i| {
            let d = a.values()[i] - sign * b.values()[i];
            4.0 * PI * g.trapezoid_weight(i) * g.node(i).powi(2) * d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Distance to the set `{v₀, −v₀}` of minimizers.
fn distance_to_pair(a: &RadialField, b: &RadialField) -> f64 {
    l2_distance(a, b, 1.0).min(l2_distance(a, b, -1.0))
}

pub(crate) fn sweep_lambda(cfg: &ScenarioConfig) -> Result<Output> {
    let lo = 18.0 / 7.0;
    let ps = list(&cfg.p, "p", &[2.8])?;
    let lambdas = list(&cfg.lambda, "lambda", &[1e-2, 1e-3, 1e-4])?;
    for &p in &ps {
        if !(p > lo && p < 3.0) {
            return Err(invalid(format!(
                "sweep-lambda needs p in (18/7, 3) = ({lo:.6}, 3), got {p}"
            )));
        }
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0)) {
        return Err(invalid(format!("lambda must be positive, got {l}")));
    }
    let grid = radial_grid(cfg, 4097, 3000.0)?;
    let spec = cfg.profile.clone().unwrap_or(ProfileSpec::Gaussian {
        amplitude: 1e-5,
        width: 300.0,
    });
    let scfg = solver(cfg, SolverConfig::radial())?;
    let mut out = Output::default();
    for &p in &ps {
        let start = std::time::Instant::now();
        let j_params = Params::zero_mass(p).context(|| format!("p = {p}"))?;
        let v0 = run_radial(&j_params, &sample_profile(&spec, grid)?, &scfg)
            .context(|| format!("minimizing J at p = {p}"))?;
        let j_secs = start.elapsed().as_secs_f64();
        let v0_norm = l2_distance(&v0.field, &v0.field, 0.0);
        let tasks: Vec<(f64, f64)> = lambdas
            .iter()
            .map(|&l| limit_epsilon(l, p).map(|e| (l, e)))
            .collect::<spslab_core::Result<_>>()
            .context(|| "rescaling exponent".into())?;
        let results = par_map(&tasks, |_, &(_, eps)| {
            let prm = Params::rescaled(p, eps).context(|| format!("eps = {eps}"))?;
            minimize(&prm, &v0.field, &scfg).context(|| format!("minimizing J_eps at eps = {eps}"))
        })?;
        let mut rows = Vec::new();
        let mut fields = Vec::new();
        for (k, (&(lambda, eps), (res, secs))) in tasks.iter().zip(results).enumerate() {
            let factor = eps.powf(-(6.0 - p) / (p - 2.0));
            let dist = res
                .converged
                .then(|| distance_to_pair(&res.field, &v0.field) / v0_norm);
            let row = to_row(json!({
                "p": p, "lambda": lambda, "eps": eps,
                "j_eps_energy": res.breakdown.total,
                "i_lambda_energy": factor * res.breakdown.total,
                "j_energy": v0.breakdown.total,
                "j_converged": v0.converged,
                "converged": res.converged,
                "status": serde_json::to_value(res.status).unwrap_or_default(),
                "iters": res.iters,
                "relative_residual": res.relative_residual,
                "dist_to_j_min": dist,
                "dist_prev": null,
            }));
            rows.push((row, secs + if k == 0 { j_secs } else { 0.0 }));
            fields.push((format!("v_p{p}_{k}"), res.field));
        }
        // Successive distances in order of decreasing coupling.
        let mut order: Vec<usize> = (0..tasks.len()).collect();
        order.sort_by(|&a, &b| tasks[b].0.total_cmp(&tasks[a].0));
        let converged: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&k| rows[k].0["converged"] == json!(true))
            .collect();
        for w in converged.windows(2) {
            let d = distance_to_pair(&fields[w[1]].1, &fields[w[0]].1) / v0_norm;
            rows[w[1]].0.insert("dist_prev".into(), json!(d));
        }
        let base = out.rows.len();
        for (row, secs) in rows {
            out.push(row, secs);
        }
        let dists: Vec<f64> = converged
            .iter()
            .filter_map(|&k| out.rows[base + k]["dist_to_j_min"].as_f64())
            .collect();
        let trace: Vec<usize> = (base..base + tasks.len()).collect();
        out.verdict(Verdict::new(
            format!("all-converged-p{p}"),
            v0.converged && converged.len() == tasks.len(),
            format!(
                "J minimizer {:?}; {} of {} rescaled runs converged",
                v0.status,
                converged.len(),
                tasks.len()
            ),
            trace.clone(),
        ));
        let name = format!("distance-monotone-p{p}");
        if dists.len() < 2 {
            out.verdict(Verdict::inconclusive(
                name,
                "fewer than two converged couplings; nothing to compare",
                trace,
            ));
        } else {
            out.verdict(Verdict::new(
                name,
                dists.windows(2).all(|w| w[1] < w[0]),
                format!(
                    "relative L² distances to the J minimizer by decreasing lambda: {}",
                    super::fmt_list(&dists)
                ),
                trace,
            ));
        }
        out.fields.push((format!("v_p{p}_J"), FieldData::Radial(v0.field.clone())));
        for (name, f) in fields {
            out.fields.push((name, FieldData::Radial(f)));
        }
    }
    Ok(out)
}
