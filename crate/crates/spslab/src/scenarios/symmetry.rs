//! Symmetry breaking of the ball-constrained minimizer.
//!
//! Everything runs in the rescaled units of `J_ε` (`λ = 1`, `ω = ε²`, ball
//! radius `R/ε`), where the minimizer has size of order one in `ε`; the
//! rows also carry the energies converted back to `I_λ`.

use serde_json::json;
use spslab_core::energy::{limit_epsilon, Params};
use spslab_core::grid::{BoxGrid, Field3D, RadialField, RadialGrid};
use spslab_core::minimize::{
    init, minimize_3d, minimize_radial, MinimizerResult, SolverConfig,
};

use super::{invalid, par_map, solver, to_row, Output};
use crate::config::{list, ScenarioConfig};
use crate::error::{Context, Result};
use crate::report::{FieldData, Verdict};

/// Asymmetry a nonradial candidate must exceed.
const ASYMMETRY_MIN: f64 = 0.1;
/// Energies above this count as the zero field.
const TRIVIAL: f64 = -1e-14;
/// Offset of the two translates in the pair start, as a fraction of the
/// ball radius.
const PAIR_OFFSET: f64 = 0.7;

#[derive(Debug, Clone)]
enum Start {
    Center,
    Pair,
    Seeded(u64),
}

impl Start {
    fn label(&self) -> String {
        match self {
            Start::Center => "center".into(),
            Start::Pair => "pair".into(),
            Start::Seeded(s) => format!("seeded-{s}"),
        }
    }
}

fn start_field(start: &Start, grid: BoxGrid, radius: f64, profile: &RadialField) -> Result<Field3D> {
    let ctx = || format!("{} start", start.label());
    match start {
        Start::Center => {
            Field3D::sample_radial(grid, Some(radius), [0.0; 3], |r| profile.interpolate(r)).context(ctx)
        }
        Start::Pair => {
            let d = PAIR_OFFSET * radius;
            Field3D::sample(grid, Some(radius), |x| {
                [-d, d]
                    .iter()
                    .map(|c| profile.interpolate(((x[0] - c).powi(2) + x[1] * x[1] + x[2] * x[2]).sqrt()))
                    .sum()
            })
            .context(ctx)
        }
        Start::Seeded(seed) => {
            let peak = profile.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let width = radius / 5.0;
            init::seeded_3d(grid, Some(radius), *seed, 3, (0.5 * peak, 2.0 * peak), (0.5 * width, width))
                .context(ctx)
        }
    }
}

pub(crate) fn ball_symmetry(cfg: &ScenarioConfig) -> Result<Output> {
    let p = *list(&cfg.p, "p", &[2.7])?.first().unwrap_or(&2.7);
    let eps = match &cfg.eps {
        Some(_) => *list(&cfg.eps, "eps", &[])?.first().unwrap_or(&f64::NAN),
        None => {
            let lambda = *list(&cfg.lambda, "lambda", &[0.003f64.powf(12.0 / 7.0)])?
                .first()
                .unwrap_or(&f64::NAN);
            limit_epsilon(lambda, p).context(|| format!("rescaling lambda = {lambda}"))?
        }
    };
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let radius = *list(&cfg.radius, "R", &[1.5])?.first().unwrap_or(&1.5);
    let ball = radius / eps;
    let half_width = cfg.box_grid.half_width.unwrap_or(1.04 * radius) / eps;
    if half_width < ball {
        return Err(invalid(format!(
            "box half-width {} smaller than the ball radius {radius}",
            half_width * eps
        )));
    }
    let params = Params::rescaled(p, eps)
        .context(|| format!("p = {p}, eps = {eps}"))?
        .with_radius(ball);
    let to_i = eps.powf(-(6.0 - p) / (p - 2.0));
    let radial_ns = match cfg.grid.n {
        Some(n) => vec![n, 2 * n - 1],
        None => vec![4097, 8193],
    };
    let box_ns = list(&cfg.box_grid.n, "box.n", &[48, 64])?;
    let amp = cfg.amplitude.unwrap_or(0.01);
    let width = cfg.support.unwrap_or(ball / 5.0);
    let rcfg = solver(cfg, SolverConfig::radial())?;
    let bcfg = solver(cfg, SolverConfig::box3d())?;

    let mut out = Output::default();
    let common = json!({"p": p, "eps": eps, "R": radius, "lambda": eps.powf(4.0 * (3.0 - p) / (p - 2.0))});

    // Radial minimum on two grids.
    let grids: Vec<RadialGrid> = radial_ns
        .iter()
        .map(|&n| RadialGrid::new(n, ball).context(|| format!("radial grid n = {n}")))
        .collect::<Result<_>>()?;
    let radial = par_map(&grids, |_, g| {
        let u0 = init::gaussian_radial(*g, amp, width).context(|| "radial start".into())?;
        minimize_radial(&params, &u0, &rcfg).context(|| format!("radial minimum n = {}", g.n()))
    })?;
    let mut radial_idx = Vec::new();
    let mut radial_m = Vec::new();
    for (res, secs) in &radial {
        let mut row = to_row(&common);
        for (k, v) in [
            ("kind", json!("radial")),
            ("init", json!("gaussian")),
            ("n", json!(res.field.grid().n())),
            ("energy_j", json!(res.breakdown.total)),
            ("energy_i", json!(to_i * res.breakdown.total)),
            ("asymmetry", json!(0.0)),
            ("iters", json!(res.iters)),
            ("converged", json!(res.converged)),
        ] {
            row.insert(k.into(), v);
        }
        radial_idx.push(out.push(row, *secs));
        radial_m.push(res.breakdown.total);
    }
    let m_bar = *radial_m.last().unwrap_or(&f64::NAN);
    let radial_err = if radial_m.len() >= 2 {
        (radial_m[radial_m.len() - 1] - radial_m[radial_m.len() - 2]).abs()
    } else {
        0.0
    };
    let finest = radial.last().map(|r| r.0.field.clone()).ok_or_else(|| invalid("no radial grid"))?;
    let profile = if finest.is_zero() {
        init::gaussian_radial(*finest.grid(), amp, width).context(|| "fallback profile".into())?
    } else {
        finest.clone()
    };

    // 3D candidates.
    let mut starts = vec![Start::Center, Start::Pair];
    for k in 0..cfg.restarts.unwrap_or(0) as u64 {
        starts.push(Start::Seeded(cfg.seed.wrapping_add(k)));
    }
    let mut tasks = Vec::new();
    for &n in &box_ns {
        let grid = BoxGrid::new(n, half_width).context(|| format!("box n = {n}"))?;
        for s in &starts {
            tasks.push((n, s.clone(), start_field(s, grid, ball, &profile)?));
        }
    }
    let results = par_map(&tasks, |_, (n, s, f)| {
        let e0 = spslab_core::energy::eval_i(f, &params).context(|| "start energy".into())?.total;
        minimize_3d(&params, f, &bcfg)
            .map(|r| (e0, r))
            .context(|| format!("3D minimum n = {n}, start {}", s.label()))
    })?;
    let mut best: Vec<(usize, usize, f64, f64)> = Vec::new();
    let mut center_at_max = None;
    let n_max = *box_ns.iter().max().unwrap_or(&0);
    let mut best_field: Option<(usize, MinimizerResult<Field3D>)> = None;
    for ((n, s, _), ((e0, res), secs)) in tasks.iter().zip(results) {
        let mut row = to_row(&common);
        for (k, v) in [
            ("kind", json!("box")),
            ("init", json!(s.label())),
            ("n", json!(n)),
            ("L", json!(half_width * eps)),
            ("start_energy_j", json!(e0)),
            ("energy_j", json!(res.breakdown.total)),
            ("energy_i", json!(to_i * res.breakdown.total)),
            ("asymmetry", json!(res.asymmetry)),
            ("iters", json!(res.iters)),
            ("converged", json!(res.converged)),
            ("status", serde_json::to_value(res.status).unwrap_or_default()),
        ] {
            row.insert(k.into(), v);
        }
        let i = out.push(row, secs);
        let m = res.breakdown.total;
        if *n == n_max && matches!(s, Start::Center) {
            center_at_max = Some((i, m));
        }
        match best.iter_mut().find(|b| b.0 == *n) {
            Some(b) if m < b.2 => *b = (*n, i, m, res.asymmetry),
            Some(_) => {}
            None => best.push((*n, i, m, res.asymmetry)),
        }
        if *n == n_max && best_field.as_ref().map_or(true, |b| m < b.1.breakdown.total) {
            best_field = Some((i, res));
        }
    }
    best.sort_by_key(|b| b.0);

    let mut trace = radial_idx.clone();
    trace.extend(best.iter().map(|b| b.1));
    let Some(&(_, _, m, asym)) = best.last() else {
        return Err(invalid("no box sizes"));
    };
    let name = "symmetry-broken";
    if m_bar >= TRIVIAL && m >= TRIVIAL {
        out.verdict(Verdict::inconclusive(
            name,
            format!("trivial: radial minimum {m_bar:.3e} and 3D minimum {m:.3e} are both the zero field"),
            trace.clone(),
        ));
    } else if best.len() < 2 {
        out.verdict(Verdict::inconclusive(
            name,
            "a single box size gives no refinement error estimate",
            trace.clone(),
        ));
    } else {
        let box_err = (best[best.len() - 1].2 - best[best.len() - 2].2).abs();
        let margin = box_err + radial_err;
        let detail = format!(
            "J units: 3D minimum {m:.6e} (asymmetry {asym:.3}), radial minimum {m_bar:.6e}, margin {margin:.3e} \
             (box refinement {box_err:.3e}, radial refinement {radial_err:.3e}); I units: {:.6e} vs {:.6e}",
            to_i * m,
            to_i * m_bar
        );
        if m < m_bar - margin && asym > ASYMMETRY_MIN {
            out.verdict(Verdict::new(name, true, detail, trace.clone()));
        } else {
            out.verdict(Verdict::inconclusive(name, format!("not certified; {detail}"), trace.clone()));
        }
        if let Some((i, mc)) = center_at_max {
            let diff = (mc - m_bar).abs();
            out.verdict(Verdict::new(
                "radial-restart-consistency",
                diff <= margin,
                format!("centred start at n = {n_max} ends at {mc:.6e}, {diff:.3e} from the radial minimum (margin {margin:.3e})"),
                vec![radial_idx[radial_idx.len() - 1], i],
            ));
        }
    }
    out.fields.push(("radial_minimizer".into(), FieldData::Radial(finest)));
    if let Some((i, res)) = best_field {
        out.fields.push((format!("box_best_row{i}"), FieldData::Box(res.field)));
    }
    Ok(out)
}
