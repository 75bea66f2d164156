//! Scenarios built on the explicit witness families.

use std::f64::consts::PI;

use serde_json::json;
use spslab_core::constructions::{
    bump_cross_bound, bump_cross_term, bump_sum_energy, dilated_bump_sum_stats, tent_geometry, tent_profile,
    BumpStats,
};
use spslab_core::energy::Params;
use spslab_core::grid::RadialGrid;

use super::{extend, fmt_list, invalid, par_map, slope, to_row, Output};
use crate::config::{list, ScenarioConfig};
use crate::error::{Context, Result};
use crate::report::Verdict;

/// Allowed relative gap between tent quadrature and closed form.
const TENT_QUAD_TOL: f64 = 5e-3;
/// Allowed relative error of the fitted tent slope.
const TENT_SLOPE_TOL: f64 = 0.03;
/// Grid cells across the tent half-width `S`. The kinks of the tent fall
/// between nodes, which costs `O(h/S)` in the kinetic integral.
const TENT_CELLS: f64 = 256.0;
/// Tolerance for identities that hold in closed form.
const EXACT_TOL: f64 = 1e-12;

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub(crate) fn tent_sweep(cfg: &ScenarioConfig) -> Result<Output> {
    let eps = list(&cfg.eps, "eps", &[0.2, 0.1, 0.05, 0.01])?;
    let ps = list(&cfg.p, "p", &[2.5])?;
    let tasks: Vec<(f64, f64)> = ps.iter().flat_map(|&p| eps.iter().map(move |&e| (p, e))).collect();
    let results = par_map(&tasks, |_, &(p, e)| {
        let (big_r, s) = tent_geometry(e).context(|| format!("tent geometry at eps = {e}"))?;
        let r_max = big_r + 2.0 * s;
        let n = (r_max * TENT_CELLS / s).ceil() as usize + 1;
        let grid = RadialGrid::new(n, r_max).context(|| format!("tent grid n = {n}"))?;
        tent_profile(e, p, Some(grid))
            .map(|(_, r)| r)
            .context(|| format!("tent at eps = {e}, p = {p}"))
    })?;
    let mut out = Output::default();
    let mut bounds = Vec::new();
    let mut quad = Vec::new();
    for (t, secs) in results {
        let quad_err = rel(t.kin_quad, t.kin_raw)
            .max(rel(t.coul_quad, t.coul_raw))
            .max(rel(t.lp_quad, t.lp_raw));
        let mut row = to_row(t);
        row.insert("bounds_hold".into(), json!(t.bounds_hold()));
        row.insert("quadrature_error".into(), json!(quad_err));
        let i = out.push(row, secs);
        bounds.push((i, t.bounds_hold()));
        quad.push((i, quad_err));
    }
    out.verdict(Verdict::new(
        "tent-bounds",
        bounds.iter().all(|b| b.1),
        "kin_raw ≤ 8, coul_raw ≤ 32 and lp_raw ≥ ε^{p−18/7}/2^{p+2} on every row",
        bounds.iter().map(|b| b.0).collect(),
    ));
    let worst = quad.iter().map(|q| q.1).fold(0.0, f64::max);
    out.verdict(Verdict::new(
        "tent-quadrature",
        worst <= TENT_QUAD_TOL,
        format!("largest relative gap between grid and exact integrals {worst:.3e} (tolerance {TENT_QUAD_TOL})"),
        quad.iter().map(|q| q.0).collect(),
    ));
    for &p in &ps {
        let idx: Vec<usize> = (0..out.rows.len())
            .filter(|&i| out.rows[i]["p"].as_f64() == Some(p))
            .collect();
        if idx.len() < 2 {
            continue;
        }
        let xs: Vec<f64> = idx.iter().map(|&i| out.rows[i]["eps"].as_f64().unwrap_or(f64::NAN)).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| out.rows[i]["lp_raw"].as_f64().unwrap_or(f64::NAN)).collect();
        let fitted = slope(&xs, &ys);
        let target = p - 18.0 / 7.0;
        let err = (fitted - target).abs() / target.abs();
        out.verdict(Verdict::new(
            format!("tent-slope-p{p}"),
            err <= TENT_SLOPE_TOL,
            format!(
                "fitted log-log slope {fitted:.6} vs p − 18/7 = {target:.6}: relative error {err:.3e} (tolerance {TENT_SLOPE_TOL})"
            ),
            idx,
        ));
    }
    Ok(out)
}

/// Coefficients of the single-bump energy `A a² + B a⁴ − C a^p` at support `M`.
fn bump_coefficients(support: f64, params: &Params) -> Result<(f64, f64, f64)> {
    let unit = BumpStats::new(1.0, support, params.p).context(|| format!("bump of support {support}"))?;
    let e = unit.energy(params);
    Ok((e.kinetic + e.mass, e.coulomb, -e.power))
}

/// Amplitude minimizing `(A + B a²)/a^{p−2}`, and that minimum divided by
/// `C`. The single bump has negative energy for some amplitude iff the
/// ratio is below one.
fn best_amplitude(support: f64, params: &Params) -> Result<(f64, f64)> {
    let (a_coef, b_coef, c_coef) = bump_coefficients(support, params)?;
    let p = params.p;
    let a = ((p - 2.0) * a_coef / ((4.0 - p) * b_coef)).sqrt();
    let ratio = (a_coef + b_coef * a * a) / (a.powf(p - 2.0) * c_coef);
    Ok((a, ratio))
}

#[derive(Debug, Clone, Copy)]
struct BumpProbe {
    support: f64,
    amplitude: f64,
    ratio: f64,
    energy: f64,
}

/// Scans the support radius on a log grid and refines the best cell by
/// golden-section search.
fn probe_bumps(params: &Params) -> Result<BumpProbe> {
    let eval = |log_m: f64| -> Result<(f64, f64)> { best_amplitude(log_m.exp(), params) };
    let (lo, hi, steps) = ((1e-3f64).ln(), (1e4f64).ln(), 141);
    let grid: Vec<f64> = (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect();
    let mut best = (0, f64::INFINITY);
    for (i, &x) in grid.iter().enumerate() {
        let r = eval(x)?.1;
        if r < best.1 {
            best = (i, r);
        }
    }
    let (mut a, mut b) = (
        grid[best.0.saturating_sub(1)],
        grid[(best.0 + 1).min(steps - 1)],
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if eval(c)?.1 < eval(d)?.1 {
            b = d;
        } else {
            a = c;
        }
    }
    let x = if eval(0.5 * (a + b))?.1 <= best.1 { 0.5 * (a + b) } else { grid[best.0] };
    let support = x.exp();
    let (amplitude, ratio) = eval(x)?;
    let energy = BumpStats::new(amplitude, support, params.p)
        .context(|| "best bump".into())?
        .energy(params)
        .total;
    Ok(BumpProbe {
        support,
        amplitude,
        ratio,
        energy,
    })
}

pub(crate) fn bump_sweep(cfg: &ScenarioConfig) -> Result<Output> {
    let p = *list(&cfg.p, "p", &[2.8])?.first().unwrap_or(&2.8);
    let lambda = *list(&cfg.lambda, "lambda", &[1e-3])?.first().unwrap_or(&1e-3);
    let params = Params::new(p, lambda, cfg.omega.unwrap_or(1.0)).context(|| "bump parameters".into())?;
    let ns = list(&cfg.bumps, "N", &[1, 2, 4, 8, 16])?;
    let support = cfg.support.unwrap_or(1.0);
    let amplitude = match cfg.amplitude {
        Some(a) => a,
        None => best_amplitude(support, &params)?.0,
    };
    let bump = BumpStats::new(amplitude, support, p).context(|| "seed bump".into())?;
    let single = bump.energy(&params);

    let mut out = Output::default();
    let mut linear = Vec::new();
    let mut cross_ok = Vec::new();
    let mut excess = Vec::new();
    let mut totals = Vec::new();
    for &n in &ns {
        let start = std::time::Instant::now();
        let e = bump_sum_energy(&bump, n, &params).context(|| format!("bump sum N = {n}"))?;
        let cross = bump_cross_term(&bump, n).context(|| format!("cross term N = {n}"))?;
        let bound = bump_cross_bound(&bump, n).context(|| format!("cross bound N = {n}"))?;
        let nf = n as f64;
        let lin_err = rel(e.kinetic, nf * single.kinetic)
            .max(rel(e.mass, nf * single.mass))
            .max(rel(e.power, nf * single.power));
        let mut row = to_row(json!({
            "N": n, "amplitude": amplitude, "M": support, "Q": bump.charge,
        }));
        extend(&mut row, e.row(&params));
        for (k, v) in [
            ("single_total", single.total),
            ("cross", cross),
            ("cross_bound", bound),
            ("excess", e.total - nf * single.total),
            ("linear_error", lin_err),
        ] {
            row.insert(k.into(), json!(v));
        }
        let i = out.push(row, start.elapsed().as_secs_f64());
        linear.push((i, lin_err));
        if n > 1 {
            cross_ok.push((i, cross <= bound));
        }
        excess.push((i, e.total - nf * single.total, 0.25 * lambda * bound));
        totals.push((i, e.total));
    }
    let all: Vec<usize> = linear.iter().map(|l| l.0).collect();
    let worst = linear.iter().map(|l| l.1).fold(0.0, f64::max);
    out.verdict(Verdict::new(
        "linear-terms",
        worst <= EXACT_TOL,
        format!("kinetic, mass and power terms equal N times the single bump to {worst:.1e}"),
        all.clone(),
    ));
    out.verdict(Verdict::new(
        "cross-term-bound",
        cross_ok.iter().all(|c| c.1),
        "cross term ≤ (N² − N)/(N² − 2M) · Q² for every N ≥ 2",
        cross_ok.iter().map(|c| c.0).collect(),
    ));
    let c_fit = excess.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let c_theory = excess.iter().map(|e| e.2).fold(0.0, f64::max);
    if single.total < 0.0 {
        out.verdict(Verdict::new(
            "affine-upper-bound",
            c_fit <= c_theory,
            format!(
                "I(u_N) − N·I(u) ≤ C with fitted C = {c_fit:.6e} and (λ/4)·max cross bound = {c_theory:.6e}"
            ),
            all.clone(),
        ));
        out.verdict(Verdict::new(
            "unbounded-below",
            totals.windows(2).all(|w| w[1].1 < w[0].1),
            format!(
                "single bump energy {:.6e}; totals {}",
                single.total,
                fmt_list(&totals.iter().map(|t| t.1).collect::<Vec<_>>())
            ),
            all,
        ));
    } else {
        out.verdict(Verdict::inconclusive(
            "affine-upper-bound",
            format!(
                "seed bump energy {:.6e} is not negative; choose a smaller lambda or another amplitude",
                single.total
            ),
            all,
        ));
    }
    Ok(out)
}

pub(crate) fn dilated_bump_sweep(cfg: &ScenarioConfig) -> Result<Output> {
    let ps = list(&cfg.p, "p", &[2.5, 2.9])?;
    let ns = list(&cfg.bumps, "N", &[1, 8, 64])?;
    let amplitude = cfg.amplitude.unwrap_or(1.0);
    let support = cfg.support.unwrap_or(1.0);
    let mut out = Output::default();
    for &p in &ps {
        let bump = BumpStats::new(amplitude, support, p).context(|| format!("bump at p = {p}"))?;
        let mut idx = Vec::new();
        let mut stats = Vec::new();
        for &n in &ns {
            let start = std::time::Instant::now();
            let s = dilated_bump_sum_stats(&bump, n, p).context(|| format!("dilated sum N = {n}"))?;
            let mut row = to_row(json!({"p": p}));
            extend(&mut row, s);
            idx.push(out.push(row, start.elapsed().as_secs_f64()));
            stats.push(s);
        }
        let k0 = stats[0].kinetic;
        let kin_err = stats.iter().map(|s| rel(s.kinetic, k0)).fold(0.0, f64::max);
        out.verdict(Verdict::new(
            format!("kinetic-constant-p{p}"),
            kin_err <= EXACT_TOL,
            format!("largest relative change of the kinetic term across N: {kin_err:.1e}"),
            idx.clone(),
        ));
        if ns.len() >= 2 {
            let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
            let ys: Vec<f64> = stats.iter().map(|s| s.lp_mass).collect();
            let fitted = slope(&xs, &ys);
            let target = (6.0 - 2.0 * p) / 3.0;
            let err = (fitted - target).abs();
            out.verdict(Verdict::new(
                format!("lp-growth-exponent-p{p}"),
                err <= EXACT_TOL,
                format!("fitted exponent {fitted:.15} vs (6 − 2p)/3 = {target:.15}"),
                idx.clone(),
            ));
        }
        out.verdict(Verdict::new(
            format!("coulomb-bound-p{p}"),
            stats.iter().all(|s| s.coulomb <= s.coulomb_bound),
            "D(v_N², v_N²) ≤ λ_N³(C₂N + C₃) for every N",
            idx,
        ));
    }
    Ok(out)
}

pub(crate) fn threshold_lambda0(cfg: &ScenarioConfig) -> Result<Output> {
    let p = *list(&cfg.p, "p", &[2.8])?.first().unwrap_or(&2.8);
    if !(p > 2.0 && p < 3.0) {
        return Err(invalid(format!("threshold-lambda0 needs p in (2, 3), got {p}")));
    }
    let omega = cfg.omega.unwrap_or(1.0);
    let tol = cfg.tolerance.unwrap_or(1e-3);
    let cap = 1.0 / (2.0 * PI);
    let params = |lambda: f64| Params::new(p, lambda, omega).context(|| format!("lambda = {lambda}"));
    let mut out = Output::default();
    let record = |out: &mut Output, stage: &str, step: usize, lo: f64, hi: f64, lambda: f64| -> Result<(usize, bool)> {
        let start = std::time::Instant::now();
        let probe = probe_bumps(&params(lambda)?)?;
        let negative = probe.ratio < 1.0;
        let row = to_row(json!({
            "stage": stage, "step": step, "lambda": lambda, "lambda_lo": lo, "lambda_hi": hi,
            "negative_bump": negative, "ratio": probe.ratio, "M": probe.support,
            "amplitude": probe.amplitude, "bump_energy": probe.energy,
        }));
        Ok((out.push(row, start.elapsed().as_secs_f64()), negative))
    };

    let (mut lo, mut hi) = (1e-6, cap + 1e-3);
    let (i_lo, neg_lo) = record(&mut out, "endpoint", 0, lo, hi, lo)?;
    let (i_hi, neg_hi) = record(&mut out, "endpoint", 0, lo, hi, hi)?;
    let mut trace = vec![i_lo, i_hi];
    let mut steps = 0;
    if neg_lo && !neg_hi {
        while hi - lo > tol && steps < 30 {
            steps += 1;
            let mid = 0.5 * (lo + hi);
            let (i, neg) = record(&mut out, "bisection", steps, lo, hi, mid)?;
            trace.push(i);
            if neg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.verdict(Verdict::new(
            "bracket",
            0.0 < lo && lo < hi && hi <= cap + 1e-3,
            format!("[{lo:.6e}, {hi:.6e}] with 1/(2π) = {cap:.6e}"),
            trace.clone(),
        ));
        out.verdict(Verdict::new(
            "bracket-width",
            hi - lo <= tol && steps <= 30,
            format!("width {:.3e} after {steps} steps (tolerance {tol:e})", hi - lo),
            trace,
        ));
    } else {
        out.verdict(Verdict::new(
            "bracket",
            false,
            format!(
                "bisection could not start: negative bump at lambda = {lo:e}: {neg_lo}; at lambda = {hi:.6e}: {neg_hi}"
            ),
            trace,
        ));
    }
    let (i_one, neg_one) = record(&mut out, "check", 0, lo, hi, 1.0)?;
    out.verdict(Verdict::new(
        "no-negative-bump-at-lambda-one",
        !neg_one,
        format!(
            "smallest (A + B a²)/(C a^(p−2)) over support radii and amplitudes at lambda = 1: {:.6}",
            out.rows[i_one]["ratio"].as_f64().unwrap_or(f64::NAN)
        ),
        vec![i_one],
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_amplitude_minimizes_the_ratio() {
        let params = Params::new(2.8, 0.05, 1.0).unwrap();
        let (a, r) = best_amplitude(2.0, &params).unwrap();
        let (ac, bc, cc) = bump_coefficients(2.0, &params).unwrap();
        let g = |x: f64| (ac + bc * x * x) / (x.powf(0.8) * cc);
        assert!((g(a) - r).abs() < 1e-12 * r);
        assert!(g(a * 1.01) > r && g(a * 0.99) > r);
    }

    #[test]
    fn negative_ratio_means_negative_energy() {
        let params = Params::new(2.8, 1e-3, 1.0).unwrap();
        let probe = probe_bumps(&params).unwrap();
        assert!(probe.ratio < 1.0);
        assert!(probe.energy < 0.0);
        let params = Params::new(2.8, 1.0, 1.0).unwrap();
        let probe = probe_bumps(&params).unwrap();
        assert!(probe.ratio > 1.0 && probe.energy > 0.0);
    }
}
