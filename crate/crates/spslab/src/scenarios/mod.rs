//! Scenario implementations. Each returns an [`Output`]; rows are produced
//! in a fixed order regardless of the worker count.

mod constructions;
mod fields;
mod inequalities;
mod symmetry;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use spslab_core::energy::Params;
use spslab_core::grid::{sample_radial, RadialField, RadialGrid};
use spslab_core::minimize::SolverConfig;

use crate::config::{list, ProfileSpec, Scenario, ScenarioConfig};
use crate::error::{Context, Error, Result};
use crate::report::{FieldData, Row, Verdict};

#[derive(Debug, Default)]
pub(crate) struct Output {
    pub rows: Vec<Row>,
    pub runtimes: Vec<f64>,
    pub verdicts: Vec<Verdict>,
    pub fields: Vec<(String, FieldData)>,
}

impl Output {
    /// Appends a row and returns its index.
    pub fn push(&mut self, row: Row, seconds: f64) -> usize {
        self.rows.push(row);
        self.runtimes.push(seconds);
        self.rows.len() - 1
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }
}

pub(crate) fn dispatch(scenario: Scenario, cfg: &ScenarioConfig) -> Result<Output> {
    match scenario {
        Scenario::Energy => fields::energy(cfg),
        Scenario::MinimizeRadial => fields::minimize_radial(cfg),
        Scenario::Minimize3d => fields::minimize_3d(cfg),
        Scenario::LambdaPositivity => fields::lambda_positivity(cfg),
        Scenario::SweepLambda => fields::sweep_lambda(cfg),
        Scenario::TentSweep => constructions::tent_sweep(cfg),
        Scenario::BumpSweep => constructions::bump_sweep(cfg),
        Scenario::DilatedBumpSweep => constructions::dilated_bump_sweep(cfg),
        Scenario::ThresholdLambda0 => constructions::threshold_lambda0(cfg),
        Scenario::LowerBoundSweep => inequalities::lower_bound_sweep(cfg),
        Scenario::DyadicLemma => inequalities::dyadic_lemma(cfg),
        Scenario::HlsCheck => inequalities::hls_check(cfg),
        Scenario::BallSymmetry => symmetry::ball_symmetry(cfg),
    }
}

/// Converts a serializable record into a row.
pub(crate) fn to_row(value: impl Serialize) -> Row {
    match serde_json::to_value(value) {
        Ok(Value::Object(map)) => map,
        Ok(other) => {
            let mut m = Row::new();
            m.insert("value".into(), other);
            m
        }
        Err(e) => {
            let mut m = Row::new();
            m.insert("error".into(), Value::String(e.to_string()));
            m
        }
    }
}

/// Appends all entries of `extra` to `row`, prefixing nested keys.
pub(crate) fn extend(row: &mut Row, extra: impl Serialize) {
    for (k, v) in to_row(extra) {
        match v {
            Value::Object(inner) => {
                for (ik, iv) in inner {
                    row.insert(ik, iv);
                }
            }
            v => {
                row.insert(k, v);
            }
        }
    }
}

/// Runs `f` on every item in parallel and returns results in input order,
/// each with its wall time.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Result<Vec<(R, f64)>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    items
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let start = Instant::now();
            f(i, t).map(|r| (r, start.elapsed().as_secs_f64()))
        })
        .collect()
}

pub(crate) fn radial_grid(cfg: &ScenarioConfig, n: usize, r_max: f64) -> Result<RadialGrid> {
    let n = cfg.grid.n.unwrap_or(n);
    let r_max = cfg.grid.r_max.unwrap_or(r_max);
    RadialGrid::new(n, r_max).context(|| format!("radial grid n={n}, r_max={r_max}"))
}

/// Cartesian product of `p` and `lambda` with a common `omega`.
pub(crate) fn param_grid(
    cfg: &ScenarioConfig,
    p: &[f64],
    lambda: &[f64],
    omega: f64,
) -> Result<Vec<Params>> {
    let ps = list(&cfg.p, "p", p)?;
    let ls = list(&cfg.lambda, "lambda", lambda)?;
    let omega = cfg.omega.unwrap_or(omega);
    let mut out = Vec::new();
    for &p in &ps {
        for &l in &ls {
            out.push(Params::new(p, l, omega).context(|| format!("parameters p={p}, lambda={l}"))?);
        }
    }
    Ok(out)
}

pub(crate) fn solver(cfg: &ScenarioConfig, default: SolverConfig) -> Result<SolverConfig> {
    let s = cfg.solver.unwrap_or(default);
    s.validate().context(|| "solver configuration".into())?;
    Ok(s)
}

pub(crate) fn sample_profile(spec: &ProfileSpec, grid: RadialGrid) -> Result<RadialField> {
    let ctx = || format!("sampling profile {spec:?}");
    let field = match *spec {
        ProfileSpec::Gaussian { amplitude, width } => {
            sample_radial(|r| amplitude * (-r * r / (2.0 * width * width)).exp(), grid)
        }
        ProfileSpec::Indicator { radius } => sample_radial(
            |r| {
                if r < radius {
                    1.0
                } else if r == radius {
                    0.5f64.sqrt()
                } else {
                    0.0
                }
            },
            grid,
        ),
        ProfileSpec::Bump { amplitude, support } => sample_radial(
            |r| spslab_core::constructions::bump_value(amplitude, support, r),
            grid,
        ),
        ProfileSpec::Tent { eps } => {
            return spslab_core::constructions::tent_profile(eps, 2.5, None)
                .map(|(f, _)| f)
                .context(ctx)
        }
        ProfileSpec::File { ref path } => {
            let file = std::fs::File::open(path)?;
            return RadialField::read_csv(file).context(ctx);
        }
    };
    Ok(field.context(ctx)?.dirichlet())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

/// Least-squares slope of `log y` against `log x`.
pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    spslab_core::constructions::log_log_slope(xs, ys)
}

pub(crate) fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}
