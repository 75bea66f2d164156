//! Energy minimization by preconditioned gradient descent, plus asymmetry
//! diagnostics for box fields.
//!
//! Each step moves along `d = −(A + σW)⁻¹ g`, where `g` is the Euclidean
//! gradient of the discrete energy, `A` the stiffness matrix of `∫|∇u|²/2`
//! and `W` the diagonal `L²` mass. Without the `A` part the step length would
//! have to shrink like `h²`; with it, the iteration count is essentially
//! independent of the grid. Steps are accepted by Armijo backtracking and
//! sized by the Barzilai-Borwein rule in the `A + σW` metric.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{radial_metric_weight, EnergyBreakdown, EnergyField, Gradient, Params};
use crate::fft3::Dst3;
use crate::grid::{BoxGrid, Field3D, RadialField, RadialGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative residual tolerance.
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub init_step: f64,
    /// Shift `σ` of the preconditioner; `None` picks `max(ω, 1/ℓ²)` with
    /// `ℓ` the domain size.
    #[serde(default)]
    pub shift: Option<f64>,
}

impl SolverConfig {
    pub fn radial() -> Self {
        Self {
            max_iters: 20_000,
            grad_tol: 1e-6,
            armijo_c: 1e-4,
            backtrack: 0.5,
            init_step: 1.0,
            shift: None,
        }
    }

    pub fn box3d() -> Self {
        Self {
            max_iters: 3_000,
            ..Self::radial()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad("backtrack must lie in (0, 1)");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if !(self.init_step > 0.0) {
            return bad("init_step must be positive");
        }
        if let Some(s) = self.shift {
            if !(s > 0.0) {
                return bad("shift must be positive");
            }
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::radial()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    IterationCap,
    LineSearchStalled,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct MinimizerResult<F> {
    pub field: F,
    pub breakdown: EnergyBreakdown,
    pub residual_norm: f64,
    pub relative_residual: f64,
    pub e_norm: f64,
    pub iters: usize,
    /// Zero for radial fields.
    pub asymmetry: f64,
    pub converged: bool,
    pub status: Status,
    /// Total energy after every accepted step, starting with the initial one.
    pub energies: Vec<f64>,
}

/// Scalar part of a [`MinimizerResult`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizerSummary {
    pub breakdown: EnergyBreakdown,
    pub residual_norm: f64,
    pub relative_residual: f64,
    pub e_norm: f64,
    pub iters: usize,
    pub asymmetry: f64,
    pub converged: bool,
    pub status: Status,
}

impl<F> MinimizerResult<F> {
    pub fn summary(&self) -> MinimizerSummary {
        MinimizerSummary {
            breakdown: self.breakdown,
            residual_norm: self.residual_norm,
            relative_residual: self.relative_residual,
            e_norm: self.e_norm,
            iters: self.iters,
            asymmetry: self.asymmetry,
            converged: self.converged,
            status: self.status,
        }
    }
}

/// Fields that the descent can precondition.
pub trait Descent: EnergyField {
    /// Diagonal of the `L²` mass `W`.
    fn metric_weights(&self) -> Vec<f64>;

    /// `(A + σW)⁻¹ rhs` on the free nodes, zero elsewhere.
    fn smooth(&self, rhs: &[f64], sigma: f64) -> Vec<f64>;

    /// Size of the computational domain.
    fn domain_length(&self) -> f64;

    fn asymmetry_of(&self) -> f64 {
        0.0
    }
}

impl Descent for RadialField {
    fn metric_weights(&self) -> Vec<f64> {
        let g = self.grid();
        (0..g.n())
            .map(|i| 4.0 * PI * radial_metric_weight(g, i))
            .collect()
    }

    fn smooth(&self, rhs: &[f64], sigma: f64) -> Vec<f64> {
        // Tridiagonal system on nodes 0..n-2 (the outer node is fixed).
        let g = self.grid();
        let n = g.n();
        let m = n - 1;
        let h = g.h();
        let c = 4.0 * PI / h;
        let a: Vec<f64> = (0..m)
            .map(|k| {
                let r = 0.5 * (g.node(k) + g.node(k + 1));
                c * r * r
            })
            .collect();
        let diag: Vec<f64> = (0..m)
            .map(|i| {
                let left = if i > 0 { a[i - 1] } else { 0.0 };
                left + a[i] + sigma * 4.0 * PI * radial_metric_weight(g, i)
            })
            .collect();
        // Thomas algorithm; off-diagonals are −a[i] between i and i+1.
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        cp[0] = -a[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for i in 1..m {
            let denom = diag[i] + a[i - 1] * cp[i - 1];
            cp[i] = if i + 1 < m { -a[i] / denom } else { 0.0 };
            dp[i] = (rhs[i] + a[i - 1] * dp[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[m - 1] = dp[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    }

    fn domain_length(&self) -> f64 {
        self.grid().r_max()
    }
}

impl Descent for Field3D {
    fn metric_weights(&self) -> Vec<f64> {
        vec![self.grid().cell_volume(); self.grid().len()]
    }

    fn smooth(&self, rhs: &[f64], sigma: f64) -> Vec<f64> {
        // Box-interior Dirichlet Laplacian diagonalized by the sine
        // transform; the ball mask is applied to input and output.
        let g = self.grid();
        let n = g.n();
        let m = n - 2;
        let h = g.h();
        let active = self.active_mask();
        let mut inner = vec![0.0; m * m * m];
        inner.par_chunks_mut(m * m).enumerate().for_each(|(i, plane)| {
            for j in 0..m {
                for k in 0..m {
                    let idx = g.index(i + 1, j + 1, k + 1);
                    if active[idx] {
                        plane[j * m + k] = rhs[idx];
                    }
                }
            }
        });
        let dst = Dst3::new(m);
        dst.process(&mut inner);
        let s: Vec<f64> = (1..=m)
            .map(|a| {
                let t = (PI * a as f64 / (2.0 * (m + 1) as f64)).sin();
                4.0 * t * t * h
            })
            .collect();
        let norm = (2.0 / (m + 1) as f64).powi(3);
        let mass = sigma * h * h * h;
        inner.par_chunks_mut(m * m).enumerate().for_each(|(i, plane)| {
            for j in 0..m {
                for k in 0..m {
                    plane[j * m + k] *= norm / (s[i] + s[j] + s[k] + mass);
                }
            }
        });
        dst.process(&mut inner);
        let mut out = vec![0.0; g.len()];
        out.par_iter_mut().enumerate().for_each(|(idx, o)| {
            if active[idx] {
                let (i, j, k) = g.unravel(idx);
                *o = inner[((i - 1) * m + (j - 1)) * m + (k - 1)];
            }
        });
        out
    }

    fn domain_length(&self) -> f64 {
        self.mask_radius().unwrap_or(self.grid().half_width())
    }

    fn asymmetry_of(&self) -> f64 {
        asymmetry(self).unwrap_or(0.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const AMPLITUDE_LIMIT: f64 = 1e100;

/// Generic descent shared by [`minimize_radial`] and [`minimize_3d`].
pub fn minimize<F: Descent>(
    params: &Params,
    init: &F,
    cfg: &SolverConfig,
) -> Result<MinimizerResult<F>> {
    params.validate()?;
    cfg.validate()?;
    let free = init.free_nodes();
    if let Some((node, &value)) = init
        .values()
        .iter()
        .enumerate()
        .find(|(i, v)| !free[*i] && **v != 0.0)
    {
        return Err(Error::Dirichlet { node, value });
    }
    let weights = init.metric_weights();
    let ell = init.domain_length();
    let sigma = cfg.shift.unwrap_or(params.omega.max(1.0 / (ell * ell)));

    let mut u = init.clone();
    let mut grad = u.gradient(params)?;
    let mut energies = vec![grad.breakdown.total];
    let mut alpha = cfg.init_step;
    let mut status = Status::IterationCap;
    let mut iters = 0;

    let converged = |g: &Gradient<F>| -> bool {
        let e = (g.raw.grad2 + g.raw.coulomb.sqrt()).sqrt();
        g.relative() <= cfg.grad_tol && g.norm <= cfg.grad_tol * e.max(1.0)
    };

    while iters < cfg.max_iters {
        if converged(&grad) {
            status = Status::Converged;
            break;
        }
        let ge: Vec<f64> = grad
            .residual
            .values()
            .iter()
            .zip(&weights)
            .map(|(r, w)| r * w)
            .collect();
        let z = u.smooth(&ge, sigma);
        let slope = -dot(&ge, &z);
        if !(slope < 0.0) {
            status = Status::LineSearchStalled;
            break;
        }
        let e0 = grad.breakdown.total;
        let mut step = alpha;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = u.clone();
            for (v, d) in trial.values_mut().iter_mut().zip(&z) {
                *v -= step * d;
            }
            if let Ok(tg) = trial.gradient(params) {
                let e = tg.breakdown.total;
                if e.is_finite() && e <= e0 + cfg.armijo_c * step * slope {
                    accepted = Some((trial, tg));
                    break;
                }
            }
            step *= cfg.backtrack;
        }
        let Some((next, next_grad)) = accepted else {
            status = Status::LineSearchStalled;
            break;
        };
        iters += 1;
        // Barzilai-Borwein in the A + σW metric: s = −step·z, Bs = −step·g.
        let ge_next: Vec<f64> = next_grad
            .residual
            .values()
            .iter()
            .zip(&weights)
            .map(|(r, w)| r * w)
            .collect();
        let s_bs = step * step * dot(&z, &ge);
        let s_y: f64 = -step
            * z.iter()
                .zip(ge_next.iter().zip(&ge))
                .map(|(zi, (a, b))| zi * (a - b))
                .sum::<f64>();
        alpha = if s_y > 0.0 && s_bs > 0.0 {
            (s_bs / s_y).clamp(1e-6 * cfg.init_step, 1e6 * cfg.init_step)
        } else {
            (2.0 * step).min(1e6 * cfg.init_step)
        };
        u = next;
        grad = next_grad;
        energies.push(grad.breakdown.total);
        let amp = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(amp < AMPLITUDE_LIMIT) || !(grad.breakdown.total > -AMPLITUDE_LIMIT) {
            status = Status::Diverged;
            break;
        }
    }
    if status == Status::IterationCap && converged(&grad) {
        status = Status::Converged;
    }
    let e_norm = (grad.raw.grad2 + grad.raw.coulomb.sqrt()).sqrt();
    let asymmetry = if u.is_zero() { 0.0 } else { u.asymmetry_of() };
    Ok(MinimizerResult {
        breakdown: grad.breakdown,
        residual_norm: grad.norm,
        relative_residual: grad.relative(),
        e_norm,
        iters,
        asymmetry,
        converged: status == Status::Converged,
        status,
        energies,
        field: u,
    })
}

pub fn minimize_radial(
    params: &Params,
    init: &RadialField,
    cfg: &SolverConfig,
) -> Result<MinimizerResult<RadialField>> {
    minimize(params, init, cfg)
}

pub fn minimize_3d(
    params: &Params,
    init: &Field3D,
    cfg: &SolverConfig,
) -> Result<MinimizerResult<Field3D>> {
    minimize(params, init, cfg)
}

/// Shell average of a box field: node `x` goes to shell `round(|x|/h)`.
/// Empty shells are filled by linear interpolation between the nearest
/// non-empty ones (constant extrapolation at the ends).
pub fn spherical_average(u: &Field3D) -> Result<RadialField> {
    let g = u.grid();
    let shell = |idx: usize| ((g.radius_key(idx) as f64).sqrt() / 2.0).round() as usize;
    let shells = (0..g.len()).map(shell).max().unwrap_or(0) + 1;
    let mut sum = vec![0.0; shells];
    let mut count = vec![0usize; shells];
    for (idx, &v) in u.values().iter().enumerate() {
        let s = shell(idx);
        sum[s] += v;
        count[s] += 1;
    }
    let filled: Vec<usize> = (0..shells).filter(|&s| count[s] > 0).collect();
    let mean = |s: usize| sum[s] / count[s] as f64;
    let values: Vec<f64> = (0..shells)
        .map(|s| {
            if count[s] > 0 {
                return mean(s);
            }
            let hi = filled.partition_point(|&f| f < s);
            match (hi.checked_sub(1).map(|i| filled[i]), filled.get(hi)) {
                (Some(a), Some(&b)) => {
                    let t = (s - a) as f64 / (b - a) as f64;
                    (1.0 - t) * mean(a) + t * mean(b)
                }
                (Some(a), None) => mean(a),
                (None, Some(&b)) => mean(b),
                (None, None) => 0.0,
            }
        })
        .collect();
    let n = values.len().max(RadialGrid::MIN_NODES);
    let mut padded = values.clone();
    padded.resize(n, *values.last().unwrap_or(&0.0));
    RadialField::new(RadialGrid::new(n, (n - 1) as f64 * g.h())?, padded)
}

/// Mean over every set of nodes at exactly the same distance from the centre.
/// This is the best radial approximation available on the lattice: it is
/// the identity on sampled radial profiles.
pub fn radial_lift(u: &Field3D) -> Field3D {
    let g = u.grid();
    let max_key = 3 * (g.n() as i64 - 1).pow(2) as usize;
    let mut sum = vec![0.0; max_key + 1];
    let mut count = vec![0u32; max_key + 1];
    for (idx, &v) in u.values().iter().enumerate() {
        let k = g.radius_key(idx) as usize;
        sum[k] += v;
        count[k] += 1;
    }
    let values = (0..g.len())
        .map(|idx| {
            let k = g.radius_key(idx) as usize;
            sum[k] / count[k] as f64
        })
        .collect();
    Field3D::zeros(*g, None).with_values(values)
}

/// `‖u − S(u)‖ / ‖u‖` with `S` the lattice radial lift of [`radial_lift`].
pub fn asymmetry(u: &Field3D) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let s = radial_lift(u);
    let (num, den) = u
        .values()
        .iter()
        .zip(s.values())
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - y) * (x - y), b + x * x));
    Ok((num / den).sqrt().min(1.0))
}

/// Starting fields for the descent. Every generator is deterministic given
/// its arguments; seeded ones record nothing beyond the seed.
pub mod init {
    use super::*;

    /// `amp · exp(−r²/(2w²))` with the outer node clamped to zero.
    pub fn gaussian_radial(grid: RadialGrid, amp: f64, width: f64) -> Result<RadialField> {
        let values = grid
            .nodes()
            .map(|r| amp * (-r * r / (2.0 * width * width)).exp())
            .collect();
        Ok(RadialField::new(grid, values)?.dirichlet())
    }

    /// Gaussian centred at `center`, masked.
    pub fn gaussian_3d(
        grid: BoxGrid,
        mask: Option<f64>,
        center: [f64; 3],
        amp: f64,
        width: f64,
    ) -> Result<Field3D> {
        multi_bump(grid, mask, &[center], amp, width)
    }

    /// Sum of equal Gaussians at the given centres.
    pub fn multi_bump(
        grid: BoxGrid,
        mask: Option<f64>,
        centers: &[[f64; 3]],
        amp: f64,
        width: f64,
    ) -> Result<Field3D> {
        let mut f = Field3D::sample(grid, mask, |x| {
            centers
                .iter()
                .map(|c| {
                    let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
                    amp * (-d2 / (2.0 * width * width)).exp()
                })
                .sum()
        })?;
        f.apply_mask();
        Ok(f)
    }

    /// Random radial start: a Gaussian whose amplitude and width are drawn
    /// log-uniformly from the given ranges, times a random smooth bump
    /// factor.
    pub fn seeded_radial(
        grid: RadialGrid,
        seed: u64,
        amp: (f64, f64),
        width: (f64, f64),
    ) -> Result<RadialField> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = log_uniform(&mut rng, amp);
        let w = log_uniform(&mut rng, width);
        let wiggle: f64 = rng.gen_range(-0.5..0.5);
        let k: f64 = rng.gen_range(0.5..3.0);
        let values = grid
            .nodes()
            .map(|r| {
                let x = r / w;
                a * (-x * x / 2.0).exp() * (1.0 + wiggle * (k * x).cos())
            })
            .collect();
        Ok(RadialField::new(grid, values)?.dirichlet())
    }

    /// Random 3D start: `bumps` Gaussians at random centres inside the
    /// support, each with random amplitude in `amp` and width in `width`.
    pub fn seeded_3d(
        grid: BoxGrid,
        mask: Option<f64>,
        seed: u64,
        bumps: usize,
        amp: (f64, f64),
        width: (f64, f64),
    ) -> Result<Field3D> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reach = mask.unwrap_or(grid.half_width()) * 0.6;
        let specs: Vec<([f64; 3], f64, f64)> = (0..bumps)
            .map(|_| {
                let c = loop {
                    let c = [
                        rng.gen_range(-reach..reach),
                        rng.gen_range(-reach..reach),
                        rng.gen_range(-reach..reach),
                    ];
                    if c.iter().map(|x| x * x).sum::<f64>() <= reach * reach {
                        break c;
                    }
                };
                (c, log_uniform(&mut rng, amp), log_uniform(&mut rng, width))
            })
            .collect();
        let mut f = Field3D::sample(grid, mask, |x| {
            specs
                .iter()
                .map(|(c, a, w)| {
                    let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
                    a * (-d2 / (2.0 * w * w)).exp()
                })
                .sum()
        })?;
        f.apply_mask();
        Ok(f)
    }

    fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
        if lo == hi {
            return lo;
        }
        (rng.gen_range(lo.ln()..hi.ln())).exp()
    }
}
