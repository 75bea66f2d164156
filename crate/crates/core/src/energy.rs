//! The functionals `I_λ`, `J_ε` and `J`, their first variations, scalings,
//! and the quantities `M(u)` and `‖u‖_E`.
//!
//! Radial discretization. With `m_i = t_i r_i²` (trapezoid weight times `r²`):
//!
//! ```text
//! ∫|∇u|² ≈ 4π Σ_c ((u_{c+1} − u_c)/h)² r_{c+½}² h
//! ∫ f    ≈ 4π Σ_i m_i f_i            (mass, power and Coulomb densities)
//! ```
//!
//! The residual returned by [`residual`] is the Riesz representative of the
//! discrete gradient in the inner product `⟨a, b⟩ = 4π Σ m̃_i a_i b_i`, where
//! `m̃_0 = h³/24` is the volume of the half cell around the origin. Away from
//! the origin it is the pointwise `−Δu + ωu + λφ_u u − |u|^{p−2}u`; at the
//! origin it reduces to the symmetric Laplacian `6(u_0 − u_1)/h²`.
//!
//! Box discretization: edge differences for the gradient, the 7-point
//! Laplacian for the residual, and `h³ Σ` for every volume integral.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coulomb::{potential_3d, potential_of_density};
use crate::grid::{BoxGrid, Field3D, RadialField, RadialGrid};
use crate::{Error, Result};

/// Exponent, coupling and mass coefficient of `I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub lambda: f64,
    pub omega: f64,
    /// Domain radius; `None` stands for the whole space (up to truncation).
    #[serde(rename = "R", default)]
    pub radius: Option<f64>,
}

impl Params {
    pub fn new(p: f64, lambda: f64, omega: f64) -> Result<Self> {
        let params = Self {
            p,
            lambda,
            omega,
            radius: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// `J`: `λ = 1`, `ω = 0`.
    pub fn zero_mass(p: f64) -> Result<Self> {
        Self::new(p, 1.0, 0.0)
    }

    /// `J_ε`: `λ = 1`, `ω = ε²`.
    pub fn rescaled(p: f64, eps: f64) -> Result<Self> {
        Self::new(p, 1.0, eps * eps)
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 2.0 && self.p <= 6.0) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (2, 6], got {}",
                self.p
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be non-negative, got {}",
                self.omega
            )));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "radius must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Unweighted integrals from which every breakdown is assembled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RawTerms {
    /// `∫|∇u|²`
    pub grad2: f64,
    /// `∫u²`
    pub l2: f64,
    /// `D(u², u²)`
    pub coulomb: f64,
    /// `∫|u|^p`
    pub lp: f64,
}

impl RawTerms {
    pub fn breakdown(&self, params: &Params) -> EnergyBreakdown {
        EnergyBreakdown::new(
            0.5 * self.grad2,
            0.5 * params.omega * self.l2,
            0.25 * params.lambda * self.coulomb,
            -self.lp / params.p,
        )
    }
}

/// The four terms of `I` and their sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub mass: f64,
    pub coulomb: f64,
    pub power: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, mass: f64, coulomb: f64, power: f64) -> Self {
        Self {
            kinetic,
            mass,
            coulomb,
            power,
            total: kinetic + mass + coulomb + power,
        }
    }

    pub fn row(&self, params: &Params) -> EnergyRow {
        EnergyRow {
            kinetic: self.kinetic,
            mass: self.mass,
            coulomb: self.coulomb,
            power: self.power,
            total: self.total,
            p: params.p,
            lambda: params.lambda,
            omega: params.omega,
            radius: params.radius,
        }
    }
}

/// One CSV row: a breakdown together with the parameters that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub kinetic: f64,
    pub mass: f64,
    pub coulomb: f64,
    pub power: f64,
    pub total: f64,
    pub p: f64,
    pub lambda: f64,
    pub omega: f64,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
}

/// Residual field with the norms used by the convergence test.
#[derive(Debug, Clone)]
pub struct Gradient<F> {
    pub breakdown: EnergyBreakdown,
    pub raw: RawTerms,
    /// Riesz representative of the discrete first variation.
    pub residual: F,
    /// `‖residual‖` in the discrete `L²` metric.
    pub norm: f64,
    /// `‖−Δu‖ + ω‖u‖ + λ‖φu‖ + ‖|u|^{p−1}‖`, the size of the individual
    /// terms of the residual.
    pub scale: f64,
}

impl<F> Gradient<F> {
    /// `norm / scale`, or 0 for the zero field.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.norm / self.scale
        } else {
            0.0
        }
    }
}

/// Fields on which the functional is defined.
pub trait EnergyField: Clone + Send + Sync + Sized {
    fn raw_terms(&self, p: f64) -> Result<RawTerms>;

    fn gradient(&self, params: &Params) -> Result<Gradient<Self>>;

    fn values(&self) -> &[f64];

    fn values_mut(&mut self) -> &mut [f64];

    /// Discrete `L²` inner product.
    fn inner(&self, a: &[f64], b: &[f64]) -> f64;

    /// Which nodes are free unknowns.
    fn free_nodes(&self) -> Vec<bool>;

    /// `amplitude · u(x / stretch)`, exact on the node set: the returned field
    /// lives on the grid stretched by `stretch`.
    fn rescale(&self, stretch: f64, amplitude: f64) -> Result<Self>;

    fn is_zero(&self) -> bool {
        self.values().iter().all(|&v| v == 0.0)
    }
}

#[inline]
fn signed_pow(u: f64, q: f64) -> f64 {
    // |u|^{q} · sign(u), continuous extension 0 at u = 0.
    if u == 0.0 {
        0.0
    } else {
        u.abs().powf(q) * u.signum()
    }
}

/// `m̃_i`: trapezoid weight times `r_i²`, with the origin half cell volume
/// `h³/24` at node 0 (used only as a metric weight).
pub(crate) fn radial_metric_weight(grid: &RadialGrid, i: usize) -> f64 {
    if i == 0 {
        grid.h().powi(3) / 24.0
    } else {
        let r = grid.node(i);
        grid.trapezoid_weight(i) * r * r
    }
}

fn radial_raw_terms(field: &RadialField, rho: &[f64], phi: &[f64], p: f64) -> RawTerms {
    let g = field.grid();
    let u = field.values();
    let h = g.h();
    let n = g.n();
    let mut grad2 = 0.0;
    for c in 0..n - 1 {
        let rm = 0.5 * (g.node(c) + g.node(c + 1));
        let d = (u[c + 1] - u[c]) / h;
        grad2 += d * d * rm * rm * h;
    }
    let (mut l2, mut lp, mut coul) = (0.0, 0.0, 0.0);
    for i in 1..n {
        let r = g.node(i);
        let m = g.trapezoid_weight(i) * r * r;
        l2 += m * rho[i];
        lp += m * u[i].abs().powf(p);
        coul += m * rho[i] * phi[i];
    }
    RawTerms {
        grad2: 4.0 * PI * grad2,
        l2: 4.0 * PI * l2,
        coulomb: (4.0 * PI * coul).max(0.0),
        lp: 4.0 * PI * lp,
    }
}

impl EnergyField for RadialField {
    fn raw_terms(&self, p: f64) -> Result<RawTerms> {
        let rho: Vec<f64> = self.values().iter().map(|v| v * v).collect();
        let phi = potential_of_density(self.grid(), &rho);
        Ok(radial_raw_terms(self, &rho, &phi, p))
    }

    fn gradient(&self, params: &Params) -> Result<Gradient<Self>> {
        let g = *self.grid();
        let u = self.values();
        let n = g.n();
        let h = g.h();
        let p = params.p;
        let rho: Vec<f64> = u.iter().map(|v| v * v).collect();
        let phi = potential_of_density(&g, &rho);
        let raw = radial_raw_terms(self, &rho, &phi, p);

        let mut res = vec![0.0; n];
        let (mut lap_n, mut mass_n, mut coul_n, mut pow_n) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n - 1 {
            let w = radial_metric_weight(&g, i);
            // −Δu as (metric-normalized) difference of midpoint fluxes.
            let r_out = 0.5 * (g.node(i) + g.node(i + 1));
            let mut flux = r_out * r_out * (u[i] - u[i + 1]);
            if i > 0 {
                let r_in = 0.5 * (g.node(i - 1) + g.node(i));
                flux += r_in * r_in * (u[i] - u[i - 1]);
            }
            let lap = flux / (h * w);
            let (mass, coul, pow) = if i == 0 {
                (0.0, 0.0, 0.0)
            } else {
                (
                    params.omega * u[i],
                    params.lambda * phi[i] * u[i],
                    signed_pow(u[i], p - 1.0),
                )
            };
            res[i] = lap + mass + coul - pow;
            lap_n += w * lap * lap;
            mass_n += w * mass * mass;
            coul_n += w * coul * coul;
            pow_n += w * pow * pow;
        }
        let residual = RadialField::new(g, res)?.dirichlet();
        let norm = self.inner(residual.values(), residual.values()).sqrt();
        let scale = [lap_n, mass_n, coul_n, pow_n]
            .iter()
            .map(|s| (4.0 * PI * s).sqrt())
            .sum();
        Ok(Gradient {
            breakdown: raw.breakdown(params),
            raw,
            residual,
            norm,
            scale,
        })
    }

    fn values(&self) -> &[f64] {
        RadialField::values(self)
    }

    fn values_mut(&mut self) -> &mut [f64] {
        RadialField::values_mut(self)
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let g = self.grid();
        4.0 * PI
            * a.iter()
                .zip(b)
                .enumerate()
                .map(|(i, (x, y))| radial_metric_weight(g, i) * x * y)
                .sum::<f64>()
    }

    fn free_nodes(&self) -> Vec<bool> {
        let n = self.grid().n();
        (0..n).map(|i| i + 1 < n).collect()
    }

    fn rescale(&self, stretch: f64, amplitude: f64) -> Result<Self> {
        let grid = self.grid().scaled(stretch)?;
        let field = RadialField::new(grid, self.values().iter().map(|v| amplitude * v).collect())?;
        Ok(if self.is_dirichlet() {
            field.dirichlet()
        } else {
            field
        })
    }
}

/// Visits every interior edge once as `(a, b)` with `b` the `+1` neighbour of
/// `a` along some axis.
fn box_edge_sum(grid: &BoxGrid, f: impl Fn(usize, usize) -> f64 + Sync) -> f64 {
    let n = grid.n();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    let a = grid.index(i, j, k);
                    if i + 1 < n {
                        s += f(a, grid.index(i + 1, j, k));
                    }
                    if j + 1 < n {
                        s += f(a, grid.index(i, j + 1, k));
                    }
                    if k + 1 < n {
                        s += f(a, a + 1);
                    }
                }
            }
            s
        })
        .sum()
}

/// `Σ_{neighbours j} (u_i − u_j)`, i.e. `h² · (−Δ_h u)_i`, with neighbours
/// restricted to the box.
fn box_neg_laplacian_h2(grid: &BoxGrid, u: &[f64], idx: usize) -> f64 {
    let n = grid.n();
    let (i, j, k) = grid.unravel(idx);
    let mut s = 0.0;
    let v = u[idx];
    if i > 0 {
        s += v - u[grid.index(i - 1, j, k)];
    }
    if i + 1 < n {
        s += v - u[grid.index(i + 1, j, k)];
    }
    if j > 0 {
        s += v - u[grid.index(i, j - 1, k)];
    }
    if j + 1 < n {
        s += v - u[grid.index(i, j + 1, k)];
    }
    if k > 0 {
        s += v - u[idx - 1];
    }
    if k + 1 < n {
        s += v - u[idx + 1];
    }
    s
}

fn box_raw_terms(field: &Field3D, phi: &[f64], p: f64) -> RawTerms {
    let g = field.grid();
    let u = field.values();
    let dv = g.cell_volume();
    let grad2 = g.h()
        * box_edge_sum(g, |a, b| {
            let d = u[a] - u[b];
            d * d
        });
    let (l2, lp, coul) = u
        .par_iter()
        .zip(phi.par_iter())
        .map(|(&v, &ph)| (v * v, v.abs().powf(p), v * v * ph))
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    RawTerms {
        grad2,
        l2: dv * l2,
        coulomb: (dv * coul).max(0.0),
        lp: dv * lp,
    }
}

impl EnergyField for Field3D {
    fn raw_terms(&self, p: f64) -> Result<RawTerms> {
        let phi = potential_3d(self)?;
        Ok(box_raw_terms(self, phi.values(), p))
    }

    fn gradient(&self, params: &Params) -> Result<Gradient<Self>> {
        let g = *self.grid();
        let u = Field3D::values(self);
        let p = params.p;
        let h2 = g.h() * g.h();
        let phi = potential_3d(self)?;
        let raw = box_raw_terms(self, phi.values(), p);
        let active = self.active_mask();
        let parts: Vec<(f64, [f64; 4])> = (0..g.len())
            .into_par_iter()
            .map(|idx| {
                if !active[idx] {
                    return (0.0, [0.0; 4]);
                }
                let lap = box_neg_laplacian_h2(&g, u, idx) / h2;
                let mass = params.omega * u[idx];
                let coul = params.lambda * phi.values()[idx] * u[idx];
                let pow = signed_pow(u[idx], p - 1.0);
                (
                    lap + mass + coul - pow,
                    [lap * lap, mass * mass, coul * coul, pow * pow],
                )
            })
            .collect();
        let dv = g.cell_volume();
        let mut sums = [0.0; 4];
        for (_, s) in &parts {
            for (acc, v) in sums.iter_mut().zip(s) {
                *acc += v;
            }
        }
        let residual = self.with_values(parts.into_iter().map(|(r, _)| r).collect());
        let norm = self.inner(residual.values(), residual.values()).sqrt();
        let scale = sums.iter().map(|s| (dv * s).sqrt()).sum();
        Ok(Gradient {
            breakdown: raw.breakdown(params),
            raw,
            residual,
            norm,
            scale,
        })
    }

    fn values(&self) -> &[f64] {
        Field3D::values(self)
    }

    fn values_mut(&mut self) -> &mut [f64] {
        Field3D::values_mut(self)
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid().cell_volume() * a.par_iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    fn free_nodes(&self) -> Vec<bool> {
        self.active_mask()
    }

    fn rescale(&self, stretch: f64, amplitude: f64) -> Result<Self> {
        let grid = BoxGrid::new(self.grid().n(), self.grid().half_width() * stretch)?;
        Field3D::new(
            grid,
            Field3D::values(self).iter().map(|v| amplitude * v).collect(),
            self.mask_radius().map(|r| r * stretch),
        )
    }
}

/// `I(u)` with the given parameters.
pub fn eval_i<F: EnergyField>(u: &F, params: &Params) -> Result<EnergyBreakdown> {
    params.validate()?;
    Ok(u.raw_terms(params.p)?.breakdown(params))
}

/// `J(v)`: `λ = 1`, `ω = 0`.
pub fn eval_j<F: EnergyField>(v: &F, p: f64) -> Result<EnergyBreakdown> {
    eval_i(v, &Params::zero_mass(p)?)
}

/// `−Δu + ωu + λφ_u u − |u|^{p−2}u`, zero at constrained nodes.
pub fn residual<F: EnergyField>(u: &F, params: &Params) -> Result<F> {
    params.validate()?;
    Ok(u.gradient(params)?.residual)
}

/// `‖u‖_E = (∫|∇u|² + D(u², u²)^{1/2})^{1/2}`.
pub fn e_norm<F: EnergyField>(u: &F) -> Result<f64> {
    let raw = u.raw_terms(3.0)?;
    Ok((raw.grad2 + raw.coulomb.sqrt()).sqrt())
}

/// `M(u) = ∫|∇u|² + D(u², u²)`.
pub fn m_functional<F: EnergyField>(u: &F) -> Result<f64> {
    let raw = u.raw_terms(3.0)?;
    Ok(raw.grad2 + raw.coulomb)
}

/// `ε = λ^{(p−2)/(4(3−p))}` for `p ∈ (2, 3)`.
pub fn limit_epsilon(lambda: f64, p: f64) -> Result<f64> {
    if !(p > 2.0 && p < 3.0) {
        return Err(Error::InvalidParameter(format!(
            "the rescaling needs p in (2, 3), got {p}"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(lambda.powf((p - 2.0) / (4.0 * (3.0 - p))))
}

/// `v(x) = ε^{2/(p−2)} u(εx)`, which maps `I_λ` (with `ω = 1`) to
/// `ε^{−(6−p)/(p−2)} J_ε`. Returns `(v, ε)`; `v` lives on the grid stretched
/// by `1/ε`.
pub fn scale_to_limit<F: EnergyField>(u: &F, lambda: f64, p: f64) -> Result<(F, f64)> {
    let eps = limit_epsilon(lambda, p)?;
    Ok((u.rescale(1.0 / eps, eps.powf(2.0 / (p - 2.0)))?, eps))
}

/// Inverse of [`scale_to_limit`]: `u(x) = ε^{−2/(p−2)} v(x/ε)`.
pub fn scale_from_limit<F: EnergyField>(v: &F, lambda: f64, p: f64) -> Result<F> {
    let eps = limit_epsilon(lambda, p)?;
    v.rescale(eps, eps.powf(-2.0 / (p - 2.0)))
}

/// `v(x) = λ² u(λx)`, on the grid stretched by `1/λ`.
pub fn dilate<F: EnergyField>(u: &F, lambda: f64) -> Result<F> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dilation factor must be positive, got {lambda}"
        )));
    }
    u.rescale(1.0 / lambda, lambda * lambda)
}
