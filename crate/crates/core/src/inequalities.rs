//! Coulomb-energy inequalities: the log-weighted lower bound, the dyadic
//! band lemma, the weighted sequence inequality and the two upper bounds
//! (Hardy-Littlewood-Sobolev and the pointwise radial estimate).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coulomb::coulomb_energy_radial;
use crate::grid::{RadialField, RadialGrid};
use crate::quad::GaussLegendre;
use crate::{Error, Result};

/// `4π∫u²r^{3/2}(1+|log r|)^{−α}dr`, the weighted `L²` norm squared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormValue {
    pub alpha: f64,
    pub value: f64,
}

fn log_weight(r: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        (1.0 + r.ln().abs()).powf(-alpha)
    }
}

/// `4π∫ ρ̂(r) r^{3/2} (1+|log r|)^{−α} dr` where `ρ̂` is the piecewise-linear
/// interpolant of `u²`. Every cell is integrated by Gauss-Legendre, split
/// at `r = 1`; on `[0, h]` the substitution `r = h y²` removes the
/// `r^{1/2}` singularity of the Jacobian.
fn weighted_l2(u: &RadialField, alpha: f64) -> f64 {
    let g = u.grid();
    let v = u.values();
    let h = g.h();
    let gl = GaussLegendre::new(8);
    let near = GaussLegendre::new(24);
    let mut total = 0.0;
    for c in 0..g.n() - 1 {
        let (a, b) = (g.node(c), g.node(c + 1));
        let (ua, ub) = (v[c] * v[c], v[c + 1] * v[c + 1]);
        if ua == 0.0 && ub == 0.0 {
            continue;
        }
        let interp = |r: f64| ua + (ub - ua) * (r - a) / h;
        let f = |r: f64| interp(r) * r.powf(1.5) * log_weight(r, alpha);
        if c == 0 {
            // r = h y², dr = 2h y dy, r^{3/2} = h^{3/2} y³.
            let fy = |y: f64| {
                let r = h * y * y;
                interp(r) * h.powf(2.5) * 2.0 * y.powi(4) * log_weight(r, alpha)
            };
            if a < 1.0 && 1.0 < b {
                let y1 = (1.0 / h).sqrt();
                total += near.integrate(fy, 0.0, y1) + near.integrate(fy, y1, 1.0);
            } else {
                total += near.integrate(fy, 0.0, 1.0);
            }
        } else if a < 1.0 && 1.0 < b {
            total += gl.integrate(f, a, 1.0) + gl.integrate(f, 1.0, b);
        } else {
            total += gl.integrate(f, a, b);
        }
    }
    4.0 * PI * total
}

pub fn weighted_norm(u: &RadialField, alpha: f64) -> Result<WeightedNormValue> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "log exponent must be nonnegative, got {alpha}"
        )));
    }
    Ok(WeightedNormValue {
        alpha,
        value: weighted_l2(u, alpha),
    })
}

fn nonzero(u: &RadialField) -> Result<()> {
    if u.is_zero() {
        Err(Error::ZeroField)
    } else {
        Ok(())
    }
}

/// `D(u²,u²) / WeightedNorm(u, α)²`.
pub fn lower_bound_ratio(u: &RadialField, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log exponent must be positive, got {alpha}"
        )));
    }
    nonzero(u)?;
    let wn = weighted_norm(u, alpha)?.value;
    Ok(coulomb_energy_radial(u).energy / (wn * wn))
}

/// `D(u²,u²) / ∥u∥⁴_{L^{12/5}}`.
pub fn hls_ratio(u: &RadialField) -> Result<f64> {
    nonzero(u)?;
    let g = u.grid();
    let lp: f64 = u
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| g.trapezoid_weight(i) * g.node(i).powi(2) * x.abs().powf(2.4))
        .sum::<f64>()
        * 4.0
        * PI;
    Ok(coulomb_energy_radial(u).energy / lp.powf(5.0 / 3.0))
}

/// `D(u²,u²) / (∫u²|x|^{−1/2}dx)²`.
pub fn radial_weighted_ratio(u: &RadialField) -> Result<f64> {
    nonzero(u)?;
    let w = weighted_l2(u, 0.0);
    Ok(coulomb_energy_radial(u).energy / (w * w))
}

/// Nonnegative piecewise-constant function on `(0, ∞)`:
/// `h = values[i]` on `[breaks[i], breaks[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::LengthMismatch {
                got: breaks.len(),
                expected: values.len() + 1,
            });
        }
        if !(breaks[0] > 0.0) || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "breakpoints must be positive, finite and strictly increasing".into(),
            ));
        }
        if !breaks[breaks.len() - 1].is_finite() {
            return Err(Error::InvalidParameter("support must be bounded".into()));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeDensity { node: i, value: v });
        }
        Ok(Self { breaks, values })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![1.0])
    }

    /// `h_K = Σ_{n=0}^{K} 2^{−n} 1[2^n, 2^{n+1})`: unit mass on each of
    /// `K+1` consecutive dyadic blocks.
    pub fn dyadic_spread(k: usize) -> Self {
        let breaks = (0..=k + 1).map(|n| 2f64.powi(n as i32)).collect();
        let values = (0..=k).map(|n| 2f64.powi(-(n as i32))).collect();
        Self { breaks, values }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breaks
            .windows(2)
            .zip(&self.values)
            .map(|(w, &c)| (w[0], w[1], c))
    }

    /// `∫h`.
    pub fn mass(&self) -> f64 {
        self.pieces().map(|(a, b, c)| c * (b - a)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicCheck {
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Antiderivative `W(x) = ∫_1^x (1+|log r|)^α dr`, by Gauss-Legendre in
/// `t = log r` on pieces of unit length.
struct LogWeightPrimitive {
    alpha: f64,
    gl: GaussLegendre,
}

impl LogWeightPrimitive {
    fn new(alpha: f64) -> Self {
        Self {
            alpha,
            gl: GaussLegendre::new(16),
        }
    }

    fn w(&self, r: f64) -> f64 {
        (1.0 + r.ln().abs()).powf(self.alpha)
    }

    fn at(&self, x: f64) -> f64 {
        let t1 = x.ln();
        let pieces = t1.abs().ceil().max(1.0) as usize;
        let f = |t: f64| (1.0 + t.abs()).powf(self.alpha) * t.exp();
        let step = t1 / pieces as f64;
        (0..pieces)
            .map(|k| {
                self.gl
                    .integrate(&f, k as f64 * step, (k + 1) as f64 * step)
            })
            .sum()
    }
}

/// `lhs = ∫∫_{s/2<r<2s} h(r)w(r)h(s)w(s) dr ds` with `w = (1+|log r|)^α`,
/// `rhs = (∫h)²`.
///
/// For blocks `i, j` the inner `r`-integral is
/// `[W(min(b_i, 2s)) − W(max(a_i, s/2))]_+`; the outer `s`-integral is
/// split at every kink of that expression and of `w`.
pub fn dyadic_lemma_check(h: &StepFunction, alpha: f64) -> Result<DyadicCheck> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "log exponent must be positive, got {alpha}"
        )));
    }
    let prim = LogWeightPrimitive::new(alpha);
    let gl = GaussLegendre::new(24);
    let pieces: Vec<_> = h.pieces().filter(|p| p.2 > 0.0).collect();
    let mut lhs = 0.0;
    for &(aj, bj, cj) in &pieces {
        for &(ai, bi, ci) in &pieces {
            if ai >= 2.0 * bj || bi <= 0.5 * aj {
                continue;
            }
            let mut breaks = vec![aj, bj];
            for k in [ai / 2.0, bi / 2.0, 2.0 * ai, 2.0 * bi, 0.5, 1.0, 2.0] {
                if k > aj && k < bj {
                    breaks.push(k);
                }
            }
            breaks.sort_by(f64::total_cmp);
            let inner = |s: f64| {
                let hi = bi.min(2.0 * s);
                let lo = ai.max(0.5 * s);
                if hi > lo {
                    prim.w(s) * (prim.at(hi) - prim.at(lo))
                } else {
                    0.0
                }
            };
            lhs += ci * cj * gl.integrate_pieces(inner, &breaks);
        }
    }
    let rhs = h.mass().powi(2);
    Ok(DyadicCheck {
        alpha,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceCheck {
    /// `(Σa_n)²`
    pub lhs: f64,
    /// `(Σ1/b_n)(Σb_n a_n²)`
    pub rhs: f64,
}

impl SequenceCheck {
    /// `lhs ≤ rhs` up to rounding.
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

pub fn sequence_inequality_check(a: &[f64], b: &[f64]) -> Result<SequenceCheck> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            got: b.len(),
            expected: a.len(),
        });
    }
    if let Some((i, &x)) = b.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "b must be positive, b[{i}] = {x}"
        )));
    }
    if let Some((i, &x)) = a.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
        return Err(Error::NegativeDensity { node: i, value: x });
    }
    let sa: f64 = a.iter().sum();
    let inv: f64 = b.iter().map(|x| 1.0 / x).sum();
    let wa: f64 = a.iter().zip(b).map(|(x, y)| y * x * x).sum();
    Ok(SequenceCheck {
        lhs: sa * sa,
        rhs: inv * wa,
    })
}

/// Probe profiles for the lower-bound sweep, each dilated by `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Probe {
    /// `1[0,1](r/σ)`, with the jump node sampled at `√½`.
    Indicator,
    /// `exp(−r²/(2σ²))`
    Gaussian,
    /// Unit-height tent on `[σ, 3σ]` peaked at `2σ`.
    Shell,
    /// `cos²(πr/(2σ))` on `r < σ`.
    Bump,
}

impl Probe {
    pub const ALL: [Probe; 4] = [Probe::Indicator, Probe::Gaussian, Probe::Shell, Probe::Bump];

    pub fn name(self) -> &'static str {
        match self {
            Probe::Indicator => "indicator",
            Probe::Gaussian => "gaussian",
            Probe::Shell => "shell",
            Probe::Bump => "bump",
        }
    }

    fn extent(self) -> f64 {
        match self {
            Probe::Indicator | Probe::Bump => 2.0,
            Probe::Gaussian => 10.0,
            Probe::Shell => 4.0,
        }
    }

    fn value(self, x: f64) -> f64 {
        match self {
            Probe::Indicator => {
                if (x - 1.0).abs() < 1e-12 {
                    0.5f64.sqrt()
                } else if x < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Probe::Gaussian => (-0.5 * x * x).exp(),
            Probe::Shell => (1.0 - (x - 2.0).abs()).max(0.0),
            Probe::Bump => {
                if x < 1.0 {
                    (0.5 * PI * x).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    /// Samples `u(r/σ)` on `n` nodes over `[0, extent·σ]`.
    pub fn sample(self, sigma: f64, n: usize) -> Result<RadialField> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dilation must be positive, got {sigma}"
            )));
        }
        let unit = RadialGrid::new(n, self.extent())?;
        let grid = unit.scaled(sigma)?;
        let values = unit.nodes().map(|x| self.value(x)).collect();
        Ok(RadialField::new(grid, values)?.dirichlet())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub profile: String,
    pub sigma: f64,
    pub alpha: f64,
    /// `D(u², u²)`
    pub lhs: f64,
    /// `WeightedNorm(u, α)²`
    pub rhs: f64,
    pub ratio: f64,
}

pub fn lower_bound_row(probe: Probe, sigma: f64, alpha: f64, n: usize) -> Result<LowerBoundRow> {
    let u = probe.sample(sigma, n)?;
    let wn = weighted_norm(&u, alpha)?.value;
    let lhs = coulomb_energy_radial(&u).energy;
    Ok(LowerBoundRow {
        profile: probe.name().into(),
        sigma,
        alpha,
        lhs,
        rhs: wn * wn,
        ratio: lhs / (wn * wn),
    })
}

/// Lower-bound ratio of the truncated log counterexample
/// `f = r^{−5/4}(1+|log r|)^{−β}` on `r_lo < r < r_hi`.
///
/// `D` is integrated in `t = log r`: with `ρ = f²`,
/// `D = 32π² ∫ ρ(r) r² G(r) dt`, `G(r) = ∫_{r_lo}^{r} ρ(s) s³ dt′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRatio {
    pub r_lo: f64,
    pub r_hi: f64,
    pub coulomb: f64,
    pub weighted_norm: f64,
    pub ratio: f64,
}

pub fn counterexample_ratio(
    beta: f64,
    alpha: f64,
    r_lo: f64,
    r_hi: f64,
) -> Result<CounterexampleRatio> {
    let row = crate::constructions::log_counterexample_profile(beta, alpha, &[(r_lo, r_hi)])?[0];
    let (t0, t1) = (r_lo.ln(), r_hi.ln());
    let gl = GaussLegendre::new(16);
    // ρ(e^t) e^{3t} and ρ(e^t) e^{2t}
    let in_w = |t: f64| (0.5 * t).exp() * (1.0 + t.abs()).powf(-2.0 * beta);
    let out_w = |t: f64| (-0.5 * t).exp() * (1.0 + t.abs()).powf(-2.0 * beta);
    let mut breaks = vec![t0];
    let pieces = ((t1 - t0) / 0.25).ceil() as usize;
    for k in 1..pieces {
        breaks.push(t0 + (t1 - t0) * k as f64 / pieces as f64);
    }
    breaks.push(t1);
    if t0 < 0.0 && t1 > 0.0 {
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
    let mut g_start = 0.0;
    let mut d = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (t, wt) in gl.on(a, b) {
            let g = g_start + gl.integrate(in_w, a, t);
            d += wt * out_w(t) * g;
        }
        g_start += gl.integrate(in_w, a, b);
    }
    let coulomb = 32.0 * PI * PI * d;
    Ok(CounterexampleRatio {
        r_lo,
        r_hi,
        coulomb,
        weighted_norm: row.rhs_trunc,
        ratio: coulomb / (row.rhs_trunc * row.rhs_trunc),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_radial;
    use crate::quad::adaptive_simpson;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn weighted_norm_of_a_gaussian_matches_adaptive_quadrature() {
        let u = sample_radial(|r| (-r * r / 2.0).exp(), RadialGrid::new(8193, 10.0).unwrap())
            .unwrap();
        for alpha in [0.0, 0.6, 2.0] {
            let f = |r: f64| (-r * r).exp() * r.powf(1.5) * log_weight(r, alpha);
            let oracle = 4.0
                * PI
                * (adaptive_simpson(&f, 0.0, 1.0, 1e-13) + adaptive_simpson(&f, 1.0, 10.0, 1e-13));
            let got = weighted_norm(&u, alpha).unwrap().value;
            assert!(rel(got, oracle) < 1e-6, "α={alpha}: {got} vs {oracle}");
        }
    }

    #[test]
    fn indicator_baselines() {
        let u = Probe::Indicator.sample(1.0, 2049).unwrap();
        let d = 32.0 * PI * PI / 15.0;
        assert!(rel(radial_weighted_ratio(&u).unwrap(), 5.0 / 6.0) < 0.01);
        let hls = d / (4.0 * PI / 3.0f64).powf(5.0 / 3.0);
        assert!(rel(hls_ratio(&u).unwrap(), hls) < 0.01);
        let r = lower_bound_ratio(&u, 0.6).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }

    #[test]
    fn ratios_are_dilation_invariant() {
        for sigma in [0.5, 2.0, 10.0] {
            let a = Probe::Gaussian.sample(1.0, 1025).unwrap();
            let b = Probe::Gaussian.sample(sigma, 1025).unwrap();
            assert!(rel(hls_ratio(&b).unwrap(), hls_ratio(&a).unwrap()) < 1e-6);
            assert!(
                rel(
                    radial_weighted_ratio(&b).unwrap(),
                    radial_weighted_ratio(&a).unwrap()
                ) < 1e-6
            );
            let la = coulomb_energy_radial(&a).energy;
            let lb = coulomb_energy_radial(&b).energy;
            assert!(rel(lb, sigma.powi(5) * la) < 1e-6);
        }
    }

    #[test]
    fn ratios_reject_zero_fields() {
        let z = RadialField::zeros(RadialGrid::new(64, 1.0).unwrap());
        assert!(matches!(hls_ratio(&z), Err(Error::ZeroField)));
        assert!(matches!(radial_weighted_ratio(&z), Err(Error::ZeroField)));
        assert!(matches!(lower_bound_ratio(&z, 0.6), Err(Error::ZeroField)));
    }

    #[test]
    fn chain_sandwich_on_the_log_unit_annulus() {
        let e = std::f64::consts::E;
        let g = RadialGrid::new(4097, 3.0).unwrap();
        let u = sample_radial(
            |r| if r > 1.0 / e && r < e { (PI * (r.ln() + 1.0) / 2.0).sin() } else { 0.0 },
            g,
        )
        .unwrap();
        let alpha = 0.6;
        let rw = weighted_norm(&u, 0.0).unwrap().value;
        let wn = weighted_norm(&u, alpha).unwrap().value;
        assert!(wn <= rw && wn >= 2f64.powf(-alpha) * rw);
    }

    #[test]
    fn dyadic_indicator_blocks() {
        // Block [1,2]: the band contains the whole square.
        let h = StepFunction::indicator(1.0, 2.0).unwrap();
        let mass = adaptive_simpson(&|r: f64| (1.0 + r.ln()).powf(0.6), 1.0, 2.0, 1e-13);
        let c = dyadic_lemma_check(&h, 0.6).unwrap();
        assert!(rel(c.lhs, mass * mass) < 1e-10);
        assert_eq!(c.rhs, 1.0);
        // [1,4] at vanishing α: the band has area 7 out of 9.
        let c = dyadic_lemma_check(&StepFunction::indicator(1.0, 4.0).unwrap(), 1e-12).unwrap();
        assert!(rel(c.lhs, 7.0) < 1e-9, "{}", c.lhs);
        assert!(rel(c.ratio, 7.0 / 9.0) < 1e-9);
    }

    #[test]
    fn dyadic_lhs_matches_brute_force_double_integral() {
        let h = StepFunction::new(vec![0.3, 0.7, 1.5, 5.0], vec![2.0, 0.5, 1.0]).unwrap();
        let alpha = 0.8;
        let hv = |r: f64| {
            h.pieces()
                .find(|&(a, b, _)| r >= a && r < b)
                .map_or(0.0, |p| p.2)
                * (1.0 + r.ln().abs()).powf(alpha)
        };
        let m = 3000;
        let (lo, hi) = (0.3, 5.0);
        let dx = (hi - lo) / m as f64;
        let mut bf = 0.0;
        for i in 0..m {
            let s = lo + (i as f64 + 0.5) * dx;
            for j in 0..m {
                let r = lo + (j as f64 + 0.5) * dx;
                if r > s / 2.0 && r < 2.0 * s {
                    bf += hv(r) * hv(s);
                }
            }
        }
        bf *= dx * dx;
        let c = dyadic_lemma_check(&h, alpha).unwrap();
        assert!(rel(c.lhs, bf) < 2e-3, "{} vs {bf}", c.lhs);
    }

    #[test]
    fn dyadic_spreading_family_separates_the_exponents() {
        let at = |alpha: f64, k: usize| {
            dyadic_lemma_check(&StepFunction::dyadic_spread(k), alpha)
                .unwrap()
                .ratio
        };
        let strong: Vec<f64> = [5, 10, 20, 40].iter().map(|&k| at(0.6, k)).collect();
        assert!(strong.iter().all(|&r| r > 0.12), "{strong:?}");
        let weak: Vec<f64> = [5, 10, 20, 40].iter().map(|&k| at(0.3, k)).collect();
        assert!(weak.windows(2).all(|w| w[1] < w[0]), "{weak:?}");
    }

    #[test]
    fn dyadic_lhs_grows_with_alpha_away_from_one() {
        let h = StepFunction::new(vec![3.0, 5.0, 11.0], vec![1.0, 0.4]).unwrap();
        let mut last = 0.0;
        for alpha in [0.1, 0.3, 0.6, 1.0, 2.0] {
            let c = dyadic_lemma_check(&h, alpha).unwrap();
            assert!(c.lhs >= last);
            last = c.lhs;
        }
    }

    #[test]
    fn step_function_validation() {
        assert!(StepFunction::new(vec![1.0, 2.0], vec![-1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 2.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![2.0, 1.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![1.0, 2.0, 3.0], vec![1.0]).is_err());
        assert_eq!(StepFunction::dyadic_spread(3).mass(), 4.0);
    }

    #[test]
    fn sequence_inequality_cases() {
        let ones = vec![1.0; 7];
        let c = sequence_inequality_check(&ones, &ones).unwrap();
        assert_eq!((c.lhs, c.rhs), (49.0, 49.0));
        let b: Vec<f64> = (0..5).map(|n| (1.0 + n as f64).powf(1.2)).collect();
        let c = sequence_inequality_check(&[0.0, 0.0, 3.0, 0.0, 0.0], &b).unwrap();
        assert_eq!(c.lhs, 9.0);
        assert!(c.holds() && c.rhs >= 9.0);
        assert!(sequence_inequality_check(&[1.0], &[0.0]).is_err());
        assert!(sequence_inequality_check(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn counterexample_coulomb_matches_grid_evaluation() {
        let (beta, alpha) = (0.44, 0.1);
        let c = counterexample_ratio(beta, alpha, 1.0 / 3.0, 3.0).unwrap();
        let g = RadialGrid::new(60001, 3.0).unwrap();
        let u = sample_radial(
            |r| {
                if r > 1.0 / 3.0 {
                    r.powf(-1.25) * (1.0 + r.ln().abs()).powf(-beta)
                } else {
                    0.0
                }
            },
            g,
        )
        .unwrap();
        assert!(rel(coulomb_energy_radial(&u).energy, c.coulomb) < 1e-3);
        assert!(rel(weighted_norm(&u, alpha).unwrap().value, c.weighted_norm) < 1e-3);
    }
}
