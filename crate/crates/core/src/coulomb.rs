//! Coulomb potentials and energies.
//!
//! Convention used throughout the crate: `φ_u = u² ⋆ 1/|x|` and the Coulomb
//! energy is `D(u², u²) = ∫∫ u²(x) u²(y) / |x−y| dx dy = ∫ φ_u u²`.
//! The Dirichlet-energy form of the potential, `∫|∇φ|²` with `−Δφ = u²`,
//! equals `D(u², u²) / 4π`.
//!
//! Radial fields use Newton's theorem: for radial densities
//! `∫∫_{S²×S²} 1/|x−y| = 16π² / max(r, s)`, so
//! `D(f, g) = 16π² ∫∫ f(r) g(s) r s min(r, s) dr ds`, evaluated in O(n) with
//! prefix and suffix sums over the trapezoid weights.
//!
//! Box fields use a zero-padded cyclic convolution against the sampled kernel
//! `1/|x|`, with the cell average `∫_{[-h/2,h/2]³} dx/|x| / h³` at the origin.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft3::Fft3;
use crate::grid::{BoxGrid, Field3D, RadialField, RadialGrid};
use crate::quad::adaptive_simpson;
use crate::{Error, Result};

/// Value of a Coulomb double integral. Non-negative by construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CoulombValue {
    pub energy: f64,
}

/// `(4π/r) Σ_j t_j ρ_j r_j min(r, r_j)` at every node, with the `r → 0`
/// limit `4π Σ_j t_j ρ_j r_j` at the origin.
pub(crate) fn potential_of_density(grid: &RadialGrid, rho: &[f64]) -> Vec<f64> {
    let n = grid.n();
    let mut inner = vec![0.0; n]; // Σ_{j≤i} t_j ρ_j r_j²
    let mut acc = 0.0;
    for i in 0..n {
        let r = grid.node(i);
        acc += grid.trapezoid_weight(i) * rho[i] * r * r;
        inner[i] = acc;
    }
    let mut phi = vec![0.0; n];
    let mut outer = 0.0; // Σ_{j>i} t_j ρ_j r_j
    for i in (0..n).rev() {
        let r = grid.node(i);
        phi[i] = if i == 0 {
            4.0 * PI * outer
        } else {
            4.0 * PI * (inner[i] / r + outer)
        };
        outer += grid.trapezoid_weight(i) * rho[i] * r;
    }
    phi
}

/// `16π² Σ_i Σ_j t_i t_j f_i g_j r_i r_j min(r_i, r_j)` through the O(n)
/// potential of `g`.
pub(crate) fn bilinear_of_densities(grid: &RadialGrid, f: &[f64], g: &[f64]) -> f64 {
    let phi = potential_of_density(grid, g);
    4.0 * PI
        * (0..grid.n())
            .map(|i| {
                let r = grid.node(i);
                grid.trapezoid_weight(i) * f[i] * r * r * phi[i]
            })
            .sum::<f64>()
}

/// `φ_u(r) = (4π/r) ∫ u²(s) s min(r, s) ds`.
pub fn radial_potential(u: &RadialField) -> RadialField {
    let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    RadialField::new(*u.grid(), potential_of_density(u.grid(), &rho))
        .expect("potential of a finite field is finite")
}

pub fn coulomb_energy_radial(u: &RadialField) -> CoulombValue {
    let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    CoulombValue {
        energy: bilinear_of_densities(u.grid(), &rho, &rho).max(0.0),
    }
}

/// The bilinear form `D(f, g)` for non-negative radial densities.
pub fn coulomb_bilinear_radial(f: &RadialField, g: &RadialField) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::InvalidParameter(
            "densities must share a grid".into(),
        ));
    }
    for field in [f, g] {
        if let Some((node, &value)) = field.values().iter().enumerate().find(|(_, &v)| v < 0.0) {
            return Err(Error::NegativeDensity { node, value });
        }
    }
    Ok(bilinear_of_densities(f.grid(), f.values(), g.values()))
}

/// `∫_{[-1/2,1/2]³} dx / |x|`.
///
/// Splitting the cube into six pyramids over its faces and integrating the
/// radial variable analytically leaves a smooth face integral:
/// `(3/2) ∫∫_{[-1/2,1/2]²} dy dz / sqrt(1/4 + y² + z²)`.
pub fn cell_average_inverse_distance() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let inner = |y: f64| {
            adaptive_simpson(
                &|z: f64| 1.0 / (0.25 + y * y + z * z).sqrt(),
                -0.5,
                0.5,
                1e-14,
            )
        };
        1.5 * adaptive_simpson(&inner, -0.5, 0.5, 1e-13)
    })
}

/// Fourier transform of the padded free-space kernel for one box grid.
pub struct CoulombKernel3d {
    grid: BoxGrid,
    fft: Fft3,
    kernel_hat: Vec<f64>,
}

impl CoulombKernel3d {
    pub fn new(grid: BoxGrid) -> Result<Self> {
        let n = grid.n();
        if n < BoxGrid::MIN_NODES {
            return Err(Error::GridTooSmall {
                n,
                min: BoxGrid::MIN_NODES,
            });
        }
        let m = 2 * n;
        let h = grid.h();
        let g0 = cell_average_inverse_distance() / h;
        let wrap = |d: usize| -> f64 {
            if d < n {
                d as f64
            } else {
                d as f64 - m as f64
            }
        };
        let mut kernel: Vec<Complex64> = (0..m * m * m)
            .into_par_iter()
            .map(|idx| {
                let (a, b, c) = (idx / (m * m), (idx / m) % m, idx % m);
                let (x, y, z) = (wrap(a), wrap(b), wrap(c));
                let r2 = x * x + y * y + z * z;
                let g = if r2 == 0.0 { g0 } else { 1.0 / (h * r2.sqrt()) };
                Complex64::new(g, 0.0)
            })
            .collect();
        let fft = Fft3::new(m);
        fft.process(&mut kernel, false);
        // Even kernel: the transform is real up to rounding.
        let kernel_hat = kernel.into_iter().map(|c| c.re).collect();
        Ok(Self {
            grid,
            fft,
            kernel_hat,
        })
    }

    /// Cached kernel for `grid`.
    pub fn shared(grid: &BoxGrid) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(usize, u64), Arc<CoulombKernel3d>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let key = (grid.n(), grid.half_width().to_bits());
        let cache = CACHE.get_or_init(Default::default);
        if let Some(k) = cache.lock().expect("kernel cache poisoned").get(&key) {
            return Ok(k.clone());
        }
        let kernel = Arc::new(Self::new(*grid)?);
        let mut guard = cache.lock().expect("kernel cache poisoned");
        // Keep memory bounded when sweeping over many grids.
        if guard.len() >= 4 {
            guard.clear();
        }
        Ok(guard.entry(key).or_insert(kernel).clone())
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    /// `h³ Σ_j G(x_i − x_j) ρ_j` at every node.
    pub fn potential_of_density(&self, rho: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        let m = self.fft.m();
        let mut buf = vec![Complex64::default(); m * m * m];
        buf.par_chunks_mut(m * m)
            .take(n)
            .enumerate()
            .for_each(|(i, plane)| {
                for j in 0..n {
                    for k in 0..n {
                        plane[j * m + k] = Complex64::new(rho[(i * n + j) * n + k], 0.0);
                    }
                }
            });
        self.fft.process(&mut buf, false);
        buf.par_iter_mut()
            .zip(self.kernel_hat.par_iter())
            .for_each(|(b, &k)| *b *= k);
        self.fft.process(&mut buf, true);
        let scale = self.grid.cell_volume() / (m * m * m) as f64;
        let mut phi = vec![0.0; n * n * n];
        phi.par_chunks_mut(n * n).enumerate().for_each(|(i, plane)| {
            for j in 0..n {
                for k in 0..n {
                    plane[j * n + k] = buf[(i * m + j) * m + k].re * scale;
                }
            }
        });
        phi
    }
}

/// `φ = u² ⋆ 1/|x|` on the box, free-space (no periodic images).
pub fn potential_3d(u: &Field3D) -> Result<Field3D> {
    let kernel = CoulombKernel3d::shared(u.grid())?;
    let rho: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    let phi = kernel.potential_of_density(&rho);
    Ok(Field3D::zeros(*u.grid(), None).with_values(phi))
}

/// `∫ u² φ_u dx` by the box trapezoid rule (the field vanishes on the faces).
pub fn coulomb_energy_3d(u: &Field3D) -> Result<CoulombValue> {
    let phi = potential_3d(u)?;
    let dv = u.grid().cell_volume();
    let e: f64 = u
        .values()
        .par_iter()
        .zip(phi.values().par_iter())
        .map(|(v, p)| v * v * p)
        .sum::<f64>()
        * dv;
    Ok(CoulombValue { energy: e.max(0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_radial;

    #[test]
    fn cell_constant_matches_the_known_value() {
        let c = cell_average_inverse_distance();
        assert!((c - 2.380_077_4).abs() < 1e-6, "{c}");
    }

    #[test]
    fn zero_field_has_zero_potential() {
        let g = RadialGrid::new(64, 4.0).unwrap();
        let z = RadialField::zeros(g);
        assert!(radial_potential(&z).is_zero());
        assert_eq!(coulomb_energy_radial(&z).energy, 0.0);
    }

    #[test]
    fn uniform_ball_potential() {
        let g = RadialGrid::new(1025, 8.0).unwrap();
        // Jump sampled at its midpoint value so the trapezoid charge is exact.
        let u = sample_radial(|r| if r < 1.0 { 1.0 } else if r == 1.0 { 0.5f64.sqrt() } else { 0.0 }, g)
            .unwrap();
        let phi = radial_potential(&u);
        for (i, &p) in phi.values().iter().enumerate() {
            let r = g.node(i);
            let exact = if r <= 1.0 {
                2.0 * PI * (1.0 - r * r / 3.0)
            } else {
                4.0 * PI / (3.0 * r)
            };
            assert!((p - exact).abs() <= 0.01 * exact, "r={r} {p} vs {exact}");
        }
    }

    #[test]
    fn gaussian_potential_at_origin() {
        let g = RadialGrid::new(2049, 8.0).unwrap();
        let u = sample_radial(|r| (-r * r / 2.0).exp(), g).unwrap();
        let phi0 = radial_potential(&u).values()[0];
        assert!((phi0 - 2.0 * PI).abs() < 0.005 * 2.0 * PI);
    }

    #[test]
    fn ball_self_energy() {
        let g = RadialGrid::new(2049, 8.0).unwrap();
        let u = sample_radial(|r| if r <= 1.0 { 1.0 } else { 0.0 }, g).unwrap();
        let e = coulomb_energy_radial(&u).energy;
        let exact = 32.0 * PI * PI / 15.0;
        assert!((e - exact).abs() < 0.01 * exact, "{e} vs {exact}");
    }

    #[test]
    fn bilinear_rejects_negative_density_and_is_consistent() {
        let g = RadialGrid::new(129, 5.0).unwrap();
        let f = sample_radial(|r| (-r).exp(), g).unwrap();
        let neg = f.map(|v| -v);
        assert!(matches!(
            coulomb_bilinear_radial(&f, &neg),
            Err(Error::NegativeDensity { .. })
        ));
        assert_eq!(
            coulomb_bilinear_radial(&f, &RadialField::zeros(g)).unwrap(),
            0.0
        );
        let u = f.map(f64::sqrt);
        let d = coulomb_bilinear_radial(&f, &f).unwrap();
        let e = coulomb_energy_radial(&u).energy;
        assert!((d - e).abs() < 1e-12 * e);
    }
}
