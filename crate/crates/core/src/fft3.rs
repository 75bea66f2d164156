//! Cube-shaped transforms: 3D complex FFT and a 3D sine transform.
//!
//! Both are applied axis by axis. Each pass transforms the contiguous axis
//! and then rotates the index order `(x, y, z) -> (z, x, y)`, so after three
//! passes the array is back in its original layout.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// `out[z][x][y] = data[x][y][z]` for an `m³` array.
fn rotate<T: Copy + Send + Sync + Default>(data: &[T], m: usize) -> Vec<T> {
    let mut out = vec![T::default(); data.len()];
    out.par_chunks_mut(m).enumerate().for_each(|(zx, line)| {
        let z = zx / m;
        let x = zx % m;
        let base = x * m * m + z;
        for (y, o) in line.iter_mut().enumerate() {
            *o = data[base + y * m];
        }
    });
    out
}

pub(crate) struct Fft3 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Unnormalized in-place transform.
    pub fn process(&self, data: &mut Vec<Complex64>, inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let m = self.m;
        for _ in 0..3 {
            data.par_chunks_mut(m * 64).for_each_init(
                || vec![Complex64::default(); plan.get_inplace_scratch_len()],
                |scratch, block| plan.process_with_scratch(block, scratch),
            );
            *data = rotate(data, m);
        }
    }
}

/// Type-I discrete sine transform along every axis of an `m³` real array:
/// `y_a = Σ_{i=1}^{m} x_i sin(π a i / (m+1))` per axis. Applying it twice
/// multiplies by `((m+1)/2)³`.
pub(crate) struct Dst3 {
    m: usize,
    plan: Arc<dyn Fft<f64>>,
}

impl Dst3 {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            plan: planner.plan_fft_forward(2 * (m + 1)),
        }
    }

    pub fn process(&self, data: &mut Vec<f64>) {
        let m = self.m;
        let len = 2 * (m + 1);
        for _ in 0..3 {
            data.par_chunks_mut(m).for_each_init(
                || {
                    (
                        vec![Complex64::default(); len],
                        vec![Complex64::default(); self.plan.get_inplace_scratch_len()],
                    )
                },
                |(buf, scratch), line| {
                    buf[0] = Complex64::default();
                    buf[m + 1] = Complex64::default();
                    for (i, &x) in line.iter().enumerate() {
                        buf[i + 1] = Complex64::new(x, 0.0);
                        buf[len - 1 - i] = Complex64::new(-x, 0.0);
                    }
                    self.plan.process_with_scratch(buf, scratch);
                    for (a, y) in line.iter_mut().enumerate() {
                        *y = -0.5 * buf[a + 1].im;
                    }
                },
            );
            *data = rotate(data, m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_round_trip() {
        let m = 8;
        let f = Fft3::new(m);
        let orig: Vec<Complex64> = (0..m * m * m)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut d = orig.clone();
        f.process(&mut d, false);
        f.process(&mut d, true);
        let scale = (m * m * m) as f64;
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_direct_transform_on_one_mode() {
        let m = 4;
        let f = Fft3::new(m);
        let mut d = vec![Complex64::default(); m * m * m];
        // delta at (1, 2, 3)
        d[(m + 2) * m + 3] = Complex64::new(1.0, 0.0);
        f.process(&mut d, false);
        let w = -2.0 * std::f64::consts::PI / m as f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let phase = w * (a + 2 * b + 3 * c) as f64;
                    let expect = Complex64::new(phase.cos(), phase.sin());
                    assert!((d[(a * m + b) * m + c] - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dst_is_an_involution_up_to_scale() {
        let m = 6;
        let t = Dst3::new(m);
        let orig: Vec<f64> = (0..m * m * m).map(|i| (i as f64 * 0.731).sin()).collect();
        let mut d = orig.clone();
        t.process(&mut d);
        t.process(&mut d);
        let scale = ((m + 1) as f64 / 2.0).powi(3);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / scale - b).abs() < 1e-12);
        }
    }
}
