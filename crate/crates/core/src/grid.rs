//! Radial and box grids, the fields that live on them, and their file formats.
//!
//! Radial fields serialize to a two-column CSV `r,value`. Box fields
//! serialize to a flat little-endian `f64` file in row-major order (x slowest,
//! z fastest) plus a JSON header with `n`, `L` and `mask_radius`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform grid `r_i = i·h` on `[0, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n: usize,
    r_max: f64,
    h: f64,
}

impl RadialGrid {
    pub const MIN_NODES: usize = 16;

    pub fn new(n: usize, r_max: f64) -> Result<Self> {
        if n < Self::MIN_NODES {
            return Err(Error::GridTooSmall {
                n,
                min: Self::MIN_NODES,
            });
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "r_max must be positive and finite, got {r_max}"
            )));
        }
        Ok(Self {
            n,
            r_max,
            h: r_max / (n - 1) as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.r_max
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Composite trapezoid weight of node `i`.
    #[inline]
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Same node count, outer radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.r_max * factor)
    }
}

/// Samples of a radial function on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
    dirichlet: bool,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: grid.n(),
            });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                node,
                r: grid.node(node),
                value,
            });
        }
        Ok(Self {
            grid,
            values,
            dirichlet: false,
        })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n()],
            dirichlet: true,
        }
    }

    /// Zero the outer node and flag the field as Dirichlet at `r_max`.
    pub fn dirichlet(mut self) -> Self {
        if let Some(last) = self.values.last_mut() {
            *last = 0.0;
        }
        self.dirichlet = true;
        self
    }

    pub fn is_dirichlet(&self) -> bool {
        self.dirichlet
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            dirichlet: self.dirichlet,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Piecewise-linear interpolation; zero beyond `r_max`.
    pub fn interpolate(&self, r: f64) -> f64 {
        let h = self.grid.h();
        if r >= self.grid.r_max() {
            return if r == self.grid.r_max() {
                self.values[self.grid.n() - 1]
            } else {
                0.0
            };
        }
        let x = (r / h).max(0.0);
        let i = (x.floor() as usize).min(self.grid.n() - 2);
        let t = x - i as f64;
        (1.0 - t) * self.values[i] + t * self.values[i + 1]
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            out.serialize((self.grid.node(i), v))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut rs = Vec::new();
        let mut vs = Vec::new();
        for rec in rdr.deserialize() {
            let (r, v): (f64, f64) = rec?;
            rs.push(r);
            vs.push(v);
        }
        let r_max = *rs
            .last()
            .ok_or_else(|| Error::InvalidParameter("empty radial CSV".into()))?;
        let grid = RadialGrid::new(rs.len(), r_max)?;
        let field = Self::new(grid, vs)?;
        Ok(if field.values.last() == Some(&0.0) {
            field.dirichlet()
        } else {
            field
        })
    }
}

/// `values[i] = profile(r_i)`.
pub fn sample_radial(profile: impl Fn(f64) -> f64, grid: RadialGrid) -> Result<RadialField> {
    let values = grid.nodes().map(profile).collect();
    RadialField::new(grid, values)
}

/// Composite trapezoid value of `∫_0^{r_max} f(r) r^k dr` for `k ∈ {0,1,2,3}`.
pub fn integrate_radial(f: &RadialField, k: u32) -> Result<f64> {
    if k > 3 {
        return Err(Error::InvalidParameter(format!(
            "weight exponent must be in 0..=3, got {k}"
        )));
    }
    let g = f.grid();
    Ok(f.values()
        .iter()
        .enumerate()
        .map(|(i, &v)| g.trapezoid_weight(i) * v * g.node(i).powi(k as i32))
        .sum())
}

/// Uniform box `[-L, L]³` with `n` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    n: usize,
    #[serde(rename = "L")]
    half_width: f64,
    h: f64,
}

impl BoxGrid {
    pub const MIN_NODES: usize = 16;

    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < Self::MIN_NODES {
            return Err(Error::GridTooSmall {
                n,
                min: Self::MIN_NODES,
            });
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half-width must be positive and finite, got {half_width}"
            )));
        }
        Ok(Self {
            n,
            half_width,
            h: 2.0 * half_width / (n - 1) as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.n;
        let j = (idx / self.n) % self.n;
        let i = idx / (self.n * self.n);
        (i, j, k)
    }

    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Twice the node offset from the box centre, in units of `h`, per axis.
    /// Squared sums of these are exact integer keys for `|x|²`.
    #[inline]
    pub fn doubled_offset(&self, i: usize) -> i64 {
        2 * i as i64 - (self.n as i64 - 1)
    }

    pub fn radius_key(&self, idx: usize) -> i64 {
        let (i, j, k) = self.unravel(idx);
        let (a, b, c) = (
            self.doubled_offset(i),
            self.doubled_offset(j),
            self.doubled_offset(k),
        );
        a * a + b * b + c * c
    }

    /// True for nodes on the outer faces of the box.
    #[inline]
    pub fn on_boundary(&self, i: usize, j: usize, k: usize) -> bool {
        let last = self.n - 1;
        i == 0 || j == 0 || k == 0 || i == last || j == last || k == last
    }
}

/// Samples on a [`BoxGrid`] with optional Dirichlet support `B(0, R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field3D {
    grid: BoxGrid,
    values: Vec<f64>,
    mask_radius: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Field3DHeader {
    n: usize,
    #[serde(rename = "L")]
    half_width: f64,
    mask_radius: Option<f64>,
}

impl Field3D {
    pub fn new(grid: BoxGrid, values: Vec<f64>, mask_radius: Option<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: grid.len(),
            });
        }
        if let Some(rad) = mask_radius {
            if !(rad > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "mask radius must be positive, got {rad}"
                )));
            }
        }
        let field = Self {
            grid,
            values,
            mask_radius,
        };
        for (idx, &v) in field.values.iter().enumerate() {
            if !v.is_finite() {
                let x = grid.position(idx);
                return Err(Error::NonFinite {
                    node: idx,
                    r: norm(x),
                    value: v,
                });
            }
            if v != 0.0 && !field.is_active(idx) && mask_radius.is_some() {
                return Err(Error::Dirichlet { node: idx, value: v });
            }
        }
        Ok(field)
    }

    pub fn zeros(grid: BoxGrid, mask_radius: Option<f64>) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            mask_radius,
        }
    }

    /// Samples `profile(x)` and zeroes everything outside the support.
    pub fn sample(
        grid: BoxGrid,
        mask_radius: Option<f64>,
        profile: impl Fn([f64; 3]) -> f64 + Sync,
    ) -> Result<Self> {
        let mut field = Self::zeros(grid, mask_radius);
        for idx in 0..grid.len() {
            let x = grid.position(idx);
            let v = profile(x);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    node: idx,
                    r: norm(x),
                    value: v,
                });
            }
            field.values[idx] = v;
        }
        if mask_radius.is_some() {
            field.apply_mask();
        }
        Ok(field)
    }

    /// Lift of a radial profile centred at `center`.
    pub fn sample_radial(
        grid: BoxGrid,
        mask_radius: Option<f64>,
        center: [f64; 3],
        profile: impl Fn(f64) -> f64 + Sync,
    ) -> Result<Self> {
        Self::sample(grid, mask_radius, |x| {
            profile(norm([x[0] - center[0], x[1] - center[1], x[2] - center[2]]))
        })
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn mask_radius(&self) -> Option<f64> {
        self.mask_radius
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Whether node `idx` is a free unknown: inside the ball (when masked)
    /// and off the outer box faces.
    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        let (i, j, k) = self.grid.unravel(idx);
        if self.grid.on_boundary(i, j, k) {
            return false;
        }
        match self.mask_radius {
            Some(rad) => {
                let x = self.grid.position(idx);
                x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= rad * rad
            }
            None => true,
        }
    }

    pub fn active_mask(&self) -> Vec<bool> {
        (0..self.grid.len()).map(|i| self.is_active(i)).collect()
    }

    pub fn apply_mask(&mut self) {
        for idx in 0..self.grid.len() {
            if !self.is_active(idx) {
                self.values[idx] = 0.0;
            }
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            mask_radius: self.mask_radius,
        }
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.grid.len());
        Self {
            grid: self.grid,
            values,
            mask_radius: self.mask_radius,
        }
    }

    /// Writes `<stem>.bin` and `<stem>.json`; returns both paths.
    pub fn write_raw(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        let bin = dir.join(format!("{stem}.bin"));
        let json = dir.join(format!("{stem}.json"));
        let mut w = BufWriter::new(File::create(&bin)?);
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        let header = Field3DHeader {
            n: self.grid.n(),
            half_width: self.grid.half_width(),
            mask_radius: self.mask_radius,
        };
        serde_json::to_writer_pretty(File::create(&json)?, &header)?;
        Ok((bin, json))
    }

    pub fn read_raw(dir: &Path, stem: &str) -> Result<Self> {
        let header: Field3DHeader = serde_json::from_reader(BufReader::new(File::open(
            dir.join(format!("{stem}.json")),
        )?))?;
        let grid = BoxGrid::new(header.n, header.half_width)?;
        let mut bytes = Vec::new();
        BufReader::new(File::open(dir.join(format!("{stem}.bin")))?).read_to_end(&mut bytes)?;
        if bytes.len() != grid.len() * 8 {
            return Err(Error::LengthMismatch {
                got: bytes.len() / 8,
                expected: grid.len(),
            });
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::new(grid, values, header.mask_radius)
    }
}

#[inline]
pub(crate) fn norm(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}
