//! Classical Radon transform of phase-space images and filtered
//! backprojection.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{parse_f64, sig17};
use crate::grid::UniformGrid;

/// Boundary-ring mass fraction above which `radon` warns.
pub const BOUNDARY_MASS_TOL: f64 = 1e-6;
pub const MIN_QUANTITATIVE_ANGLES: usize = 16;

/// Image sampled at `(q0 + i·dq, p0 + j·dp)`, stored row-major by `q` index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageGrid {
    pub q0: f64,
    pub p0: f64,
    pub dq: f64,
    pub dp: f64,
    pub nq: usize,
    pub np: usize,
    #[serde(skip)]
    values: Vec<f64>,
}

impl ImageGrid {
    pub fn new(q: UniformGrid, p: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != q.n * p.n {
            return Err(Error::DimensionMismatch { expected: q.n * p.n, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParameter("image has non-finite values".into()));
        }
        Ok(Self { q0: q.x0, p0: p.x0, dq: q.dx, dp: p.dx, nq: q.n, np: p.n, values })
    }

    pub fn from_fn(q: UniformGrid, p: UniformGrid, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        let values: Vec<f64> = (0..q.n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let qi = q.node(i);
                (0..p.n).map(move |j| (qi, p.node(j)))
            })
            .map(|(qi, pj)| f(qi, pj))
            .collect();
        Self::new(q, p, values)
    }

    pub fn q_grid(&self) -> UniformGrid {
        UniformGrid { x0: self.q0, dx: self.dq, n: self.nq }
    }

    pub fn p_grid(&self) -> UniformGrid {
        UniformGrid { x0: self.p0, dx: self.dp, n: self.np }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.np + j]
    }

    /// Bilinear interpolation, zero outside the sampled rectangle.
    pub fn bilinear(&self, q: f64, p: f64) -> f64 {
        let u = (q - self.q0) / self.dq;
        let v = (p - self.p0) / self.dp;
        if !(u >= 0.0 && v >= 0.0 && u <= (self.nq - 1) as f64 && v <= (self.np - 1) as f64) {
            return 0.0;
        }
        let i = (u.floor() as usize).min(self.nq.saturating_sub(2));
        let j = (v.floor() as usize).min(self.np.saturating_sub(2));
        let (fu, fv) = (u - i as f64, v - j as f64);
        let at = |a: usize, b: usize| if a < self.nq && b < self.np { self.value(a, b) } else { 0.0 };
        (1.0 - fu) * (1.0 - fv) * at(i, j)
            + fu * (1.0 - fv) * at(i + 1, j)
            + (1.0 - fu) * fv * at(i, j + 1)
            + fu * fv * at(i + 1, j + 1)
    }

    /// Trapezoid-rule `∬ f dq dp`.
    pub fn integral(&self) -> f64 {
        let q = self.q_grid();
        let p = self.p_grid();
        let rows: Vec<f64> = (0..self.nq).map(|i| p.trapezoid(&self.values[i * self.np..(i + 1) * self.np])).collect();
        q.trapezoid(&rows)
    }

    /// Fraction of `Σ|f|` carried by the outermost ring of samples.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.abs()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let mut ring = 0.0;
        for i in 0..self.nq {
            for j in 0..self.np {
                if i == 0 || j == 0 || i + 1 == self.nq || j + 1 == self.np {
                    ring += self.value(i, j).abs();
                }
            }
        }
        ring / total
    }

    fn center_and_radius(&self) -> (f64, f64, f64) {
        let wq = (self.nq - 1) as f64 * self.dq;
        let wp = (self.np - 1) as f64 * self.dp;
        (self.q0 + wq / 2.0, self.p0 + wp / 2.0, 0.5 * (wq * wq + wp * wp).sqrt())
    }

    /// `∫ f(foot + t·dir) dt` over the chord through the image, `dir` a unit vector.
    fn line_integral(&self, foot: (f64, f64), dir: (f64, f64)) -> f64 {
        let (qc, pc, radius) = self.center_and_radius();
        let h = self.dq.min(self.dp) / 2.0;
        let tc = (qc - foot.0) * dir.0 + (pc - foot.1) * dir.1;
        let steps = (2.0 * radius / h).ceil() as usize + 2;
        let t0 = tc - radius - h;
        let mut sum = 0.0;
        for k in 0..=steps {
            let t = t0 + k as f64 * h;
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            sum += w * self.bilinear(foot.0 + t * dir.0, foot.1 + t * dir.1);
        }
        sum * h
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.nq {
            let row: Vec<String> = (0..self.np).map(|j| sig17(self.value(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Sidecar metadata `{q0, p0, dq, dp, nq, np}`.
    pub fn metadata_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::FileFormat(e.to_string()))
    }

    /// Reads a headerless CSV matrix (one row per `q` node) and its sidecar.
    pub fn from_csv(csv: &str, metadata: &str) -> Result<Self> {
        let meta: ImageGrid = serde_json::from_str(metadata).map_err(|e| Error::FileFormat(e.to_string()))?;
        let q = UniformGrid::new(meta.q0, meta.dq, meta.nq)?;
        let p = UniformGrid::new(meta.p0, meta.dp, meta.np)?;
        let values = parse_matrix_csv(csv, meta.nq, meta.np, "image file")?;
        Self::new(q, p, values)
    }

    /// 8-bit binary PGM, `q` along the width and `p` increasing upwards,
    /// linearly scaled from the image minimum to its maximum.
    pub fn to_pgm(&self) -> Vec<u8> {
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let mut out = format!("P5\n{} {}\n255\n", self.nq, self.np).into_bytes();
        for j in (0..self.np).rev() {
            for i in 0..self.nq {
                out.push((255.0 * (self.value(i, j) - lo) / span).round() as u8);
            }
        }
        out
    }
}

pub(crate) fn parse_matrix_csv(csv: &str, rows: usize, cols: usize, what: &str) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(rows * cols);
    let mut count = 0;
    for line in csv.lines().filter(|l| !l.trim().is_empty()) {
        let row = line.split(',').map(|f| parse_f64(f, what)).collect::<Result<Vec<_>>>()?;
        if row.len() != cols {
            return Err(Error::FileFormat(format!("{what}: row {count} has {} columns, expected {cols}", row.len())));
        }
        values.extend(row);
        count += 1;
    }
    if count != rows {
        return Err(Error::FileFormat(format!("{what}: {count} rows, expected {rows}")));
    }
    Ok(values)
}

/// Projections along the directions `(cos θ, sin θ)`, stored row-major by angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    thetas: Vec<f64>,
    x_grid: UniformGrid,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn new(thetas: Vec<f64>, x_grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(t) = thetas.iter().find(|t| !(0.0..PI).contains(*t)) {
            return Err(Error::OutOfRange(format!("projection angle {t} not in [0, π)")));
        }
        if values.len() != thetas.len() * x_grid.n {
            return Err(Error::DimensionMismatch { expected: thetas.len() * x_grid.n, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParameter("sinogram has non-finite values".into()));
        }
        Ok(Self { thetas, x_grid, values })
    }

    pub fn zeros(thetas: Vec<f64>, x_grid: UniformGrid) -> Result<Self> {
        let n = thetas.len() * x_grid.n;
        Self::new(thetas, x_grid, vec![0.0; n])
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn x_grid(&self) -> UniformGrid {
        self.x_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.x_grid.n..(k + 1) * self.x_grid.n]
    }

    /// `a·self + b·other` on identical geometry.
    pub fn combine(&self, a: f64, other: &Sinogram, b: f64) -> Result<Self> {
        if self.thetas != other.thetas || self.x_grid != other.x_grid {
            return Err(Error::BadParameter("sinograms have different geometry".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self::new(self.thetas.clone(), self.x_grid, values)
    }

    /// Header `theta,X_0,X_1,…`, then one row per angle.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta");
        for x in self.x_grid.nodes() {
            out.push(',');
            out.push_str(&sig17(x));
        }
        out.push('\n');
        for (k, t) in self.thetas.iter().enumerate() {
            out.push_str(&sig17(*t));
            for v in self.row(k) {
                out.push(',');
                out.push_str(&sig17(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::FileFormat("empty sinogram file".into()))?;
        let mut cells = header.split(',');
        if cells.next().map(str::trim) != Some("theta") {
            return Err(Error::FileFormat("sinogram header must start with `theta`".into()));
        }
        let xs = cells.map(|c| parse_f64(c, "sinogram header")).collect::<Result<Vec<_>>>()?;
        let x_grid = grid_from_nodes(&xs, "sinogram header")?;
        let mut thetas = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let row = line.split(',').map(|c| parse_f64(c, "sinogram row")).collect::<Result<Vec<_>>>()?;
            if row.len() != xs.len() + 1 {
                return Err(Error::FileFormat(format!(
                    "sinogram row has {} fields, expected {}",
                    row.len(),
                    xs.len() + 1
                )));
            }
            thetas.push(row[0]);
            values.extend_from_slice(&row[1..]);
        }
        Self::new(thetas, x_grid, values)
    }
}

/// Recovers a uniform grid from its listed nodes.
pub(crate) fn grid_from_nodes(xs: &[f64], what: &str) -> Result<UniformGrid> {
    if xs.len() < 2 {
        return Err(Error::FileFormat(format!("{what}: need at least two grid nodes")));
    }
    let grid =
        UniformGrid::span(xs[0], xs[xs.len() - 1], xs.len()).map_err(|e| Error::FileFormat(format!("{what}: {e}")))?;
    let scale = xs.iter().fold(grid.dx, |m, x| m.max(x.abs()));
    if xs.iter().enumerate().any(|(k, x)| (x - grid.node(k)).abs() > 1e-9 * scale) {
        return Err(Error::FileFormat(format!("{what}: nodes are not uniformly spaced")));
    }
    Ok(grid)
}

fn warn_on_boundary_mass(img: &ImageGrid) {
    let fraction = img.boundary_mass_fraction();
    if fraction > BOUNDARY_MASS_TOL {
        log::warn!("image carries {fraction:.3e} of its mass on the boundary; projections are truncated");
    }
}

/// `∫ f δ(X − q cos θ − p sin θ) dq dp` by bilinear interpolation along each line.
pub fn radon(img: &ImageGrid, thetas: &[f64], x_grid: &UniformGrid) -> Result<Sinogram> {
    if thetas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    warn_on_boundary_mass(img);
    let xs = x_grid.nodes();
    let values: Vec<f64> = thetas
        .par_iter()
        .flat_map_iter(|&theta| {
            let (s, c) = theta.sin_cos();
            xs.iter().map(move |&x| img.line_integral((x * c, x * s), (-s, c))).collect::<Vec<_>>()
        })
        .collect();
    Sinogram::new(thetas.to_vec(), *x_grid, values)
}

/// `∫ f δ(X − μq − νp) dq dp` for an arbitrary nonzero `(μ, ν)`.
pub fn radon_direction(img: &ImageGrid, mu: f64, nu: f64, x_grid: &UniformGrid) -> Result<Vec<f64>> {
    let r = mu.hypot(nu);
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::BadParameter(format!("direction ({mu}, {nu}) must be nonzero and finite")));
    }
    warn_on_boundary_mass(img);
    let dir = (-nu / r, mu / r);
    Ok(x_grid.nodes().par_iter().map(|&x| img.line_integral((x * mu / (r * r), x * nu / (r * r)), dir) / r).collect())
}

/// Quadrature weights for angles on the half-circle: half the gap to each
/// neighbour, wrapping around modulo π.
fn angle_weights(thetas: &[f64]) -> Vec<f64> {
    let n = thetas.len();
    if n == 1 {
        return vec![PI];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    let mut w = vec![0.0; n];
    for k in 0..n {
        let prev = if k == 0 { thetas[order[n - 1]] - PI } else { thetas[order[k - 1]] };
        let next = if k + 1 == n { thetas[order[0]] + PI } else { thetas[order[k + 1]] };
        w[order[k]] = (next - prev) / 2.0;
    }
    w
}

/// Ram-Lak ramp filter applied to each projection by zero-padded FFT convolution.
fn ramp_filter(sino: &Sinogram) -> Vec<Vec<f64>> {
    let nx = sino.x_grid.n;
    let dx = sino.x_grid.dx;
    let size = (2 * nx).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let mut kernel = vec![Complex::new(0.0, 0.0); size];
    kernel[0].re = 1.0 / (4.0 * dx * dx);
    for k in (1..size / 2).step_by(2) {
        let h = -1.0 / ((k * k) as f64 * PI * PI * dx * dx);
        kernel[k].re = h;
        kernel[size - k].re = h;
    }
    forward.process(&mut kernel);

    (0..sino.thetas.len())
        .map(|k| {
            let mut buf = vec![Complex::new(0.0, 0.0); size];
            for (b, v) in buf.iter_mut().zip(sino.row(k)) {
                b.re = *v;
            }
            forward.process(&mut buf);
            for (b, h) in buf.iter_mut().zip(&kernel) {
                *b *= h;
            }
            inverse.process(&mut buf);
            // rustfft leaves the inverse unnormalized
            buf[..nx].iter().map(|z| z.re * dx / size as f64).collect()
        })
        .collect()
}

/// Filtered backprojection onto the output grid.
pub fn inverse_radon(sino: &Sinogram, q_grid: &UniformGrid, p_grid: &UniformGrid) -> Result<ImageGrid> {
    let n = sino.thetas.len();
    if n == 0 {
        return Err(Error::TooFewAngles(0));
    }
    if n < MIN_QUANTITATIVE_ANGLES {
        log::warn!("{}", Error::TooFewAngles(n));
    }
    let corner = [q_grid.x0, q_grid.last()]
        .iter()
        .flat_map(|q| [p_grid.x0, p_grid.last()].map(|p| q.hypot(p)))
        .fold(0.0, f64::max);
    if corner > sino.x_grid.x0.abs().min(sino.x_grid.last().abs()) {
        log::warn!("output grid reaches |X| = {corner:.3}, beyond the sinogram's detector range");
    }
    let filtered = ramp_filter(sino);
    let weights = angle_weights(&sino.thetas);
    let trig: Vec<(f64, f64)> = sino.thetas.iter().map(|t| t.sin_cos()).collect();
    let x_grid = sino.x_grid;
    ImageGrid::from_fn(*q_grid, *p_grid, |q, p| {
        trig.iter()
            .zip(&filtered)
            .zip(&weights)
            .map(|(((s, c), row), w)| w * x_grid.interpolate(row, q * c + p * s))
            .sum()
    })
}

/// `n` detector nodes symmetric about 0, wide enough for every projection of the image.
pub fn covering_detector_grid(img: &ImageGrid, n: usize) -> Result<UniformGrid> {
    let q1 = img.q0 + (img.nq - 1) as f64 * img.dq;
    let p1 = img.p0 + (img.np - 1) as f64 * img.dp;
    let reach =
        [(img.q0, img.p0), (img.q0, p1), (q1, img.p0), (q1, p1)].iter().map(|(q, p)| q.hypot(*p)).fold(0.0, f64::max);
    UniformGrid::span(-reach, reach, n)
}

/// `k·π/n`, `k = 0..n`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * PI / n as f64).collect()
}
