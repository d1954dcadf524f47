use std::f64::consts::PI;

use rayon::prelude::*;

use super::fock::{check_tail, mode_cutoff, weyl_operator, FockSpace, WHDirection, MAX_MODES};
use crate::error::{Error, Result};
use crate::format::{parse_f64, sig17};
use crate::grid::UniformGrid;
use crate::numkernel::{hermitian_eigendecompose, ComplexMatrix, C64};
use crate::radon::grid_from_nodes;
use crate::states::DensityMatrix;

pub const T_NODES: usize = 1024;
pub const NEGATIVITY_TOL: f64 = 1e-8;
pub const IMAGINARY_TOL: f64 = 1e-10;
/// Largest tolerated `|∫W dX − 1|` before the grid is declared too narrow.
pub const NORMALIZATION_TOL: f64 = 1e-3;

/// `χ(t) = Tr(ρ e^{it Σ_j (μ_j Q_j + ν_j P_j)})` at each `t`.
pub fn smeared_character_wh(rho: &DensityMatrix, d: &WHDirection, ts: &[f64]) -> Result<Vec<C64>> {
    d.require_modes(MAX_MODES)?;
    let n = mode_cutoff(rho, d.modes())?;
    check_tail(rho, d.modes())?;
    ts.par_iter().map(|&t| Ok(rho.matrix().trace_product(&weyl_operator(d, t, n)?))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TomogramMethod {
    /// Fourier inversion of the characteristic function.
    #[default]
    Fourier,
    /// Spectral measure of the truncated quadrature operator, smeared by a
    /// Gaussian of width `2·dx`.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomogramOptions {
    pub method: TomogramMethod,
    pub t_nodes: usize,
    pub negativity_tol: f64,
}

impl Default for TomogramOptions {
    fn default() -> Self {
        Self { method: TomogramMethod::Fourier, t_nodes: T_NODES, negativity_tol: NEGATIVITY_TOL }
    }
}

/// Tomogram density `W(X; ξ)` sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTomogram {
    grid: UniformGrid,
    values: Vec<f64>,
    direction: WHDirection,
    imaginary_residue: f64,
}

impl GridTomogram {
    /// Rejects values below `−negativity_tol` and integrals off 1 by more than [`NORMALIZATION_TOL`].
    pub fn new(grid: UniformGrid, values: Vec<f64>, direction: WHDirection, negativity_tol: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, found: values.len() });
        }
        let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
        if min_value < -negativity_tol {
            return Err(Error::NegativityBeyondTolerance { min_value });
        }
        let integral = grid.trapezoid(&values);
        if !((integral - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(Error::GridTooNarrow { integral });
        }
        Ok(Self { grid, values, direction, imaginary_residue: 0.0 })
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn direction(&self) -> &WHDirection {
        &self.direction
    }

    /// Largest `|Im W|` discarded when the Fourier inversion was taken real.
    pub fn imaginary_residue(&self) -> f64 {
        self.imaginary_residue
    }

    pub fn integral(&self) -> f64 {
        self.grid.trapezoid(&self.values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("X,W\n");
        for (x, w) in self.grid.nodes().iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", sig17(*x), sig17(*w)));
        }
        out
    }
}

/// Reads an `X,W` CSV into its grid and values.
pub fn read_tomogram_csv(text: &str) -> Result<(UniformGrid, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(|h| h.replace(' ', "")) != Some("X,W".into()) {
        return Err(Error::FileFormat("tomogram file must start with the header X,W".into()));
    }
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for line in lines {
        let (x, w) = line.split_once(',').ok_or_else(|| Error::FileFormat(format!("bad tomogram row {line:?}")))?;
        xs.push(parse_f64(x, "tomogram file")?);
        ws.push(parse_f64(w, "tomogram file")?);
    }
    Ok((grid_from_nodes(&xs, "tomogram file")?, ws))
}

/// Half-width of the `t` range: `2√(2N) / max_j |ξ_j|`.
pub fn t_range(d: &WHDirection, cutoff: usize) -> f64 {
    2.0 * (2.0 * cutoff as f64).sqrt() / d.max_mode_norm()
}

pub fn grid_tomogram(rho: &DensityMatrix, d: &WHDirection, x_grid: &UniformGrid) -> Result<GridTomogram> {
    grid_tomogram_with(rho, d, x_grid, &TomogramOptions::default())
}

pub fn grid_tomogram_with(
    rho: &DensityMatrix,
    d: &WHDirection,
    x_grid: &UniformGrid,
    opts: &TomogramOptions,
) -> Result<GridTomogram> {
    d.require_modes(MAX_MODES)?;
    let cutoff = mode_cutoff(rho, d.modes())?;
    check_tail(rho, d.modes())?;
    match opts.method {
        TomogramMethod::Fourier => fourier_tomogram(rho, d, x_grid, cutoff, opts),
        TomogramMethod::Spectral => spectral_tomogram(rho, d, x_grid, cutoff, opts),
    }
}

/// `W(X) = (1/2π) ∫ e^{−it(X−s)} χ(t) dt`, trapezoid rule on a symmetric `t` grid.
fn fourier_tomogram(
    rho: &DensityMatrix,
    d: &WHDirection,
    x_grid: &UniformGrid,
    cutoff: usize,
    opts: &TomogramOptions,
) -> Result<GridTomogram> {
    if opts.t_nodes < 2 {
        return Err(Error::QuadratureTooCoarse(format!("{} t nodes", opts.t_nodes)));
    }
    let t_grid = UniformGrid::span(-t_range(d, cutoff), t_range(d, cutoff), opts.t_nodes)?;
    let ts = t_grid.nodes();
    let chi = smeared_character_wh(rho, d, &ts)?;
    let last = ts.len() - 1;
    let weighted: Vec<C64> = chi
        .iter()
        .enumerate()
        .map(|(k, c)| c * if k == 0 || k == last { 0.5 * t_grid.dx } else { t_grid.dx } / (2.0 * PI))
        .collect();
    let raw: Vec<C64> = x_grid
        .nodes()
        .par_iter()
        .map(|&x| ts.iter().zip(&weighted).map(|(t, w)| w * C64::from_polar(1.0, -t * (x - d.shift()))).sum())
        .collect();
    let residue = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue { residue });
    }
    let mut tomo = GridTomogram::new(*x_grid, raw.iter().map(|z| z.re).collect(), d.clone(), opts.negativity_tol)?;
    tomo.imaginary_residue = residue;
    Ok(tomo)
}

/// `Σ_j (μ_j Q_j + ν_j P_j)` on the Kronecker-product space.
pub fn quadrature_operator(d: &WHDirection, cutoff: usize) -> Result<ComplexMatrix> {
    d.require_modes(MAX_MODES)?;
    let fs = FockSpace::new(cutoff)?;
    let id = ComplexMatrix::identity(cutoff);
    let mut total = ComplexMatrix::zeros(cutoff.pow(d.modes() as u32), cutoff.pow(d.modes() as u32));
    for j in 0..d.modes() {
        let generator = fs.quadrature(d.mu()[j], d.nu()[j]);
        let mut term = ComplexMatrix::identity(1);
        for k in 0..d.modes() {
            term = term.kron(if k == j { &generator } else { &id });
        }
        total.add_scaled(C64::new(1.0, 0.0), &term);
    }
    Ok(total)
}

fn spectral_tomogram(
    rho: &DensityMatrix,
    d: &WHDirection,
    x_grid: &UniformGrid,
    cutoff: usize,
    opts: &TomogramOptions,
) -> Result<GridTomogram> {
    let eig = hermitian_eigendecompose(&quadrature_operator(d, cutoff)?)?;
    let pops = eig.populations(rho.matrix());
    let h = 2.0 * x_grid.dx;
    let norm = 1.0 / (h * (2.0 * PI).sqrt());
    let values = x_grid
        .nodes()
        .iter()
        .map(|&x| {
            eig.eigenvalues
                .iter()
                .zip(&pops)
                .map(|(l, p)| p * norm * (-(x - d.shift() - l).powi(2) / (2.0 * h * h)).exp())
                .sum()
        })
        .collect();
    GridTomogram::new(*x_grid, values, d.clone(), opts.negativity_tol)
}

/// Closed-form tomogram of `|1,…,1⟩` along `(μ, ν)`:
/// `(πs)^{−½} Σ_k e_k s^{−k} H_{2k}(X/√s) e^{−X²/s}`, `s = Σ μ_j² + ν_j²`, with
/// `e_k` the elementary symmetric polynomials in `(μ_j² + ν_j²)/2`.
pub fn analytic_oscillator_tomogram(mu: &[f64], nu: &[f64], x: f64) -> Result<f64> {
    let d = WHDirection::new(mu.to_vec(), nu.to_vec())?;
    let n = d.modes();
    let s = d.norm_sq();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, v) in mu.iter().zip(nu) {
        let w = (m * m + v * v) / 2.0;
        for k in (1..=n).rev() {
            e[k] += w * e[k - 1];
        }
    }
    let y = x / s.sqrt();
    let h = hermite_polynomials(2 * n, y);
    let series: f64 = (0..=n).map(|k| e[k] / s.powi(k as i32) * h[2 * k]).sum();
    Ok(series * (-x * x / s).exp() / (PI * s).sqrt())
}

/// Physicists' Hermite polynomials `H_0(y)..=H_n(y)`.
pub fn hermite_polynomials(n: usize, y: f64) -> Vec<f64> {
    let mut h = vec![1.0; n + 1];
    if n >= 1 {
        h[1] = 2.0 * y;
    }
    for k in 1..n {
        h[k + 1] = 2.0 * y * h[k] - 2.0 * k as f64 * h[k - 1];
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::fock::number_state;

    fn sup(a: &[f64], b: impl Fn(usize) -> f64) -> f64 {
        a.iter().enumerate().map(|(k, v)| (v - b(k)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn character_examples() {
        let vac = number_state(0, 64).unwrap();
        let d = WHDirection::single(1.0, 0.0).unwrap();
        let ts = [0.0, 0.5, 1.7, -2.3];
        let chi = smeared_character_wh(&vac, &d, &ts).unwrap();
        for (t, c) in ts.iter().zip(&chi) {
            assert!((c - (-t * t / 4.0).exp()).norm() < 1e-8);
        }
        assert!((chi[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn vacuum_and_single_photon_tomograms() {
        let g = UniformGrid::span(-7.0, 7.0, 281).unwrap();
        let vac = number_state(0, 32).unwrap();
        let t = grid_tomogram(&vac, &WHDirection::single(1.0, 0.0).unwrap(), &g).unwrap();
        assert!(sup(t.values(), |k| (-g.node(k).powi(2)).exp() / PI.sqrt()) < 1e-6);
        assert!((t.integral() - 1.0).abs() < 1e-6);

        let one = number_state(1, 32).unwrap();
        let (c, s) = 0.8f64.sin_cos();
        let t = grid_tomogram(&one, &WHDirection::single(c, s).unwrap(), &g).unwrap();
        assert!(sup(t.values(), |k| 2.0 * g.node(k).powi(2) * (-g.node(k).powi(2)).exp() / PI.sqrt()) < 1e-6);
        assert!(t.imaginary_residue() < 1e-10);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let g = UniformGrid::span(-0.5, 0.5, 11).unwrap();
        let vac = number_state(0, 16).unwrap();
        let err = grid_tomogram(&vac, &WHDirection::single(1.0, 0.0).unwrap(), &g).unwrap_err();
        assert!(matches!(err, Error::GridTooNarrow { .. }));
    }

    #[test]
    fn spectral_method_keeps_moments() {
        // Atoms of the truncated Q are spaced wider than the smearing, so
        // compare the second moment: Σ p_k λ_k² = ⟨0|Q²|0⟩ = ½, plus h².
        let g = UniformGrid::span(-8.0, 8.0, 321).unwrap();
        let vac = number_state(0, 48).unwrap();
        let opts = TomogramOptions { method: TomogramMethod::Spectral, ..Default::default() };
        let t = grid_tomogram_with(&vac, &WHDirection::single(1.0, 0.0).unwrap(), &g, &opts).unwrap();
        let second: Vec<f64> = g.nodes().iter().zip(t.values()).map(|(x, w)| x * x * w).collect();
        let h = 2.0 * g.dx;
        assert!((g.trapezoid(&second) - 0.5 - h * h).abs() < 1e-6);
        assert!((t.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_examples() {
        assert!(analytic_oscillator_tomogram(&[1.0], &[0.0], 0.0).unwrap().abs() < 1e-15);
        let g = UniformGrid::span(-8.0, 8.0, 1601).unwrap();
        let vals: Vec<f64> =
            g.nodes().iter().map(|&x| analytic_oscillator_tomogram(&[1.0], &[0.0], x).unwrap()).collect();
        assert!((g.trapezoid(&vals) - 1.0).abs() < 1e-8);
        assert!(matches!(analytic_oscillator_tomogram(&[0.0], &[0.0], 1.0), Err(Error::BadDirection(_))));
    }

    #[test]
    fn shift_translates() {
        let g = UniformGrid::span(-7.0, 8.0, 151).unwrap();
        let vac = number_state(0, 16).unwrap();
        let d = WHDirection::single(1.0, 0.0).unwrap().with_shift(1.0);
        let t = grid_tomogram(&vac, &d, &g).unwrap();
        assert!(sup(t.values(), |k| (-(g.node(k) - 1.0).powi(2)).exp() / PI.sqrt()) < 1e-6);
    }

    #[test]
    fn csv_round_trip() {
        let g = UniformGrid::span(-7.0, 7.0, 57).unwrap();
        let t = grid_tomogram(&number_state(0, 16).unwrap(), &WHDirection::single(0.0, 1.0).unwrap(), &g).unwrap();
        let (g2, w) = read_tomogram_csv(&t.to_csv()).unwrap();
        assert_eq!(w, t.values());
        assert!((g2.dx - g.dx).abs() < 1e-15 && g2.n == g.n);
    }
}
