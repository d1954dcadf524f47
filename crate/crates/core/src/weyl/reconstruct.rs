use std::f64::consts::PI;

use rayon::prelude::*;

use super::fock::{check_tail, displacement_elements, mode_cutoff, weyl_alpha, TAIL_LEVELS};
use crate::error::{Error, Result};
use crate::format::{parse_f64, sig17};
use crate::grid::UniformGrid;
use crate::numkernel::{hermitian_eigendecompose, ComplexMatrix, C64};
use crate::states::{validate_density, DensityMatrix};

pub const MIN_BOX: f64 = 5.0;
pub const MIN_BOX_NODES: usize = 32;
/// Largest tolerated `|Tr σ − 1|` before cleanup.
pub const RAW_TRACE_TOL: f64 = 0.02;
/// Largest tolerated tail mass of a reconstruction from samples alone.
pub const RECONSTRUCTION_TAIL_TOL: f64 = 1e-3;
/// Levels with `⟨k|ρ|k⟩` above this count as occupied.
const OCCUPIED_TOL: f64 = 1e-12;

/// `χ(μ, ν) = Tr(ρ e^{i(μQ+νP)})` at the midpoints of an `m × m` box `[−L, L]²`,
/// stored row-major by `μ` index.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSamples {
    grid: UniformGrid,
    values: Vec<C64>,
}

impl CharacteristicSamples {
    pub fn new(box_half_width: f64, m: usize, values: Vec<C64>) -> Result<Self> {
        let grid = UniformGrid::midpoints(box_half_width, m)?;
        if values.len() != m * m {
            return Err(Error::DimensionMismatch { expected: m * m, found: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadParameter("non-finite characteristic sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn box_half_width(&self) -> f64 {
        -self.grid.x0 + self.grid.dx / 2.0
    }

    /// `h² Σ |χ|²`.
    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx * self.grid.dx
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("mu,nu,re,im\n");
        let m = self.grid.n;
        for i in 0..m {
            for j in 0..m {
                let z = self.values[i * m + j];
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    sig17(self.grid.node(i)),
                    sig17(self.grid.node(j)),
                    sig17(z.re),
                    sig17(z.im)
                ));
            }
        }
        out
    }

    /// Reads `mu,nu,re,im` rows; the nodes must form a symmetric midpoint box.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(|h| h.replace(' ', "")) != Some("mu,nu,re,im".into()) {
            return Err(Error::FileFormat("characteristic file must start with the header mu,nu,re,im".into()));
        }
        let mut rows = Vec::new();
        for line in lines {
            let f = line.split(',').map(|c| parse_f64(c, "characteristic file")).collect::<Result<Vec<_>>>()?;
            if f.len() != 4 {
                return Err(Error::FileFormat(format!("bad characteristic row {line:?}")));
            }
            rows.push(f);
        }
        let m = (rows.len() as f64).sqrt().round() as usize;
        if m == 0 || m * m != rows.len() {
            return Err(Error::FileFormat(format!("{} samples do not form a square box", rows.len())));
        }
        let half = -rows[0][0] + (rows[rows.len() - 1][0] - rows[0][0]) / (2.0 * (m - 1).max(1) as f64);
        let grid = UniformGrid::midpoints(half, m).map_err(|e| Error::FileFormat(e.to_string()))?;
        let tol = 1e-9 * half.max(1.0);
        for (idx, r) in rows.iter().enumerate() {
            if (r[0] - grid.node(idx / m)).abs() > tol || (r[1] - grid.node(idx % m)).abs() > tol {
                return Err(Error::FileFormat(format!("sample {idx} is not on the midpoint box of half-width {half}")));
            }
        }
        Self::new(half, m, rows.iter().map(|r| C64::new(r[2], r[3])).collect())
    }
}

/// Samples of a single-mode state's characteristic function on the box.
pub fn characteristic_samples(rho: &DensityMatrix, box_half_width: f64, m: usize) -> Result<CharacteristicSamples> {
    let n = mode_cutoff(rho, 1)?;
    check_tail(rho, 1)?;
    let grid = UniformGrid::midpoints(box_half_width, m)?;
    let nodes = grid.nodes();
    let values: Vec<C64> = (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let d = displacement_elements(weyl_alpha(nodes[idx / m], nodes[idx % m]), n);
            rho.matrix().trace_product(&d)
        })
        .collect();
    CharacteristicSamples::new(box_half_width, m, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReconstructionOptions {
    /// Clip negative eigenvalues to zero and renormalize.
    pub psd_clip: bool,
}

/// Cleaned-up reconstruction with the diagnostics of the raw quadrature.
#[derive(Debug, Clone)]
pub struct WhReconstruction {
    /// Hermitized, unit-trace (and PSD-clipped if requested) matrix.
    pub matrix: ComplexMatrix,
    /// Trace of the raw quadrature sum.
    pub raw_trace: C64,
    /// Smallest eigenvalue of the Hermitized raw sum.
    pub min_eigenvalue: f64,
    /// Tail mass of the cleaned-up matrix.
    pub tail_mass: f64,
    pub psd_clipped: bool,
}

impl WhReconstruction {
    /// The matrix as a validated state; fails when quadrature error leaves it non-PSD.
    pub fn state(&self) -> Result<DensityMatrix> {
        validate_density(&self.matrix).map_err(|e| Error::ReconstructionNotState {
            reason: format!("{e}; raw min eigenvalue {:e}, rerun with PSD clipping to project", self.min_eigenvalue),
        })
    }
}

/// `σ = (1/2π) ∫ χ(μ, ν) e^{−i(μQ+νP)} dμ dν` by the midpoint rule, on `cutoff` levels.
pub fn reconstruct_wh(
    samples: &CharacteristicSamples,
    cutoff: usize,
    opts: &ReconstructionOptions,
) -> Result<WhReconstruction> {
    if cutoff < 2 {
        return Err(Error::BadCutoff(cutoff));
    }
    let half = samples.box_half_width();
    let m = samples.grid.n;
    if half < MIN_BOX || m < MIN_BOX_NODES {
        return Err(Error::QuadratureTooCoarse(format!(
            "box half-width {half} and {m} nodes per axis (need at least {MIN_BOX} and {MIN_BOX_NODES})"
        )));
    }
    let nodes = samples.grid.nodes();
    let h = samples.grid.dx;
    let scale = h * h / (2.0 * PI);
    let rows: Vec<ComplexMatrix> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut acc = ComplexMatrix::zeros(cutoff, cutoff);
            for j in 0..m {
                let chi = samples.values[i * m + j];
                acc.add_scaled(chi * scale, &displacement_elements(-weyl_alpha(nodes[i], nodes[j]), cutoff));
            }
            acc
        })
        .collect();
    let mut sigma = ComplexMatrix::zeros(cutoff, cutoff);
    for r in &rows {
        sigma.add_scaled(C64::new(1.0, 0.0), r);
    }

    let raw_trace = sigma.trace();
    if (raw_trace - 1.0).norm() > RAW_TRACE_TOL {
        return Err(Error::QuadratureTooCoarse(format!(
            "raw trace {raw_trace} deviates from 1 by more than {RAW_TRACE_TOL}"
        )));
    }
    let herm = sigma.hermitian_part();
    let eig = hermitian_eigendecompose(&herm)?;
    let min_eigenvalue = eig.eigenvalues[0];
    let (matrix, psd_clipped) = if opts.psd_clip {
        let clipped = eig.apply(|l| C64::new(l.max(0.0), 0.0));
        let tr = clipped.trace().re;
        (clipped.hermitian_part().scale_real(1.0 / tr), true)
    } else {
        (herm.scale_real(1.0 / herm.trace().re), false)
    };
    let tail = (cutoff.saturating_sub(TAIL_LEVELS)..cutoff).map(|k| matrix[(k, k)].re).sum::<f64>();
    if tail > RECONSTRUCTION_TAIL_TOL {
        return Err(Error::CutoffTooSmall(format!("reconstruction puts {tail:.3e} on the top levels")));
    }
    Ok(WhReconstruction { matrix, raw_trace, min_eigenvalue, tail_mass: tail, psd_clipped })
}

/// Highest level `k` with `⟨k|ρ|k⟩` above the occupation threshold.
pub fn max_occupied_level(rho: &DensityMatrix) -> usize {
    (0..rho.dim()).rev().find(|&k| rho.matrix()[(k, k)].re > OCCUPIED_TOL).unwrap_or(0)
}

/// Synthesizes samples from `rho` and reconstructs on `cutoff ≥ 2·(max occupied level) + 8` levels.
pub fn reconstruct_wh_from_state(
    rho: &DensityMatrix,
    box_half_width: f64,
    m: usize,
    cutoff: usize,
    opts: &ReconstructionOptions,
) -> Result<WhReconstruction> {
    let need = 2 * max_occupied_level(rho) + 8;
    if cutoff < need {
        return Err(Error::CutoffTooSmall(format!("cutoff {cutoff} below 2·(max occupied level) + 8 = {need}")));
    }
    let samples = characteristic_samples(rho, box_half_width, m)?;
    reconstruct_wh(&samples, cutoff, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::matrix_trace_distance;
    use crate::weyl::fock::number_state;

    #[test]
    fn vacuum_round_trip() {
        let vac = number_state(0, 16).unwrap();
        let out = reconstruct_wh_from_state(&vac, 6.0, 64, 16, &Default::default()).unwrap();
        assert!(matrix_trace_distance(&out.matrix, vac.matrix()).unwrap() < 0.05);
        assert!((out.raw_trace - 1.0).norm() < 0.02);
    }

    #[test]
    fn preconditions() {
        let vac = number_state(0, 16).unwrap();
        assert!(matches!(
            reconstruct_wh_from_state(&vac, 4.0, 64, 16, &Default::default()),
            Err(Error::QuadratureTooCoarse(_))
        ));
        assert!(matches!(
            reconstruct_wh_from_state(&vac, 6.0, 16, 16, &Default::default()),
            Err(Error::QuadratureTooCoarse(_))
        ));
        let three = number_state(3, 16).unwrap();
        assert!(matches!(
            reconstruct_wh_from_state(&three, 6.0, 64, 12, &Default::default()),
            Err(Error::CutoffTooSmall(_))
        ));
    }

    #[test]
    fn psd_clip_yields_a_state() {
        let vac = number_state(0, 16).unwrap();
        let opts = ReconstructionOptions { psd_clip: true };
        let out = reconstruct_wh_from_state(&vac, 6.0, 40, 16, &opts).unwrap();
        assert!(out.psd_clipped);
        let state = out.state().unwrap();
        assert!(matrix_trace_distance(state.matrix(), vac.matrix()).unwrap() < 0.05);
    }

    #[test]
    fn csv_round_trip() {
        let vac = number_state(0, 8).unwrap();
        let s = characteristic_samples(&vac, 5.0, 32).unwrap();
        let back = CharacteristicSamples::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back.values(), s.values());
        assert!((back.box_half_width() - 5.0).abs() < 1e-12);
    }
}
