use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fock::{check_tail, WHDirection};
use super::tomogram::grid_tomogram;
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::grid::UniformGrid;
use crate::numkernel::C64;
use crate::radon::{parse_matrix_csv, radon, ImageGrid};
use crate::states::DensityMatrix;

/// Largest tolerated `|∬w − 1|` on the output grid.
pub const WIGNER_NORMALIZATION_TOL: f64 = 1e-4;
/// Matrix elements below this are treated as outside the state's support.
const SUPPORT_TOL: f64 = 1e-14;

/// Hermite functions `ψ_0(x)..ψ_{n−1}(x)`, normalized in `L²(ℝ)`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut psi = vec![0.0; n];
    if n == 0 {
        return psi;
    }
    psi[0] = PI.powf(-0.25) * (-x * x / 2.0).exp();
    if n > 1 {
        psi[1] = 2f64.sqrt() * x * psi[0];
    }
    for k in 1..n - 1 {
        let kf = k as f64;
        psi[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * psi[k] - (kf / (kf + 1.0)).sqrt() * psi[k - 1];
    }
    psi
}

/// Number of leading levels carrying all of `ρ` above [`SUPPORT_TOL`].
fn support_levels(rho: &DensityMatrix) -> usize {
    let m = rho.matrix();
    let n = rho.dim();
    (0..n).rev().find(|&k| (0..n).any(|j| m[(k, j)].norm() > SUPPORT_TOL)).map_or(1, |k| k + 1)
}

/// `⟨x|ρ|x⟩` from Hermite functions.
pub fn position_density(rho: &DensityMatrix, x: f64) -> f64 {
    let k = support_levels(rho);
    let psi = hermite_functions(k, x);
    let m = rho.matrix();
    let mut total = 0.0;
    for i in 0..k {
        for j in 0..k {
            total += m[(i, j)].re * psi[i] * psi[j];
        }
    }
    total
}

/// `w(q, p) = (1/2π) ∫ ⟨q + y/2|ρ|q − y/2⟩ e^{−ipy} dy`, single mode.
pub fn wigner(rho: &DensityMatrix, q_grid: &UniformGrid, p_grid: &UniformGrid) -> Result<ImageGrid> {
    check_tail(rho, 1)?;
    let k = support_levels(rho);
    let m = rho.matrix();
    let rho_k: Vec<C64> = (0..k).flat_map(|i| (0..k).map(move |j| m[(i, j)])).collect();

    // Position wave functions live in |x| ≲ √(2k+1); the kernel needs |q ± y/2| inside that.
    let reach = (2.0 * k as f64 + 1.0).sqrt() + 6.0;
    let p_max = p_grid.x0.abs().max(p_grid.last().abs()).max(reach);
    let dy = PI / (2.0 * p_max);
    let ny = (2.0 * reach / dy).ceil() as usize;
    let ps = p_grid.nodes();

    let values: Vec<f64> = q_grid
        .nodes()
        .par_iter()
        .flat_map_iter(|&q| {
            // f(y) for y ≥ 0; f(−y) = f(y)*.
            let f: Vec<C64> = (0..=ny)
                .map(|i| {
                    let y = i as f64 * dy;
                    let a = hermite_functions(k, q + y / 2.0);
                    let b = hermite_functions(k, q - y / 2.0);
                    let mut s = C64::new(0.0, 0.0);
                    for r in 0..k {
                        for c in 0..k {
                            s += rho_k[r * k + c] * (a[r] * b[c]);
                        }
                    }
                    s
                })
                .collect();
            ps.iter()
                .map(|&p| {
                    let tail: f64 = f
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, fi)| (fi * C64::from_polar(1.0, -p * i as f64 * dy)).re)
                        .sum();
                    (f[0].re + 2.0 * tail) * dy / (2.0 * PI)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let img = ImageGrid::new(*q_grid, *p_grid, values)?;
    let integral = img.integral();
    if !((integral - 1.0).abs() <= WIGNER_NORMALIZATION_TOL) {
        return Err(Error::GridTooNarrow { integral });
    }
    Ok(img)
}

/// `sup |Radon(w_ρ)(θ, X) − W_ρ(X; cos θ, sin θ)|` over the given angles and `X` grid,
/// with the Wigner function sampled on `phase_grid × phase_grid`.
pub fn wigner_radon_consistency(
    rho: &DensityMatrix,
    thetas: &[f64],
    x_grid: &UniformGrid,
    phase_grid: &UniformGrid,
) -> Result<f64> {
    let w = wigner(rho, phase_grid, phase_grid)?;
    let sino = radon(&w, thetas, x_grid)?;
    let mut worst: f64 = 0.0;
    for (k, &theta) in thetas.iter().enumerate() {
        let tomo = grid_tomogram(rho, &WHDirection::angle(theta)?, x_grid)?;
        for (a, b) in sino.row(k).iter().zip(tomo.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// `q,p,w` rows.
pub fn wigner_to_csv(img: &ImageGrid) -> String {
    let mut out = String::from("q,p,w\n");
    let (qg, pg) = (img.q_grid(), img.p_grid());
    for i in 0..img.nq {
        for j in 0..img.np {
            out.push_str(&format!("{},{},{}\n", sig17(qg.node(i)), sig17(pg.node(j)), sig17(img.value(i, j))));
        }
    }
    out
}

/// Sidecar for the raw-matrix layout, shared by both axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareGridMeta {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

/// Headerless matrix (one row per `q` node) plus `{x0, dx, n}` sidecar; the grid must be square.
pub fn wigner_to_raw(img: &ImageGrid) -> Result<(String, String)> {
    if img.q_grid() != img.p_grid() {
        return Err(Error::BadParameter("raw Wigner output needs identical q and p grids".into()));
    }
    let meta = SquareGridMeta { x0: img.q0, dx: img.dq, n: img.nq };
    let meta = serde_json::to_string_pretty(&meta).map_err(|e| Error::FileFormat(e.to_string()))?;
    Ok((img.to_csv(), meta))
}

pub fn wigner_from_raw(csv: &str, meta: &str) -> Result<ImageGrid> {
    let meta: SquareGridMeta = serde_json::from_str(meta).map_err(|e| Error::FileFormat(e.to_string()))?;
    let g = UniformGrid::new(meta.x0, meta.dx, meta.n)?;
    ImageGrid::new(g, g, parse_matrix_csv(csv, meta.n, meta.n, "Wigner file")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::fock::number_state;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = UniformGrid::span(-12.0, 12.0, 2401).unwrap();
        let table: Vec<Vec<f64>> = g.nodes().iter().map(|&x| hermite_functions(6, x)).collect();
        for a in 0..6 {
            for b in 0..6 {
                let v: Vec<f64> = table.iter().map(|p| p[a] * p[b]).collect();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((g.trapezoid(&v) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_and_single_photon() {
        let g = UniformGrid::span(-5.0, 5.0, 81).unwrap();
        let w = wigner(&number_state(0, 16).unwrap(), &g, &g).unwrap();
        for i in 0..g.n {
            for j in 0..g.n {
                let (q, p) = (g.node(i), g.node(j));
                assert!((w.value(i, j) - (-q * q - p * p).exp() / PI).abs() < 1e-6);
            }
        }
        let origin = UniformGrid::span(-6.0, 6.0, 121).unwrap();
        let w = wigner(&number_state(1, 16).unwrap(), &origin, &origin).unwrap();
        assert!((w.value(60, 60) + 1.0 / PI).abs() < 1e-6);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let g = UniformGrid::span(-1.0, 1.0, 21).unwrap();
        assert!(matches!(wigner(&number_state(0, 8).unwrap(), &g, &g), Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn raw_round_trip() {
        let g = UniformGrid::span(-6.0, 6.0, 121).unwrap();
        let w = wigner(&number_state(0, 8).unwrap(), &g, &g).unwrap();
        let (csv, meta) = wigner_to_raw(&w).unwrap();
        assert_eq!(wigner_from_raw(&csv, &meta).unwrap(), w);
        assert!(wigner_to_csv(&w).starts_with("q,p,w\n"));
    }
}
