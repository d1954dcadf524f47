//! Spin-1/2 tomography: axis operators `½ s·σ`, two-atom tomograms, the
//! Bloch-angle closed form for pure states, equivariance under SU(2) and
//! reconstruction by quadrature over the Haar measure.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::format::{json_number, json_numbers};
use crate::group::{Atom, DiscreteTomogram, TomogramContext};
use crate::numkernel::{basis_populations, gauss_legendre, hermitian_eigendecompose, pauli, ComplexMatrix, C64};
use crate::states::{validate_density, DensityMatrix};

pub const SPECIAL_UNITARY_TOL: f64 = 1e-10;
/// Largest tolerated `|Tr σ − 1|` of a Haar-quadrature reconstruction.
pub const QUADRATURE_TRACE_TOL: f64 = 1e-3;
pub const MIN_QUADRATURE_ORDER: usize = 8;

/// Nonzero real 3-vector `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinAxis([f64; 3]);

impl SpinAxis {
    pub fn new(s: [f64; 3]) -> Result<Self> {
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::BadParameter(format!("axis {s:?} is not finite")));
        }
        if s.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroAxis);
        }
        Ok(Self(s))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        let [x, y, z] = self.0;
        (x * x + y * y + z * z).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.map(|x| c * x))
    }
}

/// Euler angles of `e^{−iασ_z/2} e^{−iβσ_y/2} e^{−iγσ_z/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..2.0 * PI).contains(&alpha) {
            return Err(Error::OutOfRange(format!("alpha = {alpha} not in [0, 2π)")));
        }
        if !(0.0..=PI).contains(&beta) {
            return Err(Error::OutOfRange(format!("beta = {beta} not in [0, π]")));
        }
        if !(0.0..4.0 * PI).contains(&gamma) {
            return Err(Error::OutOfRange(format!("gamma = {gamma} not in [0, 4π)")));
        }
        Ok(Self { alpha, beta, gamma })
    }
}

pub fn su2_element(e: &EulerAngles) -> ComplexMatrix {
    let z = |a: f64| ComplexMatrix::from_diagonal(&[C64::from_polar(1.0, -a / 2.0), C64::from_polar(1.0, a / 2.0)]);
    let (s, c) = (e.beta / 2.0).sin_cos();
    let y = ComplexMatrix::from_rows(&[&[C64::new(c, 0.0), C64::new(-s, 0.0)], &[C64::new(s, 0.0), C64::new(c, 0.0)]]);
    z(e.alpha).matmul(&y).matmul(&z(e.gamma))
}

/// `½ (s_x σ_x + s_y σ_y + s_z σ_z)`.
pub fn axis_operator(s: &SpinAxis) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for (sigma, c) in pauli().iter().zip(s.components()) {
        out.add_scaled(C64::new(c / 2.0, 0.0), sigma);
    }
    out
}

/// Components of `s` from a traceless Hermitian `M = s·σ`.
fn axis_from_matrix(m: &ComplexMatrix) -> [f64; 3] {
    let [x, y, z] = pauli();
    [x, y, z].map(|p| m.trace_product(&p).re / 2.0)
}

/// Atoms at `X = −|s|/2` and `X = +|s|/2`, weighted by the eigenprojector populations.
pub fn spin_tomogram(rho: &DensityMatrix, s: &SpinAxis) -> Result<DiscreteTomogram> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    let eig = hermitian_eigendecompose(&axis_operator(s))?;
    let weights = basis_populations(&eig.basis, rho.matrix());
    let half = s.norm() / 2.0;
    DiscreteTomogram::from_raw(vec![-half, half], weights, TomogramContext::Axis(s.components()))
}

/// Weights `(w₋, w₊)` of the Bloch-angle formula for a pure state `(θ, φ)`.
pub fn pure_state_weights(theta: f64, phi: f64, s: &SpinAxis) -> (f64, f64) {
    let n = s.norm();
    let [sx, sy, sz] = s.components().map(|c| c / n);
    let proj = sz * theta.cos() + theta.sin() * (sx * phi.cos() + sy * phi.sin());
    (0.5 * (1.0 - proj), 0.5 * (1.0 + proj))
}

/// `σ = 2 ∫ χ(g) U(g)† dμ(g)` by a product rule over Euler angles: trapezoid
/// in `α` and `γ`, Gauss–Legendre in `cos β`.
pub fn su2_reconstruct<F>(chi: F, order: (usize, usize, usize)) -> Result<DensityMatrix>
where
    F: Fn(&ComplexMatrix) -> C64 + Sync,
{
    let (na, nb, ng) = order;
    if na.min(nb).min(ng) < MIN_QUADRATURE_ORDER {
        return Err(Error::QuadratureTooCoarse(format!("orders {order:?} below the minimum {MIN_QUADRATURE_ORDER}")));
    }
    let (cos_beta, w_beta) = gauss_legendre(nb)?;
    let da = 2.0 * PI / na as f64;
    let dg = 4.0 * PI / ng as f64;
    let base = da * dg / (16.0 * PI * PI);
    let partial: Vec<ComplexMatrix> = (0..na)
        .into_par_iter()
        .map(|i| {
            let alpha = i as f64 * da;
            let mut acc = ComplexMatrix::zeros(2, 2);
            for (cb, wb) in cos_beta.iter().zip(&w_beta) {
                let beta = cb.clamp(-1.0, 1.0).acos();
                for k in 0..ng {
                    let u = su2_element(&EulerAngles { alpha, beta, gamma: k as f64 * dg });
                    acc.add_scaled(chi(&u) * (2.0 * base * wb), &u.adjoint());
                }
            }
            acc
        })
        .collect();
    let mut sigma = ComplexMatrix::zeros(2, 2);
    for p in &partial {
        sigma.add_scaled(C64::new(1.0, 0.0), p);
    }
    let trace = sigma.trace();
    if (trace - 1.0).norm() > QUADRATURE_TRACE_TOL {
        return Err(Error::QuadratureTooCoarse(format!("trace {trace} at orders {order:?}")));
    }
    let normalized = sigma.hermitian_part().scale_real(1.0 / trace.re);
    validate_density(&normalized).map_err(|e| Error::ReconstructionNotState { reason: e.to_string() })
}

/// Checks `det g = 1` and unitarity.
pub fn require_special_unitary(g: &ComplexMatrix) -> Result<()> {
    g.require_square()?;
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: g.dim() });
    }
    let unitarity = g.unitary_residual();
    let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)] - 1.0).norm();
    if unitarity > SPECIAL_UNITARY_TOL || det > SPECIAL_UNITARY_TOL {
        return Err(Error::NotSpecialUnitary { unitarity, det });
    }
    Ok(())
}

/// The axis `s'` with `s'·σ = U (s·σ) U†`, so that the tomogram of `ρ` along
/// `s'` equals the tomogram of `U†ρU` along `s`.
pub fn moved_axis(s: &SpinAxis, g: &ComplexMatrix) -> Result<SpinAxis> {
    require_special_unitary(g)?;
    let m = g.matmul(&axis_operator(s)).matmul(&g.adjoint()).scale_real(2.0);
    SpinAxis::new(axis_from_matrix(&m))
}

/// Largest weight difference between the tomogram of `ρ` along the moved
/// axis and the tomogram of `g*ρ = U†ρU` along `s`.
pub fn equivariance_residual(rho: &DensityMatrix, s: &SpinAxis, g: &ComplexMatrix) -> Result<f64> {
    let moved = moved_axis(s, g)?;
    let lhs = spin_tomogram(rho, &moved)?;
    let rhs = spin_tomogram(&rho.conjugate_by(g)?, s)?;
    Ok(lhs.atoms.iter().zip(&rhs.atoms).map(|(a, b)| (a.weight - b.weight).abs()).fold(0.0, f64::max))
}

#[derive(Serialize)]
struct AtomJson {
    #[serde(rename = "X")]
    x: Box<RawValue>,
    w: Box<RawValue>,
}

#[derive(Serialize)]
struct SpinJson {
    axis: Vec<Box<RawValue>>,
    atoms: Vec<AtomJson>,
}

/// `{ "axis": [s_x, s_y, s_z], "atoms": [{"X": …, "w": …}, …] }`.
pub fn spin_tomogram_to_json(t: &DiscreteTomogram) -> Result<String> {
    let TomogramContext::Axis(axis) = t.context else {
        return Err(Error::BadParameter("tomogram is not attached to a spin axis".into()));
    };
    let atoms = t
        .atoms
        .iter()
        .map(|&Atom { location, weight }| Ok(AtomJson { x: json_number(location)?, w: json_number(weight)? }))
        .collect::<Result<Vec<_>>>()?;
    let out = SpinJson { axis: json_numbers(&axis)?, atoms };
    serde_json::to_string_pretty(&out).map_err(|e| Error::FileFormat(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{hermitian_eigendecompose, unitary_exp};
    use crate::states::{random_density, trace_distance};

    fn axis(s: [f64; 3]) -> SpinAxis {
        SpinAxis::new(s).unwrap()
    }

    #[test]
    fn axis_operator_examples() {
        let [x, _, z] = pauli();
        assert_eq!((&axis_operator(&axis([0.0, 0.0, 1.0])) - &z.scale_real(0.5)).max_abs(), 0.0);
        assert_eq!((&axis_operator(&axis([1.0, 0.0, 0.0])) - &x.scale_real(0.5)).max_abs(), 0.0);
        let eig = hermitian_eigendecompose(&axis_operator(&axis([3.0, 4.0, 0.0]))).unwrap();
        assert!((eig.eigenvalues[0] + 2.5).abs() < 1e-14 && (eig.eigenvalues[1] - 2.5).abs() < 1e-14);
        assert_eq!(SpinAxis::new([0.0; 3]), Err(Error::ZeroAxis));
    }

    #[test]
    fn tomogram_examples() {
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        let t = spin_tomogram(&up, &axis([0.0, 0.0, 1.0])).unwrap();
        assert_eq!(t.atoms[1].location, 0.5);
        assert!((t.atoms[1].weight - 1.0).abs() < 1e-15 && t.atoms[0].weight.abs() < 1e-15);

        let t = spin_tomogram(&up, &axis([1.0, 0.0, 0.0])).unwrap();
        assert!((t.atoms[0].weight - 0.5).abs() < 1e-15 && (t.atoms[1].weight - 0.5).abs() < 1e-15);

        let mixed = DensityMatrix::maximally_mixed(2);
        let t = spin_tomogram(&mixed, &axis([0.3, -1.0, 2.0])).unwrap();
        assert!((t.atoms[0].weight - 0.5).abs() < 1e-15);

        let qutrit = DensityMatrix::maximally_mixed(3);
        assert!(matches!(spin_tomogram(&qutrit, &axis([0.0, 0.0, 1.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn euler_ranges() {
        assert!(EulerAngles::new(0.0, PI, 4.0 * PI - 1e-9).is_ok());
        assert!(EulerAngles::new(2.0 * PI, 0.0, 0.0).is_err());
        assert!(EulerAngles::new(0.0, -0.1, 0.0).is_err());
        assert!(EulerAngles::new(0.0, 0.0, 4.0 * PI).is_err());
    }

    #[test]
    fn su2_elements_are_special_unitary() {
        let e = EulerAngles::new(1.1, 2.0, 7.5).unwrap();
        require_special_unitary(&su2_element(&e)).unwrap();
        let gamma_2pi = su2_element(&EulerAngles::new(0.0, 0.0, 2.0 * PI).unwrap());
        assert!((&gamma_2pi + &ComplexMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn reconstruction_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let back = su2_reconstruct(|u| mixed.matrix().trace_product(u), (16, 16, 32)).unwrap();
        assert!((back.matrix() - mixed.matrix()).max_abs() < 1e-10);

        let rho = random_density(2, 4).unwrap();
        let back = su2_reconstruct(|u| rho.matrix().trace_product(u), (32, 32, 64)).unwrap();
        assert!(trace_distance(&rho, &back).unwrap() < 1e-8);

        let plus = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let back = su2_reconstruct(|u| plus.matrix().trace_product(u), (32, 32, 64)).unwrap();
        assert!(trace_distance(&plus, &back).unwrap() < 1e-8);

        assert!(matches!(
            su2_reconstruct(|u| plus.matrix().trace_product(u), (4, 16, 16)),
            Err(Error::QuadratureTooCoarse(_))
        ));
    }

    #[test]
    fn equivariance_examples() {
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        let z = axis([0.0, 0.0, 1.0]);
        assert_eq!(equivariance_residual(&up, &z, &ComplexMatrix::identity(2)).unwrap(), 0.0);

        let [x, _, _] = pauli();
        let g = unitary_exp(&x.scale_real(-PI / 4.0), 1.0).unwrap();
        assert!(equivariance_residual(&up, &z, &g).unwrap() < 1e-12);

        let rho = random_density(2, 8).unwrap();
        let g = su2_element(&EulerAngles::new(0.4, 1.3, 5.0).unwrap());
        assert!(equivariance_residual(&rho, &axis([0.2, -0.7, 0.4]), &g).unwrap() < 1e-12);

        let not_su = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(equivariance_residual(&up, &z, &not_su), Err(Error::NotSpecialUnitary { .. })));
    }

    #[test]
    fn json_layout() {
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        let t = spin_tomogram(&up, &axis([0.0, 0.0, 2.0])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&spin_tomogram_to_json(&t).unwrap()).unwrap();
        assert_eq!(v["axis"][2], 2.0);
        assert_eq!(v["atoms"][1]["X"], 1.0);
        assert_eq!(v["atoms"][1]["w"], 1.0);
    }
}
