//! Density matrices: validation, the Bloch ball, distances and seeded fixtures.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::format::json_numbers;
use crate::numkernel::{hermitian_eigendecompose, pauli, psd_min_eigenvalue, ComplexMatrix, C64, ONE};
use crate::rng::SplitMix64;

/// Acceptance thresholds for [`validate_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for DensityTolerances {
    fn default() -> Self {
        Self { hermitian: 1e-10, trace: 1e-10, psd: 1e-10 }
    }
}

/// A Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self(ComplexMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sqr > 0.0) {
            return Err(Error::BadParameter("zero state vector".into()));
        }
        validate_density(&ComplexMatrix::outer(psi, psi).scale_real(1.0 / norm_sqr))
    }

    /// `|k⟩⟨k|` in dimension `n`.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::OutOfRange(format!("level {k} outside dimension {n}")));
        }
        let mut m = ComplexMatrix::zeros(n, n);
        m[(k, k)] = ONE;
        Ok(Self(m))
    }

    /// Bloch vector `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim() });
        }
        let p = pauli();
        Ok([0, 1, 2].map(|a| self.0.trace_product(&p[a]).re))
    }

    /// Unitary conjugation `U† ρ U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        validate_density(&u.adjoint().matmul(&self.0).matmul(u))
    }
}

pub fn validate_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    validate_density_with(m, &DensityTolerances::default())
}

pub fn validate_density_with(m: &ComplexMatrix, tol: &DensityTolerances) -> Result<DensityMatrix> {
    m.require_square()?;
    if !m.is_finite() {
        return Err(Error::BadParameter("matrix has non-finite entries".into()));
    }
    let residual = m.hermitian_residual();
    if residual > tol.hermitian {
        return Err(Error::NotHermitian { residual });
    }
    let h = m.hermitian_part();
    let trace = h.trace().re;
    if (trace - 1.0).abs() > tol.trace {
        return Err(Error::TraceNotOne { trace });
    }
    let min_eigenvalue = psd_min_eigenvalue(&h)?;
    if min_eigenvalue < -tol.psd {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(DensityMatrix(h))
}

/// Point of the Bloch ball in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BlochPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::OutOfRange(format!("r = {r} not in [0, 1]")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange(format!("theta = {theta} not in [0, pi]")));
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::OutOfRange(format!("phi = {phi} not in [0, 2pi)")));
        }
        Ok(Self { r, theta, phi })
    }

    /// Recovers spherical coordinates from a Bloch vector of norm ≤ 1.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r > 1.0 + 1e-12 {
            return Err(Error::OutOfRange(format!("Bloch vector norm {r} exceeds 1")));
        }
        if r == 0.0 {
            return Self::new(0.0, 0.0, 0.0);
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
        let phi = if phi >= 2.0 * PI { 0.0 } else { phi };
        Self::new(r.min(1.0), theta, phi)
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        [self.theta.sin() * self.phi.cos(), self.theta.sin() * self.phi.sin(), self.theta.cos()]
    }
}

/// `½(I + r n·σ)`.
pub fn bloch_density(p: &BlochPoint) -> Result<DensityMatrix> {
    let p = BlochPoint::new(p.r, p.theta, p.phi)?;
    let n = p.unit_vector();
    let sigma = pauli();
    let mut m = ComplexMatrix::identity(2);
    for a in 0..3 {
        m.add_scaled(C64::new(p.r * n[a], 0.0), &sigma[a]);
    }
    validate_density(&m.scale_real(0.5))
}

/// `½ Σ |λ_k(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    matrix_trace_distance(rho.matrix(), sigma.matrix())
}

/// Trace distance between arbitrary Hermitian matrices of equal dimension.
pub fn matrix_trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    // Subtract in a fixed order so the result is exactly symmetric.
    let (a, b) = if lexicographically_before(b, a) { (b, a) } else { (a, b) };
    let diff = (a - b).hermitian_part();
    let eig = hermitian_eigendecompose(&diff)?;
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

fn lexicographically_before(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
            std::cmp::Ordering::Equal => continue,
            o => return o.is_lt(),
        }
    }
    false
}

/// `G G† / Tr(G G†)` for a seeded complex Gaussian `G` (entries drawn row-major).
pub fn random_density(dim: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::BadParameter("dimension must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.complex_gaussian());
    let gg = g.matmul(&g.adjoint());
    let tr = gg.trace().re;
    validate_density(&gg.scale_real(1.0 / tr))
}

/// Seeded Haar-random pure state of the given dimension.
pub fn random_pure(dim: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = SplitMix64::new(seed);
    let psi: Vec<C64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
    DensityMatrix::pure(&psi)
}

#[derive(Serialize)]
struct DensityJsonOut {
    dim: usize,
    re: Vec<Box<RawValue>>,
    im: Vec<Box<RawValue>>,
}

#[derive(Deserialize)]
struct DensityJsonIn {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// `{ "dim": n, "re": [...], "im": [...] }`, row-major, 17 significant digits.
pub fn density_to_json(rho: &DensityMatrix) -> Result<String> {
    let m = rho.matrix();
    let re: Vec<f64> = m.as_slice().iter().map(|z| z.re).collect();
    let im: Vec<f64> = m.as_slice().iter().map(|z| z.im).collect();
    let out = DensityJsonOut { dim: m.dim(), re: json_numbers(&re)?, im: json_numbers(&im)? };
    serde_json::to_string_pretty(&out).map_err(|e| Error::FileFormat(e.to_string()))
}

/// Parses the density JSON format and enforces [`validate_density`].
pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    density_from_json_with(text, &DensityTolerances::default())
}

pub fn density_from_json_with(text: &str, tol: &DensityTolerances) -> Result<DensityMatrix> {
    let parsed: DensityJsonIn = serde_json::from_str(text).map_err(|e| Error::FileFormat(e.to_string()))?;
    let n = parsed.dim;
    if n == 0 || parsed.re.len() != n * n || parsed.im.len() != n * n {
        return Err(Error::FileFormat(format!(
            "density of dim {n} needs {} entries, got re={} im={}",
            n * n,
            parsed.re.len(),
            parsed.im.len()
        )));
    }
    let data = parsed.re.iter().zip(&parsed.im).map(|(&r, &i)| C64::new(r, i)).collect();
    validate_density_with(&ComplexMatrix::from_row_major(n, n, data)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ZERO;

    #[test]
    fn validate_examples() {
        assert!(validate_density(&ComplexMatrix::identity(2).scale_real(0.5)).is_ok());
        let [x, _, _] = pauli();
        assert!(matches!(validate_density(&x), Err(Error::TraceNotOne { trace }) if trace == 0.0));
        let d = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        match validate_density(&d) {
            Err(Error::NotPsd { min_eigenvalue }) => assert!((min_eigenvalue + 0.5).abs() < 1e-15),
            other => panic!("expected NotPsd, got {other:?}"),
        }
        let nh = ComplexMatrix::from_rows(&[&[ONE, ONE], &[ZERO, ZERO]]);
        assert!(matches!(validate_density(&nh), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn bloch_examples() {
        let mixed = bloch_density(&BlochPoint::new(0.0, 0.3, 1.0).unwrap()).unwrap();
        assert!((mixed.matrix() - DensityMatrix::maximally_mixed(2).matrix()).frobenius_norm() < 1e-15);

        let up = bloch_density(&BlochPoint::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!((up.matrix() - &ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).frobenius_norm() < 1e-15);

        let plus = bloch_density(&BlochPoint::new(1.0, PI / 2.0, 0.0).unwrap()).unwrap();
        let [x, _, _] = pauli();
        let expected = (&ComplexMatrix::identity(2) + &x).scale_real(0.5);
        assert!((plus.matrix() - &expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn bloch_rejects_out_of_range() {
        assert!(matches!(BlochPoint::new(1.2, 0.0, 0.0), Err(Error::OutOfRange(_))));
        assert!(matches!(BlochPoint::new(0.5, 4.0, 0.0), Err(Error::OutOfRange(_))));
        assert!(matches!(BlochPoint::new(0.5, 1.0, 7.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn pure_iff_unit_radius() {
        for (r, rank1) in [(1.0, true), (0.7, false)] {
            let rho = bloch_density(&BlochPoint::new(r, 1.1, 2.3).unwrap()).unwrap();
            let purity = rho.matrix().trace_product(rho.matrix()).re;
            assert_eq!((purity - 1.0).abs() < 1e-12, rank1);
        }
    }

    #[test]
    fn trace_distance_examples() {
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        let down = DensityMatrix::basis_state(2, 1).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(trace_distance(&up, &up).unwrap(), 0.0);
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&mixed, &up).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            trace_distance(&up, &DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_density_examples() {
        let one = random_density(1, 5).unwrap();
        assert!((one.matrix()[(0, 0)] - ONE).norm() < 1e-15);
        assert_eq!(random_density(2, 42).unwrap(), random_density(2, 42).unwrap());
        assert_ne!(random_density(2, 42).unwrap(), random_density(2, 43).unwrap());
        assert!(validate_density(random_density(4, 7).unwrap().matrix()).is_ok());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let rho = random_density(3, 11).unwrap();
        let text = density_to_json(&rho).unwrap();
        let back = density_from_json(&text).unwrap();
        assert!((back.matrix() - rho.matrix()).max_abs() == 0.0);
        let bad = r#"{"dim": 2, "re": [1.5, 0, 0, -0.5], "im": [0, 0, 0, 0]}"#;
        assert!(matches!(density_from_json(bad), Err(Error::NotPsd { .. })));
        let short = r#"{"dim": 2, "re": [1, 0, 0], "im": [0, 0, 0, 0]}"#;
        assert!(matches!(density_from_json(short), Err(Error::FileFormat(_))));
    }
}
