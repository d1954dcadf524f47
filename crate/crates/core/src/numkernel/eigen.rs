use std::f64::consts::PI;

use super::matrix::{ComplexMatrix, C64, I, ZERO};
use crate::error::{Error, Result};

/// Tolerances used by the eigen-routines. `Default` gives the module constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Largest accepted `‖H − H†‖_F / ‖H‖_F`.
    pub hermitian_tol: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm is below this times `‖H‖_F`.
    pub off_diagonal_tol: f64,
    pub max_sweeps: usize,
    /// Largest accepted `‖U U† − I‖_F`.
    pub unitary_tol: f64,
    /// Eigenvalue gaps below this are treated as one degenerate eigenspace.
    pub degeneracy_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-10,
            off_diagonal_tol: 1e-14,
            max_sweeps: 100,
            unitary_tol: 1e-10,
            degeneracy_tol: 1e-8,
        }
    }
}

/// Spectral decomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` is the eigenvector for `eigenvalues[k]`.
    pub basis: ComplexMatrix,
}

impl Eigensystem {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.basis.column(k)
    }

    /// `V f(Λ) V†` for a complex function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.basis;
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| C64::new(l, 0.0))
    }

    /// Diagonal of `V† ρ V`: the weight of each eigenvector in `rho`.
    pub fn populations(&self, rho: &ComplexMatrix) -> Vec<f64> {
        basis_populations(&self.basis, rho)
    }
}

/// `(V† ρ V)_kk` for every column `k` of `basis`.
pub fn basis_populations(basis: &ComplexMatrix, rho: &ComplexMatrix) -> Vec<f64> {
    let n = basis.rows();
    (0..basis.cols())
        .map(|k| {
            let v = basis.column(k);
            let rv = rho.mul_vec(&v);
            (0..n).map(|i| v[i].conj() * rv[i]).sum::<C64>().re
        })
        .collect()
}

/// Unitary eigendecomposition `U = V diag(e^{iθ}) V†`.
#[derive(Debug, Clone)]
pub struct UnitaryDiagonalization {
    /// In `(−π, π]`, ascending.
    pub phases: Vec<f64>,
    pub basis: ComplexMatrix,
}

impl UnitaryDiagonalization {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.phases.len();
        let v = &self.basis;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * C64::from_polar(1.0, self.phases[k]) * v[(j, k)].conj()).sum()
        })
    }
}

pub fn hermitian_eigendecompose(h: &ComplexMatrix) -> Result<Eigensystem> {
    hermitian_eigendecompose_with(h, &EigenOptions::default())
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
pub fn hermitian_eigendecompose_with(h: &ComplexMatrix, opts: &EigenOptions) -> Result<Eigensystem> {
    let n = h.require_square()?;
    let residual = h.hermitian_residual();
    if residual > opts.hermitian_tol {
        return Err(Error::NotHermitian { residual });
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = h.frobenius_norm();
    let target = opts.off_diagonal_tol * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target || scale == 0.0 {
            break;
        }
        if sweeps >= opts.max_sweeps {
            return Err(Error::ConvergenceFailure { sweeps, off });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut basis = ComplexMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = v.column(i);
        fix_phase(&mut col);
        basis.set_column(k, &col);
    }
    Ok(Eigensystem { eigenvalues, basis })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · R(c, s)` acting on
/// the `(p, q)` plane, then accumulates `V ← V J`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = a[(p, q)];
    let mag = z.norm();
    if mag == 0.0 {
        return;
    }
    let phase = z / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Rotates a unit vector so that its first non-negligible component is real and positive.
fn fix_phase(col: &mut [C64]) {
    if let Some(&lead) = col.iter().find(|z| z.norm() > 1e-10) {
        let rot = lead.conj() / lead.norm();
        for z in col.iter_mut() {
            *z *= rot;
        }
    }
}

pub fn diagonalize_unitary(u: &ComplexMatrix) -> Result<UnitaryDiagonalization> {
    diagonalize_unitary_with(u, &EigenOptions::default())
}

/// Diagonalizes a unitary through the commuting Hermitian pair
/// `A = (U + U†)/2`, `B = (U − U†)/2i`: eigendecompose `A`, then resolve each
/// degenerate eigenspace of `A` with `B`.
pub fn diagonalize_unitary_with(u: &ComplexMatrix, opts: &EigenOptions) -> Result<UnitaryDiagonalization> {
    let n = u.require_square()?;
    let residual = u.unitary_residual();
    if residual > opts.unitary_tol {
        return Err(Error::NotUnitary { residual });
    }
    let adj = u.adjoint();
    let a = (u + &adj).scale_real(0.5);
    let b = (u - &adj).scale(-I * 0.5);
    let herm_opts = EigenOptions { hermitian_tol: f64::INFINITY, ..*opts };
    let eig_a = hermitian_eigendecompose_with(&a, &herm_opts)?;
    let mut basis = eig_a.basis.clone();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig_a.eigenvalues[end] - eig_a.eigenvalues[end - 1] < opts.degeneracy_tol {
            end += 1;
        }
        if end - start > 1 {
            let cols: Vec<usize> = (start..end).collect();
            let rows: Vec<usize> = (0..n).collect();
            let w = basis.select(&rows, &cols);
            let b_sub = w.adjoint().matmul(&b).matmul(&w);
            let eig_b = hermitian_eigendecompose_with(&b_sub, &herm_opts)?;
            let rotated = w.matmul(&eig_b.basis);
            for (k, &c) in cols.iter().enumerate() {
                basis.set_column(c, &rotated.column(k));
            }
        }
        start = end;
    }

    let mut entries: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut col = basis.column(k);
            let uv = u.mul_vec(&col);
            let lambda: C64 = col.iter().zip(&uv).map(|(x, y)| x.conj() * y).sum();
            fix_phase(&mut col);
            (principal_phase(lambda.im.atan2(lambda.re)), col)
        })
        .collect();
    entries.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut out = ComplexMatrix::zeros(n, n);
    let mut phases = Vec::with_capacity(n);
    for (k, (phase, col)) in entries.into_iter().enumerate() {
        phases.push(phase);
        out.set_column(k, &col);
    }
    Ok(UnitaryDiagonalization { phases, basis: out })
}

/// Maps an angle to `(−π, π]`, sending `−π` (and roundoff around it) to `π`.
pub fn principal_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if (t + PI).abs() < 1e-12 {
        t = PI;
    }
    t
}

/// `e^{itH}` for Hermitian `H`, exact on the computed spectrum.
pub fn unitary_exp(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigendecompose(h)?;
    Ok(eig.apply(|l| C64::from_polar(1.0, t * l)))
}

pub fn psd_min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigendecompose(m)?;
    Ok(eig.eigenvalues.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::matrix::{pauli, ONE};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sigma_z_eigenvalues() {
        let [_, _, z] = pauli();
        let e = hermitian_eigendecompose(&z).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn sigma_x_eigenvectors() {
        let [x, _, _] = pauli();
        let e = hermitian_eigendecompose(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        let r = 1.0 / 2f64.sqrt();
        // fixed phase convention: first component real positive
        let v0 = e.eigenvector(0);
        let v1 = e.eigenvector(1);
        assert!((v0[0] - c(r, 0.0)).norm() < 1e-15 && (v0[1] - c(-r, 0.0)).norm() < 1e-15);
        assert!((v1[0] - c(r, 0.0)).norm() < 1e-15 && (v1[1] - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = hermitian_eigendecompose(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
        assert!(e.basis.unitary_residual() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_and_non_square() {
        let m = ComplexMatrix::from_rows(&[&[ONE, ONE], &[ZERO, ONE]]);
        assert!(matches!(hermitian_eigendecompose(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(hermitian_eigendecompose(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn convergence_cap_reported() {
        let [x, _, _] = pauli();
        let opts = EigenOptions { max_sweeps: 0, ..Default::default() };
        assert!(matches!(hermitian_eigendecompose_with(&x, &opts), Err(Error::ConvergenceFailure { .. })));
    }

    #[test]
    fn unitary_phases() {
        let d = diagonalize_unitary(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(d.phases, vec![0.0; 3]);
        assert!((&d.basis - &ComplexMatrix::identity(3)).frobenius_norm() == 0.0);

        let [x, _, _] = pauli();
        let d = diagonalize_unitary(&x).unwrap();
        assert!(d.phases[0].abs() < 1e-15);
        assert_eq!(d.phases[1], PI);

        let diag = ComplexMatrix::from_diagonal(&[I, -I]);
        let d = diagonalize_unitary(&diag).unwrap();
        assert!((d.phases[0] + PI / 2.0).abs() < 1e-15);
        assert!((d.phases[1] - PI / 2.0).abs() < 1e-15);
        assert!((&d.reconstruct() - &diag).frobenius_norm() < 1e-14);
    }

    #[test]
    fn minus_identity_maps_to_pi() {
        let d = diagonalize_unitary(&ComplexMatrix::identity(2).scale_real(-1.0)).unwrap();
        assert_eq!(d.phases, vec![PI, PI]);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = ComplexMatrix::identity(2).scale_real(2.0);
        assert!(matches!(diagonalize_unitary(&m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn exp_of_sigma_z() {
        let [_, _, z] = pauli();
        assert!((&unitary_exp(&z, 0.0).unwrap() - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-15);
        let u = unitary_exp(&z, PI / 2.0).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[I, -I]);
        assert!((&u - &expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn psd_min_eigenvalue_examples() {
        assert!((psd_min_eigenvalue(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-15);
        let d = ComplexMatrix::from_real_diagonal(&[1.0, -2.0]);
        assert_eq!(psd_min_eigenvalue(&d).unwrap(), -2.0);
        let h = C64::new(0.5, 0.0);
        let proj = ComplexMatrix::from_rows(&[&[h, h], &[h, h]]);
        assert!(psd_min_eigenvalue(&proj).unwrap().abs() < 1e-15);
    }

    #[test]
    fn principal_branch() {
        assert_eq!(principal_phase(-PI), PI);
        assert_eq!(principal_phase(PI), PI);
        assert!((principal_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
