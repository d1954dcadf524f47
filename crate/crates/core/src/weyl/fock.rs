use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::numkernel::{unitary_exp, ComplexMatrix, C64, I};
use crate::states::DensityMatrix;

/// Levels `k ≥ N − TAIL_LEVELS` count towards the tail mass.
pub const TAIL_LEVELS: usize = 4;
pub const TAIL_MASS_TOL: f64 = 1e-6;
pub const MAX_MODES: usize = 2;

/// Truncated single-mode Fock space with its ladder and quadrature operators.
#[derive(Debug, Clone)]
pub struct FockSpace {
    cutoff: usize,
    a: ComplexMatrix,
    a_dag: ComplexMatrix,
    q: ComplexMatrix,
    p: ComplexMatrix,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::BadCutoff(cutoff));
        }
        let mut a = ComplexMatrix::zeros(cutoff, cutoff);
        for k in 0..cutoff - 1 {
            a[(k, k + 1)] = C64::new(((k + 1) as f64).sqrt(), 0.0);
        }
        let a_dag = a.adjoint();
        let q = (&a + &a_dag).scale_real(1.0 / SQRT_2);
        let p = (&a - &a_dag).scale(-I / SQRT_2);
        Ok(Self { cutoff, a, a_dag, q, p })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn a_dag(&self) -> &ComplexMatrix {
        &self.a_dag
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    /// `μQ + νP`.
    pub fn quadrature(&self, mu: f64, nu: f64) -> ComplexMatrix {
        let mut out = self.q.scale_real(mu);
        out.add_scaled(C64::new(nu, 0.0), &self.p);
        out
    }

    /// `‖[a, a†] − I‖_max` on the leading `(N−1)×(N−1)` block.
    pub fn commutator_block_residual(&self) -> f64 {
        let comm = &self.a.matmul(&self.a_dag) - &self.a_dag.matmul(&self.a);
        let k = self.cutoff - 1;
        (&comm.leading_block(k) - &ComplexMatrix::identity(k)).max_abs()
    }
}

pub fn fock_operators(cutoff: usize) -> Result<FockSpace> {
    FockSpace::new(cutoff)
}

/// Direction `ξ = (μ, ν, s)` in the Weyl–Heisenberg algebra, one `(μ_j, ν_j)` per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct WHDirection {
    mu: Vec<f64>,
    nu: Vec<f64>,
    shift: f64,
}

impl WHDirection {
    pub fn new(mu: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        if mu.len() != nu.len() {
            return Err(Error::BadDirection(format!("{} mu components but {} nu components", mu.len(), nu.len())));
        }
        if mu.is_empty() {
            return Err(Error::BadDirection("no modes".into()));
        }
        if mu.iter().chain(&nu).any(|x| !x.is_finite()) {
            return Err(Error::BadDirection("non-finite component".into()));
        }
        if mu.iter().chain(&nu).all(|&x| x == 0.0) {
            return Err(Error::BadDirection("mu and nu are both zero".into()));
        }
        Ok(Self { mu, nu, shift: 0.0 })
    }

    pub fn single(mu: f64, nu: f64) -> Result<Self> {
        Self::new(vec![mu], vec![nu])
    }

    /// Unit direction `(cos θ, sin θ)`.
    pub fn angle(theta: f64) -> Result<Self> {
        Self::single(theta.cos(), theta.sin())
    }

    /// Central coordinate `s`: tomograms are evaluated at `X − s`.
    pub fn with_shift(mut self, s: f64) -> Self {
        self.shift = s;
        self
    }

    pub fn modes(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `Σ_j μ_j² + ν_j²`.
    pub fn norm_sq(&self) -> f64 {
        self.mu.iter().zip(&self.nu).map(|(m, n)| m * m + n * n).sum()
    }

    /// `max_j √(μ_j² + ν_j²)`.
    pub fn max_mode_norm(&self) -> f64 {
        self.mu.iter().zip(&self.nu).map(|(m, n)| m.hypot(*n)).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Ok(Self::new(self.mu.iter().map(|x| c * x).collect(), self.nu.iter().map(|x| c * x).collect())?
            .with_shift(c * self.shift))
    }

    pub(crate) fn require_modes(&self, max: usize) -> Result<()> {
        if self.modes() > max {
            return Err(Error::BadDirection(format!("{} modes, at most {max} supported", self.modes())));
        }
        Ok(())
    }
}

/// `e^{i(μQ+νP)}` on the truncated space, exponentiating the truncated generator.
pub fn displacement(d: &WHDirection, fs: &FockSpace) -> Result<ComplexMatrix> {
    d.require_modes(1)?;
    unitary_exp(&fs.quadrature(d.mu()[0], d.nu()[0]), 1.0)
}

/// `e^{i(μQ+νP)}` for `(μ, ν) = (0, 0)` too, by exponentiation.
pub fn displacement_raw(mu: f64, nu: f64, fs: &FockSpace) -> Result<ComplexMatrix> {
    unitary_exp(&fs.quadrature(mu, nu), 1.0)
}

/// `ln k!` for `k = 0..n`.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n.max(1)];
    for k in 1..n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// `L_n^{(k)}(x)` by the three-term recurrence.
fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let k = k as f64;
    let (mut l0, mut l1) = (1.0, 1.0 + k - x);
    if n == 0 {
        return l0;
    }
    for j in 1..n {
        let j = j as f64;
        let l2 = ((2.0 * j + 1.0 + k - x) * l1 - (j + k) * l0) / (j + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// The leading `N×N` block of the displacement operator `D(α) = e^{αa† − α*a}`
/// on the infinite Fock space, from the Laguerre closed form of its matrix
/// elements.
pub fn displacement_elements(alpha: C64, cutoff: usize) -> ComplexMatrix {
    let x = alpha.norm_sqr();
    let lf = log_factorials(cutoff);
    let element = |m: usize, n: usize, alpha: C64| -> C64 {
        // m ≥ n: √(n!/m!) α^{m−n} e^{−|α|²/2} L_n^{(m−n)}(|α|²)
        let d = m - n;
        if d > 0 && x == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let log_mag = 0.5 * (lf[n] - lf[m]) + if d > 0 { d as f64 * x.sqrt().ln() } else { 0.0 } - x / 2.0;
        let phase = if d > 0 { C64::from_polar(1.0, d as f64 * alpha.arg()) } else { C64::new(1.0, 0.0) };
        phase * (log_mag.exp() * laguerre(n, d, x))
    };
    ComplexMatrix::from_fn(
        cutoff,
        cutoff,
        |m, n| if m >= n { element(m, n, alpha) } else { element(n, m, -alpha).conj() },
    )
}

/// `α = (−ν + iμ)/√2`, so that `e^{i(μQ+νP)} = D(α)`.
pub fn weyl_alpha(mu: f64, nu: f64) -> C64 {
    C64::new(-nu, mu) / SQRT_2
}

/// `e^{it Σ_j (μ_j Q_j + ν_j P_j)}` on the Kronecker-product space with per-mode
/// cutoff `N`, mode 0 the slowest index.
pub fn weyl_operator(d: &WHDirection, t: f64, cutoff: usize) -> Result<ComplexMatrix> {
    d.require_modes(MAX_MODES)?;
    let mut out = displacement_elements(weyl_alpha(t * d.mu()[0], t * d.nu()[0]), cutoff);
    for j in 1..d.modes() {
        out = out.kron(&displacement_elements(weyl_alpha(t * d.mu()[j], t * d.nu()[j]), cutoff));
    }
    Ok(out)
}

/// Per-mode cutoff `N` of a state on `N^modes` levels.
pub fn mode_cutoff(rho: &DensityMatrix, modes: usize) -> Result<usize> {
    let dim = rho.dim();
    let n = (dim as f64).powf(1.0 / modes as f64).round() as usize;
    if n.pow(modes as u32) != dim {
        return Err(Error::DimensionMismatch { expected: n.pow(modes as u32), found: dim });
    }
    if n < 2 {
        return Err(Error::BadCutoff(n));
    }
    Ok(n)
}

/// Largest over modes of `Σ_{k ≥ N−4} ⟨k|ρ_j|k⟩`, `ρ_j` the reduced state of mode `j`.
pub fn tail_mass(rho: &DensityMatrix, modes: usize) -> Result<f64> {
    let n = mode_cutoff(rho, modes)?;
    let start = n.saturating_sub(TAIL_LEVELS);
    let m = rho.matrix();
    let mut worst: f64 = 0.0;
    for j in 0..modes {
        let stride = n.pow((modes - 1 - j) as u32);
        let tail: f64 = (0..rho.dim()).filter(|&idx| (idx / stride) % n >= start).map(|idx| m[(idx, idx)].re).sum();
        worst = worst.max(tail);
    }
    Ok(worst)
}

/// Errors with `CutoffTooSmall` when the tail mass exceeds [`TAIL_MASS_TOL`].
pub fn check_tail(rho: &DensityMatrix, modes: usize) -> Result<f64> {
    let tail = tail_mass(rho, modes)?;
    if tail > TAIL_MASS_TOL {
        return Err(Error::CutoffTooSmall(format!(
            "tail mass {tail:.3e} on the top {TAIL_LEVELS} levels exceeds {TAIL_MASS_TOL:e}"
        )));
    }
    Ok(tail)
}

/// Pads a state with empty levels up to `cutoff` (single mode).
pub fn embed(rho: &DensityMatrix, cutoff: usize) -> Result<DensityMatrix> {
    let k = rho.dim();
    if cutoff < k {
        return Err(Error::DimensionMismatch { expected: k, found: cutoff });
    }
    let m = rho.matrix();
    let padded =
        ComplexMatrix::from_fn(cutoff, cutoff, |i, j| if i < k && j < k { m[(i, j)] } else { C64::new(0.0, 0.0) });
    crate::states::validate_density(&padded)
}

/// Fock state `|k⟩⟨k|` on `cutoff` levels.
pub fn number_state(k: usize, cutoff: usize) -> Result<DensityMatrix> {
    DensityMatrix::basis_state(cutoff, k)
}

/// `D(α)|0⟩` with `e^{i(μQ+νP)}` on `cutoff` levels.
pub fn displaced_vacuum(mu: f64, nu: f64, cutoff: usize) -> Result<DensityMatrix> {
    let d = displacement_elements(weyl_alpha(mu, nu), cutoff);
    DensityMatrix::pure(&d.column(0))
}
