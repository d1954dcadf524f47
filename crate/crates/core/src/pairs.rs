//! Tomographic pairs on a finite index set: sampling and reconstruction maps,
//! kernels, positive-type Gram tests, and finite frames.
//!
//! Every index set carries explicit positive weights `μ(x)`. A dual element
//! `D(x)` acts on operators through the trace pairing `⟨D, a⟩ = Tr(D a)`, and
//! the reconstruction map is `F ↦ Σ_x μ(x) F(x) D(x)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::UnitaryRep;
use crate::numkernel::{hermitian_eigendecompose, pauli, ComplexMatrix, C64, ZERO};
use crate::states::DensityMatrix;

/// Unitary tolerance for elements entering the Gram test.
const UNITARY_TOL: f64 = 1e-10;
/// Below this lower frame bound the metric operator is not invertible in practice.
pub const FRAME_SPAN_TOL: f64 = 1e-12;
/// Gram positivity threshold, scaled by `max(1, ‖G‖_F)`.
pub const GRAM_POSITIVITY_TOL: f64 = 1e-10;

/// Indexed family `U(x)` with positive weights `μ(x)`.
#[derive(Debug, Clone)]
pub struct TomographicSet {
    elements: Vec<ComplexMatrix>,
    weights: Vec<f64>,
}

impl TomographicSet {
    pub fn new(elements: Vec<ComplexMatrix>, weights: Vec<f64>) -> Result<Self> {
        check_family(&elements, &weights)?;
        Ok(Self { elements, weights })
    }

    /// The elements of a group representation with counting measure `1/|G|`.
    pub fn from_rep(rep: &UnitaryRep) -> Self {
        let w = 1.0 / rep.matrices().len() as f64;
        Self { elements: rep.matrices().to_vec(), weights: vec![w; rep.matrices().len()] }
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

fn check_family(elements: &[ComplexMatrix], weights: &[f64]) -> Result<()> {
    let first = elements.first().ok_or_else(|| Error::BadParameter("empty index set".into()))?;
    let n = first.require_square()?;
    for m in elements {
        m.require_square()?;
        if m.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
        }
    }
    if weights.len() != elements.len() {
        return Err(Error::DimensionMismatch { expected: elements.len(), found: weights.len() });
    }
    if let Some(w) = weights.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::BadParameter(format!("weights must be positive, found {w}")));
    }
    Ok(())
}

/// Dual family `D(x)`, paired with operators by `Tr(D(x) a)`.
#[derive(Debug, Clone)]
pub struct DualTomographicSet {
    elements: Vec<ComplexMatrix>,
    weights: Vec<f64>,
}

impl DualTomographicSet {
    /// The dual shares the partner set's weights.
    pub fn new(elements: Vec<ComplexMatrix>, partner: &TomographicSet) -> Result<Self> {
        if elements.len() != partner.len() {
            return Err(Error::DimensionMismatch { expected: partner.len(), found: elements.len() });
        }
        check_family(&elements, partner.weights())?;
        if elements[0].dim() != partner.dim() {
            return Err(Error::DimensionMismatch { expected: partner.dim(), found: elements[0].dim() });
        }
        Ok(Self { elements, weights: partner.weights().to_vec() })
    }

    /// `D(g) = n U(g)†`, the Schur-orthogonality dual of an irreducible representation.
    pub fn schur_dual(rep: &UnitaryRep) -> Self {
        let n = rep.dim() as f64;
        let w = 1.0 / rep.matrices().len() as f64;
        Self {
            elements: rep.matrices().iter().map(|u| u.adjoint().scale_real(n)).collect(),
            weights: vec![w; rep.matrices().len()],
        }
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// The same dual with every element multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { elements: self.elements.iter().map(|d| d.scale_real(s)).collect(), weights: self.weights.clone() }
    }
}

/// The qubit Pauli set `{I, σ_x, σ_y, σ_z}` with unit weights and its dual `σ_a / 2`.
pub fn pauli_pair() -> (TomographicSet, DualTomographicSet) {
    let [x, y, z] = pauli();
    let elements = vec![ComplexMatrix::identity(2), x, y, z];
    let duals = elements.iter().map(|m| m.scale_real(0.5)).collect();
    let set = TomographicSet { elements, weights: vec![1.0; 4] };
    let dual = DualTomographicSet { elements: duals, weights: vec![1.0; 4] };
    (set, dual)
}

/// Sampled values `F(x)` with the weights of their index set.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingFunction {
    pub values: Vec<C64>,
    pub weights: Vec<f64>,
}

impl SamplingFunction {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `F(x) = Tr(ρ U(x))`.
pub fn sample(rho: &DensityMatrix, set: &TomographicSet) -> Result<SamplingFunction> {
    sample_operator(rho.matrix(), set)
}

/// Sampling map applied to an arbitrary operator.
pub fn sample_operator(a: &ComplexMatrix, set: &TomographicSet) -> Result<SamplingFunction> {
    if a.dim() != set.dim() || !a.is_square() {
        return Err(Error::DimensionMismatch { expected: set.dim(), found: a.rows() });
    }
    Ok(SamplingFunction {
        values: set.elements.iter().map(|u| a.trace_product(u)).collect(),
        weights: set.weights.clone(),
    })
}

fn check_indices(f: &SamplingFunction, dual: &DualTomographicSet) -> Result<()> {
    if f.len() != dual.len() {
        return Err(Error::DimensionMismatch { expected: dual.len(), found: f.len() });
    }
    Ok(())
}

/// `Σ_x μ(x) F(x) D(x)`.
pub fn reconstruct(f: &SamplingFunction, dual: &DualTomographicSet) -> Result<ComplexMatrix> {
    check_indices(f, dual)?;
    let n = dual.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for ((d, &v), &w) in dual.elements.iter().zip(&f.values).zip(&dual.weights) {
        out.add_scaled(v * w, d);
    }
    Ok(out)
}

/// `κ(y, x) = Tr(D(x) U(y))`, stored with `y` as row index.
pub fn kernel(set: &TomographicSet, dual: &DualTomographicSet) -> Result<ComplexMatrix> {
    if set.len() != dual.len() {
        return Err(Error::DimensionMismatch { expected: set.len(), found: dual.len() });
    }
    if set.dim() != dual.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), found: dual.dim() });
    }
    Ok(ComplexMatrix::from_fn(set.len(), set.len(), |y, x| dual.elements[x].trace_product(&set.elements[y])))
}

/// `max_y |Φ(y) − Σ_x μ(x) κ(y,x) Φ(x)|`.
pub fn reproducing_residual(kappa: &ComplexMatrix, phi: &SamplingFunction) -> Result<f64> {
    if kappa.rows() != phi.len() {
        return Err(Error::DimensionMismatch { expected: kappa.rows(), found: phi.len() });
    }
    Ok((0..phi.len())
        .map(|y| {
            let s: C64 = (0..phi.len()).map(|x| phi.weights[x] * kappa[(y, x)] * phi.values[x]).sum();
            (phi.values[y] - s).norm()
        })
        .fold(0.0, f64::max))
}

/// `‖κ − I‖` in max-abs norm: how far a pair is from biorthogonal on the index set.
pub fn biorthogonality_residual(kappa: &ComplexMatrix, weights: &[f64]) -> f64 {
    // With weights μ the reproducing identity is Σ_x μ(x) κ(y,x) δ(x,z) = δ(y,z),
    // so the comparison is between μ(x)κ(y,x) and the identity.
    let n = kappa.rows();
    let mut worst: f64 = 0.0;
    for y in 0..n {
        for x in 0..n {
            let target = if x == y { 1.0 } else { 0.0 };
            worst = worst.max((kappa[(y, x)] * weights[x] - target).norm());
        }
    }
    worst
}

/// `Σ_x μ(x) F(x) Tr(D(x))`; the real part is returned.
pub fn normalization_check(f: &SamplingFunction, dual: &DualTomographicSet) -> Result<f64> {
    check_indices(f, dual)?;
    Ok(dual.elements.iter().zip(&f.values).zip(&dual.weights).map(|((d, &v), &w)| v * w * d.trace()).sum::<C64>().re)
}

/// `G_ij = Tr(ρ U(x_i)† U(x_j))`.
pub fn gram_matrix(rho: &ComplexMatrix, set: &TomographicSet) -> Result<ComplexMatrix> {
    if rho.dim() != set.dim() || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: set.dim(), found: rho.rows() });
    }
    for (index, u) in set.elements.iter().enumerate() {
        let residual = u.unitary_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitaryElement { index, residual });
        }
    }
    // ρ U_i† is shared across a row.
    let rows: Vec<Vec<C64>> = set
        .elements
        .par_iter()
        .map(|ui| {
            let left = rho.matmul(&ui.adjoint());
            set.elements.iter().map(|uj| left.trace_product(uj)).collect()
        })
        .collect();
    let m = set.len();
    Ok(ComplexMatrix::from_fn(m, m, |i, j| rows[i][j]))
}

/// Smallest eigenvalue of [`gram_matrix`].
pub fn gram_min_eigenvalue(rho: &ComplexMatrix, set: &TomographicSet) -> Result<f64> {
    let g = gram_matrix(rho, set)?;
    let eig = hermitian_eigendecompose(&g.hermitian_part())?;
    Ok(eig.eigenvalues[0])
}

/// Positive-type decision for a Gram matrix with the given minimum eigenvalue.
pub fn is_positive_type(min_eigenvalue: f64, gram: &ComplexMatrix) -> bool {
    min_eigenvalue >= -GRAM_POSITIVITY_TOL * gram.frobenius_norm().max(1.0)
}

/// Weighted vector family `ψ_x` in `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub vectors: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
}

impl Frame {
    pub fn new(vectors: Vec<Vec<C64>>, weights: Vec<f64>) -> Result<Self> {
        let n = vectors.first().map(|v| v.len()).ok_or_else(|| Error::DegenerateFrame("empty frame".into()))?;
        if n == 0 {
            return Err(Error::DegenerateFrame("zero-dimensional vectors".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if weights.len() != vectors.len() {
            return Err(Error::DimensionMismatch { expected: vectors.len(), found: weights.len() });
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::BadParameter("frame weights must be positive".into()));
        }
        Ok(Self { vectors, weights })
    }

    /// Frame with unit weights.
    pub fn unweighted(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let w = vec![1.0; vectors.len()];
        Self::new(vectors, w)
    }

    /// The orbit `ψ_g = U(g) ψ_0` with counting measure.
    pub fn group_orbit(rep: &UnitaryRep, fiducial: &[C64]) -> Result<Self> {
        if fiducial.len() != rep.dim() {
            return Err(Error::DimensionMismatch { expected: rep.dim(), found: fiducial.len() });
        }
        Self::unweighted(rep.matrices().iter().map(|u| u.mul_vec(fiducial)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_tight(&self, rel_tol: f64) -> bool {
        self.upper - self.lower <= rel_tol * self.upper
    }
}

/// `S = Σ_x μ(x) |ψ_x⟩⟨ψ_x|`.
pub fn metric_operator(frame: &Frame) -> ComplexMatrix {
    let n = frame.dim();
    let mut s = ComplexMatrix::zeros(n, n);
    for (v, &w) in frame.vectors.iter().zip(&frame.weights) {
        s.add_scaled(C64::new(w, 0.0), &ComplexMatrix::outer(v, v));
    }
    s
}

/// Extreme eigenvalues of the metric operator.
pub fn frame_bounds(frame: &Frame) -> Result<FrameBounds> {
    let eig = hermitian_eigendecompose(&metric_operator(frame))?;
    let lower = eig.eigenvalues[0];
    let upper = *eig.eigenvalues.last().unwrap();
    if lower <= FRAME_SPAN_TOL {
        return Err(Error::DegenerateFrame(format!("lower frame bound {lower:e} does not span")));
    }
    Ok(FrameBounds { lower, upper })
}

/// Canonical dual `ψ^x = S⁻¹ ψ_x`, same weights.
pub fn dual_frame(frame: &Frame) -> Result<Frame> {
    frame_bounds(frame)?;
    let eig = hermitian_eigendecompose(&metric_operator(frame))?;
    let s_inv = eig.apply(|l| C64::new(1.0 / l, 0.0));
    Ok(Frame { vectors: frame.vectors.iter().map(|v| s_inv.mul_vec(v)).collect(), weights: frame.weights.clone() })
}

/// `‖Σ_x μ(x) |ψ^x⟩⟨ψ_x| − I‖_F`.
pub fn identity_resolution_residual(frame: &Frame, dual: &Frame) -> Result<f64> {
    if frame.len() != dual.len() || frame.dim() != dual.dim() {
        return Err(Error::DimensionMismatch { expected: frame.len(), found: dual.len() });
    }
    let n = frame.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for ((d, v), &w) in dual.vectors.iter().zip(&frame.vectors).zip(&frame.weights) {
        acc.add_scaled(C64::new(w, 0.0), &ComplexMatrix::outer(d, v));
    }
    Ok((&acc - &ComplexMatrix::identity(n)).frobenius_norm())
}

/// Max deviation of `(n/|G|) Σ_g conj(U_ij(g)) U_rs(g)` from `δ_ir δ_js`.
pub fn schur_residual(rep: &UnitaryRep) -> Result<f64> {
    let residual = rep.homomorphism_residual();
    if residual > crate::group::HOMOMORPHISM_TOL {
        return Err(Error::NotHomomorphism { residual });
    }
    let n = rep.dim();
    let scale = n as f64 / rep.matrices().len() as f64;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let sum: C64 = rep.matrices().iter().map(|u| u[(i, j)].conj() * u[(r, s)]).sum();
                    let target = if i == r && j == s { 1.0 } else { 0.0 };
                    worst = worst.max((sum * scale - target).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Self-consistency of the reproducing kernel `κ(g,g') = d ⟨ψ_g, ψ_g'⟩` of a tight
/// frame with `d = 1/A`: `max |κ(g,g') − Σ_g'' μ(g'') κ(g,g'') κ(g'',g')|`.
pub fn reproducing_kernel_residual(frame: &Frame) -> Result<f64> {
    let d = tight_degree(frame)?;
    let kappa = frame_kernel(frame, d);
    let m = frame.len();
    let mut worst: f64 = 0.0;
    for g in 0..m {
        for gp in 0..m {
            let s: C64 = (0..m).map(|k| frame.weights[k] * kappa[(g, k)] * kappa[(k, gp)]).sum();
            worst = worst.max((kappa[(g, gp)] - s).norm());
        }
    }
    Ok(worst)
}

/// `|Tr(A) − Σ_g μ(g) d ⟨ψ_g, A ψ_g⟩|` for a tight frame.
pub fn frame_trace_residual(frame: &Frame, a: &ComplexMatrix) -> Result<f64> {
    if a.dim() != frame.dim() || !a.is_square() {
        return Err(Error::DimensionMismatch { expected: frame.dim(), found: a.rows() });
    }
    let d = tight_degree(frame)?;
    let s: C64 = frame.vectors.iter().zip(&frame.weights).map(|(v, &w)| w * d * inner(v, &a.mul_vec(v))).sum();
    Ok((a.trace() - s).norm())
}

/// `1/A` of a tight frame; fails when the frame is not tight.
fn tight_degree(frame: &Frame) -> Result<f64> {
    let bounds = frame_bounds(frame)?;
    if !bounds.is_tight(1e-10) {
        return Err(Error::DegenerateFrame(format!("frame is not tight (A = {}, B = {})", bounds.lower, bounds.upper)));
    }
    Ok(1.0 / bounds.lower)
}

fn frame_kernel(frame: &Frame, d: f64) -> ComplexMatrix {
    let m = frame.len();
    ComplexMatrix::from_fn(m, m, |g, gp| inner(&frame.vectors[g], &frame.vectors[gp]) * d)
}

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

/// `max |(1/|G|) Σ_g U(g) A U(g)† − (Tr A / n) I|` entrywise.
pub fn averaging_residual(rep: &UnitaryRep, a: &ComplexMatrix) -> Result<f64> {
    let n = rep.dim();
    if a.dim() != n || !a.is_square() {
        return Err(Error::DimensionMismatch { expected: n, found: a.rows() });
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    for u in rep.matrices() {
        acc.add_scaled(C64::new(1.0, 0.0), &u.matmul(a).matmul(&u.adjoint()));
    }
    let avg = acc.scale_real(1.0 / rep.matrices().len() as f64);
    let target = ComplexMatrix::identity(n).scale(a.trace() / n as f64);
    Ok((&avg - &target).max_abs())
}
