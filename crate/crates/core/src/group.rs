//! Finite-group tomography: groups given by multiplication tables, unitary
//! representations, smeared characters, discrete tomograms and their DFT
//! inversion, Schur-orthogonality reconstruction, adapted states and the
//! regular representation.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::format::json_numbers;
use crate::numkernel::{basis_populations, diagonalize_unitary, pauli, ComplexMatrix, C64, I, ONE};
use crate::pairs::{reconstruct, schur_residual, DualTomographicSet, SamplingFunction};
use crate::rng::SplitMix64;
use crate::states::{validate_density, DensityMatrix};

pub const HOMOMORPHISM_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const IRREDUCIBILITY_TOL: f64 = 1e-8;
/// `|χ(g)|` below this for every `g ∉ H` makes a state adapted to `H`.
pub const ADAPTED_TOL: f64 = 1e-10;
/// Weights of a discrete tomogram may dip this far below zero before clamping.
pub const WEIGHT_TOL: f64 = 1e-10;

const FULL_ASSOCIATIVITY_ORDER: usize = 64;
const SAMPLED_TRIPLES: usize = 200_000;

/// Finite group given by its multiplication table, `mul[a * order + b] = a·b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and associativity (exhaustive up to
    /// order 64, on a fixed pseudo-random sample of triples above).
    pub fn from_table(order: usize, mul: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::BadParameter("group order must be positive".into()));
        }
        if mul.len() != order * order {
            return Err(Error::BadParameter(format!("table has {} entries, expected {}", mul.len(), order * order)));
        }
        if let Some(&bad) = mul.iter().find(|&&x| x >= order) {
            return Err(Error::BadParameter(format!("table entry {bad} out of range")));
        }
        let at = |a: usize, b: usize| mul[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| Error::BadParameter("table has no identity".into()))?;
        let mut inv = Vec::with_capacity(order);
        for g in 0..order {
            let h = (0..order)
                .find(|&h| at(h, g) == identity && at(g, h) == identity)
                .ok_or_else(|| Error::BadParameter(format!("element {g} has no inverse")))?;
            inv.push(h);
        }
        let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
        if order <= FULL_ASSOCIATIVITY_ORDER {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !assoc(a, b, c) {
                            return Err(Error::BadParameter(format!("not associative at ({a}, {b}, {c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = SplitMix64::new(0x5EED);
            for _ in 0..SAMPLED_TRIPLES {
                let [a, b, c] = [0; 3].map(|_| (rng.next_u64() % order as u64) as usize);
                if !assoc(a, b, c) {
                    return Err(Error::BadParameter(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
        Ok(Self { order, mul, inv, identity })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> &[usize] {
        &self.mul
    }

    /// Checks that `subset` is nonempty and closed under products and inverses.
    pub fn check_subgroup(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::NotSubgroup("empty subset".into()));
        }
        let mut member = vec![false; self.order];
        for &h in subset {
            if h >= self.order {
                return Err(Error::NotSubgroup(format!("element {h} outside the group")));
            }
            member[h] = true;
        }
        for &a in subset {
            if !member[self.inv(a)] {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in subset {
                if !member[self.mul(a, b)] {
                    return Err(Error::NotSubgroup(format!("product of {a} and {b} missing")));
                }
            }
        }
        Ok(())
    }
}

/// Unitary matrices `U(g)` indexed by the elements of a finite group.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<ComplexMatrix>,
}

impl UnitaryRep {
    pub fn new(group: FiniteGroup, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::DimensionMismatch { expected: group.order(), found: matrices.len() });
        }
        let dim = matrices[0].require_square()?;
        for m in &matrices {
            m.require_square()?;
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
            }
            let residual = m.unitary_residual();
            if residual > HOMOMORPHISM_TOL {
                return Err(Error::NotUnitary { residual });
            }
        }
        let id_residual = (&matrices[group.identity()] - &ComplexMatrix::identity(dim)).frobenius_norm();
        if id_residual > IDENTITY_TOL {
            return Err(Error::NotHomomorphism { residual: id_residual });
        }
        let rep = Self { group, dim, matrices };
        let residual = rep.homomorphism_residual();
        if residual > HOMOMORPHISM_TOL {
            return Err(Error::NotHomomorphism { residual });
        }
        Ok(rep)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &ComplexMatrix {
        &self.matrices[g]
    }

    /// `max_{g,h} ‖U(g)U(h) − U(gh)‖_F`.
    pub fn homomorphism_residual(&self) -> f64 {
        let n = self.group.order();
        (0..n)
            .into_par_iter()
            .map(|g| {
                (0..n)
                    .map(|h| {
                        (&self.matrices[g].matmul(&self.matrices[h]) - &self.matrices[self.group.mul(g, h)])
                            .frobenius_norm()
                    })
                    .fold(0.0, f64::max)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// The character `Tr U(g)`.
    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(|u| u.trace()).collect()
    }
}

/// Built-in groups with a distinguished representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinGroup {
    /// `Z_n` with the one-dimensional irrep `a ↦ e^{2πika/n}`.
    Cyclic { n: usize, k: usize },
    /// The order-16 group `{i^s σ_a}` in its defining two-dimensional irrep.
    PauliQubit,
    /// The order-`d³` clock-and-shift group `{ω^s Z^a X^b}`, `d` an odd prime.
    Heisenberg { d: usize },
    /// `D_n` of order `2n` in its two-dimensional irrep, `n ≥ 3`.
    Dihedral { n: usize },
}

pub fn builtin_group(kind: BuiltinGroup) -> Result<(FiniteGroup, UnitaryRep)> {
    let (group, matrices) = match kind {
        BuiltinGroup::Cyclic { n, k } => cyclic(n, k)?,
        BuiltinGroup::PauliQubit => pauli_qubit()?,
        BuiltinGroup::Heisenberg { d } => heisenberg(d)?,
        BuiltinGroup::Dihedral { n } => dihedral(n)?,
    };
    let rep = UnitaryRep::new(group.clone(), matrices)?;
    Ok((group, rep))
}

fn cyclic(n: usize, k: usize) -> Result<(FiniteGroup, Vec<ComplexMatrix>)> {
    if n == 0 {
        return Err(Error::BadParameter("cyclic group needs n >= 1".into()));
    }
    let mul = (0..n * n).map(|i| (i / n + i % n) % n).collect();
    let group = FiniteGroup::from_table(n, mul)?;
    let mats = (0..n)
        .map(|a| {
            let angle = 2.0 * PI * ((k * a) % n) as f64 / n as f64;
            ComplexMatrix::from_diagonal(&[C64::from_polar(1.0, angle)])
        })
        .collect();
    Ok((group, mats))
}

/// Element `4s + a` is `i^s σ_a` with `σ_0 = I`.
fn pauli_qubit() -> Result<(FiniteGroup, Vec<ComplexMatrix>)> {
    let [x, y, z] = pauli();
    let base = [ComplexMatrix::identity(2), x, y, z];
    let phases = [ONE, I, -ONE, -I];
    let mats: Vec<ComplexMatrix> = (0..16).map(|g| base[g % 4].scale(phases[g / 4])).collect();
    let mul = table_from_matrices(&mats)?;
    Ok((FiniteGroup::from_table(16, mul)?, mats))
}

/// Multiplication table of a finite matrix group closed under products.
fn table_from_matrices(mats: &[ComplexMatrix]) -> Result<Vec<usize>> {
    let n = mats.len();
    let mut mul = Vec::with_capacity(n * n);
    for a in mats {
        for b in mats {
            let p = a.matmul(b);
            let idx = mats
                .iter()
                .position(|m| (m - &p).max_abs() < 1e-9)
                .ok_or_else(|| Error::BadParameter("matrix set not closed under multiplication".into()))?;
            mul.push(idx);
        }
    }
    Ok(mul)
}

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

/// Element `s·d² + a·d + b` is `ω^s Z^a X^b`, with `Z|j⟩ = ω^j|j⟩`, `X|j⟩ = |j+1⟩`.
fn heisenberg(d: usize) -> Result<(FiniteGroup, Vec<ComplexMatrix>)> {
    if d.is_multiple_of(2) || !is_prime(d) {
        return Err(Error::BadParameter(format!("heisenberg(d) needs an odd prime d, got {d}")));
    }
    let order = d * d * d;
    let split = |g: usize| (g / (d * d), (g / d) % d, g % d);
    let index = |s: usize, a: usize, b: usize| (s % d) * d * d + (a % d) * d + (b % d);
    let mut mul = Vec::with_capacity(order * order);
    for g in 0..order {
        let (s, a, b) = split(g);
        for h in 0..order {
            let (s2, a2, b2) = split(h);
            // X^b Z^a2 = ω^{-a2 b} Z^a2 X^b
            let phase = (s + s2 + d * d - (a2 * b) % d) % d;
            mul.push(index(phase, a + a2, b + b2));
        }
    }
    let group = FiniteGroup::from_table(order, mul)?;
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64);
    let mats = (0..order)
        .map(|g| {
            let (s, a, b) = split(g);
            // (ω^s Z^a X^b)|j⟩ = ω^{s + a(j+b)} |j+b⟩
            let mut m = ComplexMatrix::zeros(d, d);
            for j in 0..d {
                let row = (j + b) % d;
                m[(row, j)] = omega(s + a * row);
            }
            m
        })
        .collect();
    Ok((group, mats))
}

/// Element `f·n + k` is `r^k s^f`.
fn dihedral(n: usize) -> Result<(FiniteGroup, Vec<ComplexMatrix>)> {
    if n < 3 {
        return Err(Error::BadParameter(format!("dihedral(n) needs n >= 3, got {n}")));
    }
    let order = 2 * n;
    let mut mul = Vec::with_capacity(order * order);
    for g in 0..order {
        let (f, k) = (g / n, g % n);
        for h in 0..order {
            let (f2, k2) = (h / n, h % n);
            // s r^k2 = r^{-k2} s
            let rot = if f == 0 { k + k2 } else { k + n - k2 };
            mul.push(((f + f2) % 2) * n + rot % n);
        }
    }
    let group = FiniteGroup::from_table(order, mul)?;
    let c = |x: f64| C64::new(x, 0.0);
    let mats = (0..order)
        .map(|g| {
            let (f, k) = (g / n, g % n);
            let a = 2.0 * PI * k as f64 / n as f64;
            let r = ComplexMatrix::from_rows(&[&[c(a.cos()), c(-a.sin())], &[c(a.sin()), c(a.cos())]]);
            let s = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
            if f == 0 {
                r
            } else {
                r.matmul(&s)
            }
        })
        .collect();
    Ok((group, mats))
}

/// Left regular representation `U(h)|g⟩ = |hg⟩` as permutation matrices.
pub fn regular_rep(group: &FiniteGroup) -> Result<UnitaryRep> {
    let n = group.order();
    let mats = (0..n)
        .map(|h| {
            let mut m = ComplexMatrix::zeros(n, n);
            for g in 0..n {
                m[(group.mul(h, g), g)] = ONE;
            }
            m
        })
        .collect();
    UnitaryRep::new(group.clone(), mats)
}

/// `χ_ρ(g) = Tr(ρ U(g))`, weighted by the counting measure `1/|G|`.
pub fn smeared_character(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<SamplingFunction> {
    if rho.dim() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: rho.dim() });
    }
    let w = 1.0 / rep.group().order() as f64;
    Ok(SamplingFunction {
        values: rep.matrices().iter().map(|u| rho.matrix().trace_product(u)).collect(),
        weights: vec![w; rep.group().order()],
    })
}

/// `max_{h,g} |χ_ρ(hgh⁻¹) − χ_{h*ρ}(g)|` with `h*ρ = U(h)† ρ U(h)`.
pub fn equivariance_residual(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<f64> {
    let chi = smeared_character(rho, rep)?;
    let g = rep.group();
    let mut worst: f64 = 0.0;
    for h in 0..g.order() {
        let moved = rho.conjugate_by(rep.matrix(h))?;
        let chi_moved = smeared_character(&moved, rep)?;
        for x in 0..g.order() {
            let conj = g.mul(g.mul(h, x), g.inv(h));
            worst = worst.max((chi.values[conj] - chi_moved.values[x]).norm());
        }
    }
    Ok(worst)
}

/// One point mass of a discrete tomogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "X")]
    pub location: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

/// What a discrete tomogram was measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TomogramContext {
    GroupElement(usize),
    Axis([f64; 3]),
}

/// Stochastic vector of atoms: weights in `[0, 1]` summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTomogram {
    pub atoms: Vec<Atom>,
    pub context: TomogramContext,
}

impl DiscreteTomogram {
    /// Clamps weights that dip below zero by at most [`WEIGHT_TOL`] and renormalizes.
    pub(crate) fn from_raw(locations: Vec<f64>, weights: Vec<f64>, context: TomogramContext) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|&&w| w < -WEIGHT_TOL) {
            return Err(Error::NotPsd { min_eigenvalue: w });
        }
        let clamped: Vec<f64> = weights.iter().map(|&w| w.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let atoms =
            locations.into_iter().zip(clamped).map(|(location, w)| Atom { location, weight: w / total }).collect();
        Ok(Self { atoms, context })
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// Atoms at the eigenphases `θ_m(g)` of `U(g) = V diag(e^{iθ}) V†` with weights `(V†ρV)_mm`.
pub fn discrete_tomogram(rho: &DensityMatrix, rep: &UnitaryRep, g: usize) -> Result<DiscreteTomogram> {
    if rho.dim() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), found: rho.dim() });
    }
    if g >= rep.group().order() {
        return Err(Error::OutOfRange(format!("element {g} outside group of order {}", rep.group().order())));
    }
    let diag = diagonalize_unitary(rep.matrix(g))?;
    let weights = basis_populations(&diag.basis, rho.matrix());
    DiscreteTomogram::from_raw(diag.phases, weights, TomogramContext::GroupElement(g))
}

/// Tomograms for every group element, in element order.
pub fn discrete_tomograms(rho: &DensityMatrix, rep: &UnitaryRep) -> Result<Vec<DiscreteTomogram>> {
    (0..rep.group().order()).into_par_iter().map(|g| discrete_tomogram(rho, rep, g)).collect()
}

/// `Σ_m e^{iθ_m} W(m)`.
pub fn character_from_tomogram(t: &DiscreteTomogram) -> C64 {
    t.atoms.iter().map(|a| C64::from_polar(a.weight, a.location)).sum()
}

/// `σ = (n/|G|) Σ_g χ(g) U(g)†` for an irreducible representation.
pub fn reconstruct_finite(chi: &SamplingFunction, rep: &UnitaryRep) -> Result<DensityMatrix> {
    if chi.len() != rep.group().order() {
        return Err(Error::DimensionMismatch { expected: rep.group().order(), found: chi.len() });
    }
    let residual = schur_residual(rep)?;
    if residual >= IRREDUCIBILITY_TOL {
        return Err(Error::NotIrreducible { residual });
    }
    let sigma = reconstruct(chi, &DualTomographicSet::schur_dual(rep))?;
    as_state(&sigma)
}

/// Reconstruction from the per-element tomograms, through their DFT.
pub fn reconstruct_from_tomograms(tomograms: &[DiscreteTomogram], rep: &UnitaryRep) -> Result<DensityMatrix> {
    let order = rep.group().order();
    if tomograms.len() != order {
        return Err(Error::DimensionMismatch { expected: order, found: tomograms.len() });
    }
    for (g, t) in tomograms.iter().enumerate() {
        if t.context != TomogramContext::GroupElement(g) {
            return Err(Error::BadParameter(format!("tomogram {g} is not attached to element {g}")));
        }
    }
    let chi = SamplingFunction {
        values: tomograms.iter().map(character_from_tomogram).collect(),
        weights: vec![1.0 / order as f64; order],
    };
    reconstruct_finite(&chi, rep)
}

fn as_state(sigma: &ComplexMatrix) -> Result<DensityMatrix> {
    let hermitian_residual = sigma.hermitian_residual();
    validate_density(&sigma.hermitian_part()).map_err(|e| Error::ReconstructionNotState {
        reason: format!("{e} (hermitian residual {hermitian_residual:e}, trace {})", sigma.trace()),
    })
}

/// Outcome of reconstructing from a subgroup's samples only.
#[derive(Debug, Clone)]
pub struct AdaptedReconstruction {
    pub is_adapted: bool,
    /// `max_{g ∉ H} |χ(g)|`.
    pub off_subgroup_max: f64,
    /// `(n/|G|) Σ_{h∈H} χ(h) U(h)†`.
    pub reconstruction: ComplexMatrix,
}

impl AdaptedReconstruction {
    pub fn state(&self) -> Result<DensityMatrix> {
        as_state(&self.reconstruction)
    }
}

pub fn adapted_check_and_reconstruct(
    rho: &DensityMatrix,
    rep: &UnitaryRep,
    subgroup: &[usize],
) -> Result<AdaptedReconstruction> {
    let group = rep.group();
    group.check_subgroup(subgroup)?;
    let chi = smeared_character(rho, rep)?;
    let mut member = vec![false; group.order()];
    for &h in subgroup {
        member[h] = true;
    }
    let off_subgroup_max = (0..group.order()).filter(|&g| !member[g]).map(|g| chi.values[g].norm()).fold(0.0, f64::max);
    let n = rep.dim();
    let mut sigma = ComplexMatrix::zeros(n, n);
    let scale = n as f64 / group.order() as f64;
    let mut hs: Vec<usize> = subgroup.to_vec();
    hs.sort_unstable();
    hs.dedup();
    for h in hs {
        sigma.add_scaled(chi.values[h] * scale, &rep.matrix(h).adjoint());
    }
    Ok(AdaptedReconstruction { is_adapted: off_subgroup_max < ADAPTED_TOL, off_subgroup_max, reconstruction: sigma })
}

#[derive(Serialize, Deserialize)]
struct MatrixJson<N> {
    re: Vec<N>,
    im: Vec<N>,
}

#[derive(Serialize, Deserialize)]
struct RepJson<N> {
    dim: usize,
    matrices: Vec<MatrixJson<N>>,
}

#[derive(Serialize, Deserialize)]
struct GroupJson<N> {
    order: usize,
    mul: Vec<usize>,
    reps: Vec<RepJson<N>>,
}

/// `{ "order", "mul": flattened table, "reps": [ {dim, matrices: [{re, im}]} ] }`.
pub fn group_to_json(group: &FiniteGroup, reps: &[UnitaryRep]) -> Result<String> {
    let reps = reps
        .iter()
        .map(|rep| {
            let matrices = rep
                .matrices()
                .iter()
                .map(|m| {
                    let re: Vec<f64> = m.as_slice().iter().map(|z| z.re).collect();
                    let im: Vec<f64> = m.as_slice().iter().map(|z| z.im).collect();
                    Ok(MatrixJson { re: json_numbers(&re)?, im: json_numbers(&im)? })
                })
                .collect::<Result<Vec<MatrixJson<Box<RawValue>>>>>()?;
            Ok(RepJson { dim: rep.dim(), matrices })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = GroupJson { order: group.order(), mul: group.table().to_vec(), reps };
    serde_json::to_string(&out).map_err(|e| Error::FileFormat(e.to_string()))
}

/// Parses the group JSON format, validating the table and every representation.
pub fn group_from_json(text: &str) -> Result<(FiniteGroup, Vec<UnitaryRep>)> {
    let parsed: GroupJson<f64> = serde_json::from_str(text).map_err(|e| Error::FileFormat(e.to_string()))?;
    let group = FiniteGroup::from_table(parsed.order, parsed.mul)?;
    let reps = parsed
        .reps
        .into_iter()
        .map(|r| {
            let mats = r
                .matrices
                .into_iter()
                .map(|m| {
                    if m.re.len() != r.dim * r.dim || m.im.len() != r.dim * r.dim {
                        return Err(Error::FileFormat(format!("matrix entries do not match dim {}", r.dim)));
                    }
                    let data = m.re.iter().zip(&m.im).map(|(&a, &b)| C64::new(a, b)).collect();
                    ComplexMatrix::from_row_major(r.dim, r.dim, data)
                })
                .collect::<Result<Vec<_>>>()?;
            UnitaryRep::new(group.clone(), mats)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((group, reps))
}

/// Reads `g,re,im` rows (header required) into a sampling function over a group of `order`.
pub fn character_from_csv(text: &str, order: usize) -> Result<SamplingFunction> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::FileFormat("empty character file".into()))?;
    if header.trim().replace(' ', "") != "g,re,im" {
        return Err(Error::FileFormat(format!("expected header g,re,im, found {header:?}")));
    }
    let mut values = vec![None; order];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::FileFormat(format!("bad row {line:?}")));
        }
        let g: usize =
            fields[0].trim().parse().map_err(|_| Error::FileFormat(format!("bad element index in {line:?}")))?;
        if g >= order {
            return Err(Error::FileFormat(format!("element {g} outside group of order {order}")));
        }
        let re = crate::format::parse_f64(fields[1], "character file")?;
        let im = crate::format::parse_f64(fields[2], "character file")?;
        values[g] = Some(C64::new(re, im));
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(g, v)| v.ok_or_else(|| Error::FileFormat(format!("missing value for element {g}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SamplingFunction { values, weights: vec![1.0 / order as f64; order] })
}

pub fn character_to_csv(chi: &SamplingFunction) -> String {
    use crate::format::sig17;
    let mut out = String::from("g,re,im\n");
    for (g, v) in chi.values.iter().enumerate() {
        out.push_str(&format!("{g},{},{}\n", sig17(v.re), sig17(v.im)));
    }
    out
}
