//! Invariant suites behind `qtomo verify`: each check reports a measured
//! residual next to the bound it must respect.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::group::{builtin_group, equivariance_residual, reconstruct_finite, smeared_character, BuiltinGroup};
use crate::numkernel::{
    basis_populations, diagonalize_unitary, hermitian_eigendecompose, psd_min_eigenvalue, unitary_exp, ComplexMatrix,
    C64,
};
use crate::pairs::{
    averaging_residual, frame_bounds, gram_min_eigenvalue, pauli_pair, reconstruct, sample, DualTomographicSet, Frame,
    TomographicSet,
};
use crate::radon::{covering_detector_grid, radon, radon_direction, uniform_angles, ImageGrid};
use crate::rng::SplitMix64;
use crate::spin::{pure_state_weights, spin_tomogram, su2_reconstruct, SpinAxis};
use crate::states::{bloch_density, random_density, trace_distance, BlochPoint};
use crate::weyl::{characteristic_samples, embed, grid_tomogram, number_state, position_density, WHDirection};

/// Suite names accepted by [`run_module`], in run order.
pub const MODULES: [&str; 7] =
    ["numkernel", "states", "pairs", "group_tomography", "spin_tomography", "weyl_heisenberg", "radon_classical"];

/// Which side of the tolerance a residual must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
    Below,
}

impl Bound {
    fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Bound::AtMost => value <= tol,
            Bound::AtLeast => value >= tol,
            Bound::Below => value < tol,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
            Bound::Below => "<",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub module: &'static str,
    pub check: &'static str,
    pub residual: f64,
    pub bound: Bound,
    pub tolerance: f64,
    pub pass: bool,
}

struct Suite {
    module: &'static str,
    rows: Vec<CheckRow>,
}

impl Suite {
    fn new(module: &'static str) -> Self {
        Self { module, rows: Vec::new() }
    }

    fn push(&mut self, check: &'static str, residual: f64, bound: Bound, tolerance: f64) {
        // NaN fails every bound.
        let pass = bound.holds(residual, tolerance);
        self.rows.push(CheckRow { module: self.module, check, residual, bound, tolerance, pass });
    }

    fn at_most(&mut self, check: &'static str, residual: f64, tolerance: f64) {
        self.push(check, residual, Bound::AtMost, tolerance);
    }
}

/// Runs one suite; `seed` shifts every seeded fixture.
pub fn run_module(name: &str, seed: u64) -> Result<Vec<CheckRow>> {
    match name {
        "numkernel" => numkernel(seed),
        "states" => states(seed),
        "pairs" => pairs(seed),
        "group_tomography" => group_tomography(seed),
        "spin_tomography" => spin_tomography(seed),
        "weyl_heisenberg" => weyl_heisenberg(),
        "radon_classical" => radon_classical(),
        _ => Err(Error::BadParameter(format!("unknown module {name:?}; expected one of {}", MODULES.join(", ")))),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for m in MODULES {
        rows.extend(run_module(m, seed)?);
    }
    Ok(rows)
}

/// Fixed-width table, one line per check.
pub fn format_table(rows: &[CheckRow]) -> String {
    let mw = rows.iter().map(|r| r.module.len()).max().unwrap_or(6).max(6);
    let cw = rows.iter().map(|r| r.check.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<mw$}  {:<cw$}  {:>11}  {:<13}  result\n", "module", "check", "residual", "bound");
    for r in rows {
        let bound = format!("{} {:.0e}", r.bound.symbol(), r.tolerance);
        let _ = writeln!(
            out,
            "{:<mw$}  {:<cw$}  {:>11.3e}  {:<13}  {}",
            r.module,
            r.check,
            r.residual,
            bound,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

fn random_hermitian(rng: &mut SplitMix64, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian()).hermitian_part()
}

fn unit_vector(rng: &mut SplitMix64, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| rng.complex_gaussian()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

fn numkernel(seed: u64) -> Result<Vec<CheckRow>> {
    let mut s = Suite::new("numkernel");
    let mut rng = SplitMix64::new(seed ^ 0x6e75);
    let (mut recon, mut shift, mut law, mut phases): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for n in 2..=6 {
        for _ in 0..4 {
            let h = random_hermitian(&mut rng, n);
            let eig = hermitian_eigendecompose(&h)?;
            recon = recon.max((&eig.reconstruct() - &h).frobenius_norm() / h.frobenius_norm());

            let mut shifted = h.clone();
            shifted.add_scaled(C64::new(0.5, 0.0), &ComplexMatrix::identity(n));
            let eig_s = hermitian_eigendecompose(&shifted)?;
            for (a, b) in eig.eigenvalues.iter().zip(&eig_s.eigenvalues) {
                shift = shift.max((b - a - 0.5).abs());
            }

            let (a, b) = (rng.uniform_in(-2.0, 2.0), rng.uniform_in(-2.0, 2.0));
            let lhs = unitary_exp(&h, a)?.matmul(&unitary_exp(&h, b)?);
            law = law.max((&lhs - &unitary_exp(&h, a + b)?).max_abs());

            // Scale so every eigenvalue sits strictly inside (−π, π).
            let top = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
            let small = h.scale_real(3.0 / top);
            let diag = diagonalize_unitary(&unitary_exp(&small, 1.0)?)?;
            let expected = hermitian_eigendecompose(&small)?.eigenvalues;
            for (p, l) in diag.phases.iter().zip(&expected) {
                phases = phases.max((p - l).abs());
            }
        }
    }
    s.at_most("eigen reconstruction (relative Frobenius)", recon, 1e-10);
    s.at_most("spectral shift by 0.5", shift, 1e-10);
    s.at_most("one-parameter group law", law, 1e-10);
    s.at_most("unitary phases = Hermitian eigenvalues", phases, 1e-10);
    Ok(s.rows)
}

fn states(seed: u64) -> Result<Vec<CheckRow>> {
    let mut s = Suite::new("states");
    let mut bloch: f64 = 0.0;
    for k in 0..1000 {
        let rho = random_density(2, seed.wrapping_add(k))?;
        let back = bloch_density(&BlochPoint::from_vector(rho.bloch_vector()?)?)?;
        bloch = bloch.max((back.matrix() - rho.matrix()).max_abs());
    }
    let (mut symmetry, mut triangle): (f64, f64) = (0.0, 0.0);
    for k in 0..100 {
        let base = seed.wrapping_add(10_000 + 3 * k);
        let a = random_density(3, base)?;
        let b = random_density(3, base + 1)?;
        let c = random_density(3, base + 2)?;
        let ab = trace_distance(&a, &b)?;
        symmetry = symmetry.max((ab - trace_distance(&b, &a)?).abs());
        triangle = triangle.max(ab - trace_distance(&a, &c)? - trace_distance(&c, &b)?);
    }
    s.at_most("Bloch inversion round trip", bloch, 1e-10);
    s.at_most("trace distance symmetry", symmetry, 0.0);
    s.at_most("triangle inequality excess", triangle, 1e-12);
    Ok(s.rows)
}

fn pairs(seed: u64) -> Result<Vec<CheckRow>> {
    let mut s = Suite::new("pairs");
    let (_, rep) = builtin_group(BuiltinGroup::PauliQubit)?;
    let group_set = TomographicSet::from_rep(&rep);
    let group_dual = DualTomographicSet::schur_dual(&rep);
    let (pauli_set, pauli_dual) = pauli_pair();

    let (mut left, mut gram) = (0.0f64, f64::INFINITY);
    for k in 0..100 {
        let rho = random_density(2, seed.wrapping_add(k))?;
        for (set, dual) in [(&pauli_set, &pauli_dual), (&group_set, &group_dual)] {
            let back = reconstruct(&sample(&rho, set)?, dual)?;
            left = left.max((&back - rho.matrix()).max_abs());
        }
        gram = gram.min(gram_min_eigenvalue(rho.matrix(), &group_set)?);
    }
    let bad = gram_min_eigenvalue(&ComplexMatrix::from_real_diagonal(&[1.5, -0.5]), &group_set)?;
    s.at_most("left-inverse law", left, 1e-10);
    s.push("Gram min eigenvalue over states", gram, Bound::AtLeast, -1e-10);
    s.push("Gram min eigenvalue of diag(1.5, -0.5)", bad, Bound::Below, -1e-3);

    let mut rng = SplitMix64::new(seed ^ 0x7061);
    let (mut tight, mut avg): (f64, f64) = (0.0, 0.0);
    for kind in [BuiltinGroup::PauliQubit, BuiltinGroup::Heisenberg { d: 3 }, BuiltinGroup::Dihedral { n: 5 }] {
        let (g, rep) = builtin_group(kind)?;
        let n = rep.dim();
        let bounds = frame_bounds(&Frame::group_orbit(&rep, &unit_vector(&mut rng, n))?)?;
        let a = g.order() as f64 / n as f64;
        tight = tight.max((bounds.lower - a).abs()).max((bounds.upper - a).abs());
        avg = avg.max(averaging_residual(&rep, &ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian()))?);
    }
    s.at_most("tight group frame constant |G|/n", tight, 1e-10);
    s.at_most("averaging formula", avg, 1e-10);
    Ok(s.rows)
}

const IRREPS: [BuiltinGroup; 5] = [
    BuiltinGroup::Cyclic { n: 5, k: 2 },
    BuiltinGroup::PauliQubit,
    BuiltinGroup::Heisenberg { d: 3 },
    BuiltinGroup::Heisenberg { d: 5 },
    BuiltinGroup::Dihedral { n: 4 },
];

fn group_tomography(seed: u64) -> Result<Vec<CheckRow>> {
    let mut s = Suite::new("group_tomography");
    let (mut round, mut sum_dev, mut min_w, mut max_w, mut gram) =
        (0.0f64, 0.0f64, f64::INFINITY, 0.0f64, f64::INFINITY);
    let mut rng = SplitMix64::new(seed ^ 0x6772);
    for kind in IRREPS {
        let (g, rep) = builtin_group(kind)?;
        let diags = rep.matrices().iter().map(diagonalize_unitary).collect::<Result<Vec<_>>>()?;
        for k in 0..50 {
            let rho = random_density(rep.dim(), seed.wrapping_add(k))?;
            let chi = smeared_character(&rho, &rep)?;
            round = round.max(trace_distance(&rho, &reconstruct_finite(&chi, &rep)?)?);
            if k < 10 {
                // Raw populations, before any clamping.
                for d in &diags {
                    let w = basis_populations(&d.basis, rho.matrix());
                    sum_dev = sum_dev.max((w.iter().sum::<f64>() - 1.0).abs());
                    min_w = w.iter().fold(min_w, |m, &x| m.min(x));
                    max_w = w.iter().fold(max_w, |m, &x| m.max(x));
                }
            }
            if g.order() >= 8 && k < 10 {
                let mut pool: Vec<usize> = (0..g.order()).collect();
                for i in 0..8 {
                    let j = i + (rng.next_u64() % (pool.len() - i) as u64) as usize;
                    pool.swap(i, j);
                }
                let pick = &pool[..8];
                let m = ComplexMatrix::from_fn(8, 8, |i, j| chi.values[g.mul(g.inv(pick[i]), pick[j])]);
                gram = gram.min(psd_min_eigenvalue(&m.hermitian_part())?);
            }
        }
    }
    s.at_most("reconstruction round trip (trace distance)", round, 1e-10);
    s.at_most("tomogram weight-sum deviation", sum_dev, 1e-10);
    s.push("tomogram min weight", min_w, Bound::AtLeast, -1e-10);
    s.push("tomogram max weight", max_w, Bound::AtMost, 1.0 + 1e-10);
    s.push("Gram min eigenvalue on 8-element subsets", gram, Bound::AtLeast, -1e-10);

    let (_, pauli) = builtin_group(BuiltinGroup::PauliQubit)?;
    let mut equi: f64 = 0.0;
    for k in 0..10 {
        equi = equi.max(equivariance_residual(&random_density(2, seed.wrapping_add(k))?, &pauli)?);
    }
    s.at_most("equivariance over Pauli group", equi, 1e-12);
    Ok(s.rows)
}

fn random_axis(rng: &mut SplitMix64) -> Result<SpinAxis> {
    SpinAxis::new([rng.gaussian(), rng.gaussian(), rng.gaussian()])?.scaled(rng.uniform_in(0.1, 3.0))
}

fn spin_tomography(seed: u64) -> Result<Vec<CheckRow>> {
    let mut s = Suite::new("spin_tomography");
    let mut rng = SplitMix64::new(seed ^ 0x7370);
    let (mut norm, mut range, mut homog): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..10_000 {
        let rho = random_density(2, seed.wrapping_add(k))?;
        let axis = random_axis(&mut rng)?;
        let t = spin_tomogram(&rho, &axis)?;
        norm = norm.max((t.total_weight() - 1.0).abs());
        for a in &t.atoms {
            range = range.max(-a.weight).max(a.weight - 1.0);
        }
        if k < 1000 {
            let c = rng.uniform_in(0.2, 5.0);
            let scaled = spin_tomogram(&rho, &axis.scaled(c)?)?;
            for (a, b) in scaled.atoms.iter().zip(&t.atoms) {
                homog = homog.max((a.location - c * b.location).abs()).max((a.weight - b.weight).abs());
            }
        }
    }
    s.at_most("weight-sum deviation", norm, 1e-12);
    s.at_most("weight excursion outside [0, 1]", range, 0.0);
    s.at_most("homogeneity under axis scaling", homog, 1e-12);

    let mut recon: f64 = 0.0;
    for k in 0..20 {
        let rho = random_density(2, seed.wrapping_add(k))?;
        let back = su2_reconstruct(|u| rho.matrix().trace_product(u), (32, 32, 64))?;
        recon = recon.max(trace_distance(&rho, &back)?);
    }
    s.at_most("SU(2) reconstruction round trip", recon, 1e-8);

    let mut closed: f64 = 0.0;
    for _ in 0..1000 {
        let (theta, phi) = (rng.uniform_in(0.0, PI), rng.uniform_in(0.0, 2.0 * PI));
        let axis = random_axis(&mut rng)?;
        let t = spin_tomogram(&bloch_density(&BlochPoint::new(1.0, theta, phi)?)?, &axis)?;
        let (wm, wp) = pure_state_weights(theta, phi, &axis);
        closed = closed.max((t.atoms[0].weight - wm).abs()).max((t.atoms[1].weight - wp).abs());
    }
    s.at_most("pure-state closed form", closed, 1e-12);
    Ok(s.rows)
}

fn weyl_heisenberg() -> Result<Vec<CheckRow>> {
    let mut s = Suite::new("weyl_heisenberg");
    let g = UniformGrid::span(-8.0, 8.0, 161)?;
    let d = WHDirection::single(0.8, -0.6)?;
    let (mut homog, mut imag, mut neg): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in [0, 1] {
        let rho = number_state(k, 32)?;
        let base = grid_tomogram(&rho, &d, &g)?;
        imag = imag.max(base.imaginary_residue());
        neg = base.values().iter().fold(neg, |m, &v| m.max(-v));
        for c in [0.5, 2.0] {
            let scaled_grid = UniformGrid::new(c * g.x0, c * g.dx, g.n)?;
            let scaled = grid_tomogram(&rho, &d.scaled(c)?, &scaled_grid)?;
            for (a, b) in scaled.values().iter().zip(base.values()) {
                homog = homog.max((c * a - b).abs());
            }
        }
    }
    s.at_most("homogeneity c in {0.5, 2}", homog, 1e-5);
    s.push("imaginary residue", imag, Bound::Below, 1e-10);
    s.at_most("negativity", neg, 1e-8);

    let vac = number_state(0, 16)?;
    let chi = characteristic_samples(&vac, 6.0, 64)?;
    s.at_most("square-integrability: |h^2 sum|chi|^2 / 2pi - 1|", (chi.squared_norm() / (2.0 * PI) - 1.0).abs(), 0.05);

    let mut marginal: f64 = 0.0;
    let x = UniformGrid::span(-6.0, 6.0, 121)?;
    let q = WHDirection::single(1.0, 0.0)?;
    for rho in [number_state(1, 32)?, embed(&random_density(4, 7)?, 32)?] {
        let t = grid_tomogram(&rho, &q, &x)?;
        for (xv, v) in x.nodes().iter().zip(t.values()) {
            marginal = marginal.max((v - position_density(&rho, *xv)).abs());
        }
    }
    s.at_most("position marginal vs Hermite density", marginal, 1e-5);
    Ok(s.rows)
}

fn radon_classical() -> Result<Vec<CheckRow>> {
    let mut s = Suite::new("radon_classical");
    let g = UniformGrid::span(-6.0, 6.0, 256)?;
    let (cq, cp) = (0.7, -0.4);
    let img = ImageGrid::from_fn(g, g, |q, p| (-((q - cq) * (q - cq) + (p - cp) * (p - cp)) / 2.0).exp() / (2.0 * PI))?;
    let x = covering_detector_grid(&img, 513)?;
    let thetas = uniform_angles(16);
    let sino = radon(&img, &thetas, &x)?;
    let mass = img.integral();

    let mut fubini: f64 = 0.0;
    for k in 0..thetas.len() {
        fubini = fubini.max((x.trapezoid(sino.row(k)) - mass).abs() / mass);
    }
    s.at_most("mass preservation (relative)", fubini, 1e-4);

    // Fourier slice: the 1D transform of a projection is the 2D transform
    // of the image along the same ray.
    let mut slice: f64 = 0.0;
    let (qs, xs) = (g.nodes(), x.nodes());
    for (k, &theta) in thetas.iter().enumerate() {
        let (sn, cs) = theta.sin_cos();
        for freq in [0.25, 0.5, 1.0, 1.5] {
            let row = sino.row(k);
            let one_d: C64 = xs.iter().zip(row).map(|(xv, r)| C64::from_polar(*r, -freq * xv)).sum::<C64>() * x.dx;
            let mut two_d = C64::new(0.0, 0.0);
            for (i, q) in qs.iter().enumerate() {
                for (j, p) in qs.iter().enumerate() {
                    two_d += C64::from_polar(img.value(i, j), -freq * (q * cs + p * sn));
                }
            }
            two_d *= g.dx * g.dx;
            slice = slice.max((one_d - two_d).norm() / two_d.norm());
        }
    }
    s.at_most("Fourier slice (relative)", slice, 1e-3);

    let (mu, nu) = (0.6, 0.8);
    let base = radon_direction(&img, mu, nu, &x)?;
    let wide = UniformGrid::new(2.0 * x.x0, 2.0 * x.dx, x.n)?;
    let scaled = radon_direction(&img, 2.0 * mu, 2.0 * nu, &wide)?;
    let homog = scaled.iter().zip(&base).map(|(a, b)| (2.0 * a - b).abs()).fold(0.0, f64::max);
    s.at_most("homogeneity s = 2", homog, 1e-12);
    Ok(s.rows)
}
