//! Weyl–Heisenberg tomography in a truncated Fock space: ladder and
//! quadrature operators, Weyl operators, characteristic functions, quadrature
//! tomograms, Wigner functions and state reconstruction by Weyl inversion.
//!
//! States of one or two modes live on Kronecker-product Fock bases with a
//! common per-mode cutoff `N`, mode 0 the slowest index. `ħ = 1`.
//!
//! Characteristic functions use the exact Fock matrix elements of the
//! displacement operator rather than the exponential of the truncated
//! generator; the latter is available as [`displacement`].

mod fock;
mod reconstruct;
mod tomogram;
mod wigner;

pub use fock::{
    check_tail, displaced_vacuum, displacement, displacement_elements, displacement_raw, embed, fock_operators,
    mode_cutoff, number_state, tail_mass, weyl_alpha, weyl_operator, FockSpace, WHDirection, MAX_MODES, TAIL_LEVELS,
    TAIL_MASS_TOL,
};
pub use reconstruct::{
    characteristic_samples, max_occupied_level, reconstruct_wh, reconstruct_wh_from_state, CharacteristicSamples,
    ReconstructionOptions, WhReconstruction, MIN_BOX, MIN_BOX_NODES, RAW_TRACE_TOL, RECONSTRUCTION_TAIL_TOL,
};
pub use tomogram::{
    analytic_oscillator_tomogram, grid_tomogram, grid_tomogram_with, hermite_polynomials, quadrature_operator,
    read_tomogram_csv, smeared_character_wh, t_range, GridTomogram, TomogramMethod, TomogramOptions, IMAGINARY_TOL,
    NEGATIVITY_TOL, NORMALIZATION_TOL, T_NODES,
};
pub use wigner::{
    hermite_functions, position_density, wigner, wigner_from_raw, wigner_radon_consistency, wigner_to_csv,
    wigner_to_raw, SquareGridMeta, WIGNER_NORMALIZATION_TOL,
};
