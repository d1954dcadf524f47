//! Dense complex linear algebra: the matrix type, Hermitian and unitary
//! eigendecompositions, matrix exponentials and PSD checks.

mod eigen;
mod matrix;
mod quadrature;

pub use eigen::{
    basis_populations, diagonalize_unitary, diagonalize_unitary_with, hermitian_eigendecompose,
    hermitian_eigendecompose_with, principal_phase, psd_min_eigenvalue, unitary_exp, EigenOptions, Eigensystem,
    UnitaryDiagonalization,
};
pub use matrix::{pauli, ComplexMatrix, C64, I, ONE, ZERO};
pub use quadrature::gauss_legendre;
