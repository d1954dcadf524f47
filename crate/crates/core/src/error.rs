use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants fall into two families: validation failures (bad input, broken
/// structural invariants) and numerical-tolerance failures (a computation ran
/// but its result missed a stated accuracy bound). See [`Error::is_numerical`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("element {index} of the tomographic set is not unitary (residual {residual:e})")]
    NotUnitaryElement { index: usize, residual: f64 },
    #[error("matrix is not special unitary (unitarity {unitarity:e}, |det - 1| = {det:e})")]
    NotSpecialUnitary { unitarity: f64, det: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    ConvergenceFailure { sweeps: usize, off: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("representation is not a homomorphism (residual {residual:e})")]
    NotHomomorphism { residual: f64 },
    #[error("representation is not irreducible (Schur residual {residual:e})")]
    NotIrreducible { residual: f64 },
    #[error("reconstruction is not a state: {reason}")]
    ReconstructionNotState { reason: String },
    #[error("element subset is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("spin axis is the zero vector")]
    ZeroAxis,
    #[error("quadrature too coarse: {0}")]
    QuadratureTooCoarse(String),
    #[error("Fock cutoff must be at least 2, got {0}")]
    BadCutoff(usize),
    #[error("bad Weyl-Heisenberg direction: {0}")]
    BadDirection(String),
    #[error("grid too narrow: integral is {integral}, expected 1")]
    GridTooNarrow { integral: f64 },
    #[error("tomogram negative beyond tolerance (min value {min_value:e})")]
    NegativityBeyondTolerance { min_value: f64 },
    #[error("tomogram has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },
    #[error("Fock cutoff too small: {0}")]
    CutoffTooSmall(String),
    #[error("empty grid")]
    EmptyGrid,
    #[error("too few projection angles: {0}")]
    TooFewAngles(usize),
    #[error("file format error: {0}")]
    FileFormat(String),
}

impl Error {
    /// True for failures of a numerical tolerance rather than of input validity.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure { .. }
                | Error::QuadratureTooCoarse(_)
                | Error::GridTooNarrow { .. }
                | Error::NegativityBeyondTolerance { .. }
                | Error::ImaginaryResidue { .. }
                | Error::CutoffTooSmall(_)
                | Error::ReconstructionNotState { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
