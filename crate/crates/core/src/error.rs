use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("omega is not symmetric: max |Ω_ij - Ω_ji| = {residual:e} exceeds {bound:e}")]
    NonSymmetric { residual: f64, bound: f64 },

    #[error("Im(omega) is not positive definite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("singular coordinate system (determinant {det:e})")]
    SingularSystem { det: f64 },

    #[error("shape mismatch: expected {expected} coefficients, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("window has zero norm")]
    ZeroWindow,

    #[error("window has no decay bound; supply an envelope C·exp(-α|t|²)")]
    NoDecay,

    #[error("tolerance {tol:e} unreachable within truncation radius cap {cap}")]
    ToleranceUnreachable { tol: f64, cap: usize },

    #[error("winding number {found} on the fundamental contour (expected {expected}) after {attempts} attempts")]
    WindingNotOne { found: f64, expected: i64, attempts: usize },

    #[error("quadrature under-resolved: relative change {change:e} after grid doubling exceeds {tol:e}")]
    QuadratureUnderResolved { change: f64, tol: f64 },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("sample index out of range: {0}")]
    SampleOutOfRange(String),

    #[error("predicate not applicable: {0}")]
    NotApplicable(String),

    #[error("sum of translates is not in the dual lattice (coefficient residual {residual:e})")]
    TranslateSumNotInDualLattice { residual: f64 },

    #[error("{count} subsets exceed the exhaustive limit {limit}")]
    TooManySubsets { count: u128, limit: u128 },

    #[error("matrix is not Hermitian within tolerance: asymmetry {asymmetry:e} > {tol:e}")]
    NonHermitianBeyondTolerance { asymmetry: f64, tol: f64 },

    #[error("eigensolver failed: {0}")]
    EigSolverFailure(String),

    #[error("parse error at byte {offset}: expected one of {expected:?}")]
    Parse { offset: usize, expected: Vec<String> },

    #[error("unknown variable `{name}`; valid names are {valid:?}")]
    UnknownVariable { name: String, valid: Vec<String> },

    #[error("symbol is unbounded or not finite on its domain: {0}")]
    UnboundedSymbol(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
