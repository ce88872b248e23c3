use thiserror::Error;

/// Every failure mode of the numerical core.
///
/// Each variant maps to a stable machine-readable code through [`Error::code`],
/// which the command-line frontend prints in its error reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not a quasi-permutation matrix (row/column {index} has {count} non-vanishing entries)")]
    NotQuasiPermutation { index: usize, count: usize },
    #[error("matrix must be square with dimension {expected}, got {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },
    #[error("product of the monodromy permutations is not the identity")]
    RelationViolated,
    #[error("diagonal conjugator has a vanishing entry at position {0}")]
    SingularD(usize),
    #[error("Riemann-Hurwitz count gives a non-integer genus")]
    GenusNotInteger,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("path passes within {distance:e} of branch point {index}")]
    PathTooCloseToBranchPoint { index: usize, distance: f64 },
    #[error("quadrature did not reach the target tolerance (last change {change:e})")]
    QuadratureFailure { change: f64 },
    #[error("degenerate curve: {0}")]
    DegenerateCurve(&'static str),
    #[error("period matrix is not a Riemann matrix (asymmetry {asymmetry:e}, min eigenvalue of Im part {min_eig:e})")]
    NotRiemannMatrix { asymmetry: f64, min_eig: f64 },
    #[error("theta truncation radius {radius} exceeds the cap")]
    TruncationOverflow { radius: usize },
    #[error("finite-difference step too large: {0}")]
    StepTooLarge(&'static str),
    #[error("no odd non-singular half-integer characteristic found")]
    NoneFound,
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,
    #[error("spinor h(P) vanishes at the evaluation point")]
    ThetaVanishes,
    #[error("characteristic lies on the theta divisor (|theta(0)| = {0:e})")]
    CharOnThetaDivisor(f64),
    #[error("divisor T is degenerate (|theta[T](0)| = {0:e})")]
    DegenerateDivisorT(f64),
    #[error("evaluation point coincides with singular point {0}")]
    SingularPoint(usize),
    #[error("could not build the generator loop around point {0}")]
    LoopConstructionFailed(usize),
    #[error("intersection data inconsistent with the contour layout: {0}")]
    InconsistentLayout(&'static str),
    #[error("vector of Riemann constants could not be identified ({candidates} candidates)")]
    RiemannConstantUndetermined { candidates: usize },
}

impl Error {
    /// Stable identifier for reports and exit diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotQuasiPermutation { .. } => "NotQuasiPermutation",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::RelationViolated => "RelationViolated",
            Error::SingularD(_) => "SingularD",
            Error::GenusNotInteger => "GenusNotInteger",
            Error::InvalidInput(_) => "InvalidInput",
            Error::PathTooCloseToBranchPoint { .. } => "PathTooCloseToBranchPoint",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::DegenerateCurve(_) => "DegenerateCurve",
            Error::NotRiemannMatrix { .. } => "NotRiemannMatrix",
            Error::TruncationOverflow { .. } => "TruncationOverflow",
            Error::StepTooLarge(_) => "StepTooLarge",
            Error::NoneFound => "NoneFound",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::CoincidentPoints => "CoincidentPoints",
            Error::ThetaVanishes => "ThetaVanishes",
            Error::CharOnThetaDivisor(_) => "CharOnThetaDivisor",
            Error::DegenerateDivisorT(_) => "DegenerateDivisorT",
            Error::SingularPoint(_) => "SingularPoint",
            Error::LoopConstructionFailed(_) => "LoopConstructionFailed",
            Error::InconsistentLayout(_) => "InconsistentLayout",
            Error::RiemannConstantUndetermined { .. } => "RiemannConstantUndetermined",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
