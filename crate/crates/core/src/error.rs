use thiserror::Error;

/// Failure modes of the toolkit.
///
/// Complex arguments are reported as `(re, im)` pairs of `f64` so the error
/// type is independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix has eigenvalue {eigenvalue:e} below the clamping tolerance")]
    IndefiniteBeyondTolerance { eigenvalue: f64 },

    #[error("operator norm {norm} exceeds 1")]
    NotAContraction { norm: f64 },

    #[error("parameter has singular value {modulus} too close to 1 for a strict contraction")]
    NotAStrictContraction { modulus: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("resolvent is numerically singular at z = {z:?}")]
    ResolventSingular { z: (f64, f64) },

    #[error("denominator of the quotient vanishes at z = {z:?}")]
    DenominatorVanishes { z: (f64, f64) },

    #[error("degenerate denominator at z = {z:?}")]
    DegenerateDenominator { z: (f64, f64) },

    #[error("Cauchy transform value vanishes at z = {z:?}")]
    DegenerateCauchyValue { z: (f64, f64) },

    #[error("point z = {z:?} is too close to the unit circle")]
    TooCloseToCircle { z: (f64, f64) },

    #[error("atomwise weight functions need a purely atomic measure")]
    AtomwiseNeedsAtomic,

    #[error("measure has total mass {mass}, expected a probability measure")]
    NotProbability { mass: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("point {xi:?} lies on an atom of the measure")]
    AtXiAtom { xi: (f64, f64) },

    #[error("eigenvector {index} is orthogonal to the cyclic vector")]
    EigenvectorOrthogonalToCyclic { index: usize },

    #[error("operator has a unitary part of dimension {dim}")]
    NotCnu { dim: usize },

    #[error("operator does not vanish on its defect space (residual {residual:e})")]
    NotPartialIsometry { residual: f64 },

    #[error("parameter is not unitary (residual {residual:e})")]
    NotUnitaryParameter { residual: f64 },

    #[error("power {power} exceeds the truncation depth {depth}")]
    PowerExceedsTruncation { power: usize, depth: usize },

    #[error("eigen-decomposition failed to converge")]
    NoConvergence,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures caused by numerical degeneracy of otherwise valid
    /// input (vanishing denominators, points on singular sets).
    pub fn is_numerical_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::ResolventSingular { .. }
                | Error::DenominatorVanishes { .. }
                | Error::DegenerateDenominator { .. }
                | Error::DegenerateCauchyValue { .. }
                | Error::TooCloseToCircle { .. }
                | Error::AtXiAtom { .. }
                | Error::EigenvectorOrthogonalToCyclic { .. }
                | Error::NoConvergence
        )
    }

    /// Stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "NotHermitian",
            Error::IndefiniteBeyondTolerance { .. } => "IndefiniteBeyondTolerance",
            Error::NotAContraction { .. } => "NotAContraction",
            Error::NotAStrictContraction { .. } => "NotAStrictContraction",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite => "NonFinite",
            Error::ResolventSingular { .. } => "ResolventSingular",
            Error::DenominatorVanishes { .. } => "DenominatorVanishes",
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::DegenerateCauchyValue { .. } => "DegenerateCauchyValue",
            Error::TooCloseToCircle { .. } => "TooCloseToCircle",
            Error::AtomwiseNeedsAtomic => "AtomwiseNeedsAtomic",
            Error::NotProbability { .. } => "NotProbability",
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::AtXiAtom { .. } => "AtXiAtom",
            Error::EigenvectorOrthogonalToCyclic { .. } => "EigenvectorOrthogonalToCyclic",
            Error::NotCnu { .. } => "NotCnu",
            Error::NotPartialIsometry { .. } => "NotPartialIsometry",
            Error::NotUnitaryParameter { .. } => "NotUnitaryParameter",
            Error::PowerExceedsTruncation { .. } => "PowerExceedsTruncation",
            Error::NoConvergence => "NoConvergence",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
