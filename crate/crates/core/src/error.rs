use thiserror::Error;

/// Errors shared across the crate. Variant names are stable identifiers:
/// the CLI error envelope reports them verbatim.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("matrix has full column rank, no nullvector")]
    FullRank,
    #[error("numerical nullity is {0}, expected 1")]
    AmbiguousNullspace(usize),
    #[error("list lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("pencil has identically zero discriminant")]
    DegeneratePencil,
    #[error("quadratic form is degenerate: {0}")]
    DegenerateForm(String),
    #[error("pencil is not nonsingular: {0}")]
    NotNonsingular(String),
    #[error("2x2 matrix is not unimodular: |ad - bc - 1| = {0:.3e}")]
    NotUnimodular(f64),
    #[error("transform matrix is numerically singular")]
    SingularTransform,
    #[error("invalid lambda list: {0}")]
    InvalidLambdas(String),
    #[error("point is not regular: {0}")]
    NotRegular(String),
    #[error("binary form is not stable (repeated roots)")]
    NotStable,
    #[error("transformed root lands at infinity")]
    RootAtInfinity,
    #[error("vector is not general: standard coordinate {0} is below threshold")]
    NotGeneral(usize),
    #[error("subspace is not poised")]
    NotPoised,
    #[error("computation is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("dimension too small: {0}")]
    DimensionTooSmall(String),
    #[error("samples are inconsistent: {0}")]
    InconsistentSamples(String),
    #[error("recovered parameters are degenerate (repeated roots)")]
    DegenerateRecovery,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable name of the variant, used in the CLI error envelope.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::NoConvergence(_) => "NoConvergence",
            Error::FullRank => "FullRank",
            Error::AmbiguousNullspace(_) => "AmbiguousNullspace",
            Error::LengthMismatch(_, _) => "LengthMismatch",
            Error::DegeneratePencil => "DegeneratePencil",
            Error::DegenerateForm(_) => "DegenerateForm",
            Error::NotNonsingular(_) => "NotNonsingular",
            Error::NotUnimodular(_) => "NotUnimodular",
            Error::SingularTransform => "SingularTransform",
            Error::InvalidLambdas(_) => "InvalidLambdas",
            Error::NotRegular(_) => "NotRegular",
            Error::NotStable => "NotStable",
            Error::RootAtInfinity => "RootAtInfinity",
            Error::NotGeneral(_) => "NotGeneral",
            Error::NotPoised => "NotPoised",
            Error::IllConditioned(_) => "IllConditioned",
            Error::DimensionTooSmall(_) => "DimensionTooSmall",
            Error::InconsistentSamples(_) => "InconsistentSamples",
            Error::DegenerateRecovery => "DegenerateRecovery",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
