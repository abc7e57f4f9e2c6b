use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric is degenerate")]
    DegenerateMetric,
    #[error("metric is not symmetric at entries ({0},{1})")]
    AsymmetricMetric(usize, usize),
    #[error("restricted metric on subspace is degenerate")]
    DegenerateSubspace,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("algebra is not nilpotent: lower central series stabilises at dimension {0}")]
    NotNilpotent(usize),
    #[error("not a 2-cocycle (residual {0:e})")]
    NotACocycle(f64),
    #[error("structure constants violate the Jacobi identity (residual {0:e})")]
    NotALieAlgebra(f64),
    #[error("basis change is singular")]
    SingularTransform,
    #[error("basis does not span the derived ideal")]
    BasisDoesNotSpanDerived,
    #[error("center is degenerate for the metric")]
    DegenerateCenter,
    #[error("center is nondegenerate but not Euclidean; Z(h) is non degenerate Euclidean is required")]
    NonEuclideanCenter,
    #[error("expected a {expected}-step nilpotent algebra, found class {found}")]
    WrongNilpotencyClass { expected: usize, found: usize },
    #[error("derived ideal is degenerate or not Lorentzian")]
    DegenerateDerived,
    #[error("parameter `{0}` must be nonzero")]
    ZeroParameter(&'static str),
    #[error("parameter `{name}` out of range: {reason}")]
    ParameterOutOfRange { name: &'static str, reason: String },
    #[error("value `{0}` is not representable in exact mode")]
    Irrational(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
