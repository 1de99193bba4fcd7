use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomial is not Hermitian (symmetry defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("term of degree {degree} exceeds the degree cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("boundary point is not on the boundary: rho(q) = {value:e}")]
    NotOnBoundary { value: f64 },
    #[error("complex gradient of rho vanishes at the boundary point")]
    ZeroGradient,
    #[error("degenerate normal derivative: d rho / dt vanishes at the point")]
    DegenerateNormal,
    #[error("tangent vector must be nonzero")]
    ZeroTangent,
}

/// Parse failure in a domain file, with 1-based line and column.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalFormError {
    #[error("invalid leading polynomial P: {0}")]
    InvalidP(String),
    #[error("jet exceeds truncation degree {0}")]
    TruncationOverflow(u32),
    #[error("input is not pluriharmonic")]
    NotPluriharmonic,
    #[error("odd model degree {0}")]
    OddDegree(u32),
    #[error("result is not normalized")]
    NotNormalized,
    #[error("no absorption fixed point after {0} rounds")]
    TerminationGuard(usize),
    #[error("invalid jet: {0}")]
    InvalidJet(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KobayashiError {
    #[error("disc leaves the bounding ball of radius {radius}")]
    DiscOutOfBounds { radius: f64 },
    #[error("point is not in the working domain")]
    PointOutsideDomain,
    #[error("no admissible disc found even at beta = {beta:e}")]
    NoAdmissibleDisc { beta: f64 },
    #[error("epsilon {epsilon} exceeds the admissibility threshold {epsilon0}")]
    EpsilonTooLarge { epsilon: f64, epsilon0: f64 },
    #[error("constructed disc failed certification")]
    NotAdmissible,
    #[error("domain is not in certified form: {0}")]
    DomainNotInCertifiedForm(String),
    #[error("search budget exceeded: {requested} > {limit}")]
    BudgetExceeded { requested: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SqueezeError {
    #[error("directions are linearly dependent")]
    DegenerateDirections,
    #[error("obstruction hypothesis not satisfied: {0}")]
    HypothesisNotSatisfied(String),
    #[error("invalid delta list: {0}")]
    InvalidDeltas(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Kobayashi(#[from] KobayashiError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
