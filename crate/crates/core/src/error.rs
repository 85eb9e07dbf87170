use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Domain errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tensor product of an empty list")]
    EmptyProduct,

    #[error("invalid factor dimensions {dims:?}: every factor needs dimension >= 1")]
    InvalidDimensions { dims: Vec<usize> },

    #[error("total dimension {total} exceeds the dense cap of {cap}")]
    DimensionCap { total: usize, cap: usize },

    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("operator flagged Hermitian deviates from its adjoint by {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("site {site} out of range for {factors} factors")]
    SiteOutOfRange { site: usize, factors: usize },

    #[error("site {site} has dimension {expected}, local operator has dimension {found}")]
    SiteDimension {
        site: usize,
        expected: usize,
        found: usize,
    },

    #[error("local observable must act on exactly one factor, got {factors}")]
    NotSingleFactor { factors: usize },

    #[error("zero-norm ket cannot be normalized")]
    ZeroNorm,

    #[error("post-selection is orthogonal to pre-selection: |<phi|psi>| = {overlap:e} <= {threshold:e}")]
    OrthogonalPostSelection { overlap: f64, threshold: f64 },

    #[error("degenerate spectrum: eigenvalue gap {gap:e} <= {threshold:e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },

    #[error("expected {expected} eigenvalues, got {found}")]
    EigenvalueCount { expected: usize, found: usize },

    #[error("declared eigenvalues ({lambda1}, {lambda2}) do not match the operator (residual {residual:e})")]
    EigenvalueMismatch {
        lambda1: f64,
        lambda2: f64,
        residual: f64,
    },

    #[error("coupling constant must be finite, got {0}")]
    NonFiniteCoupling(f64),

    #[error("weak value undefined: |a| = {modulus:e} <= {threshold:e} at this coupling")]
    VanishingCoefficient { modulus: f64, threshold: f64 },

    #[error("observables share site {site}")]
    SharedSite { site: usize },

    #[error("observable sum needs at least one term")]
    EmptySum,

    #[error("invalid meter preparation: {0}")]
    InvalidMeter(String),

    #[error("system needs at least {needed} factors, has {found}")]
    TooFewFactors { needed: usize, found: usize },

    #[error("unknown measurement basis {0:?}")]
    UnknownBasis(String),

    #[error("shot records do not cover basis {0}")]
    MissingBasis(String),

    #[error("shots must be >= 1")]
    NoShots,

    #[error("meter |0> population vanishes; amplitude ratio undefined")]
    ZeroPopulation,

    #[error("meter register is not a product of qubits: dims {dims:?}")]
    NotQubits { dims: Vec<usize> },

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
}
