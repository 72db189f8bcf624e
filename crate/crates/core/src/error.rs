use crate::scalars::Q;

/// Every failure the library can report.
///
/// Variants carry enough context to render a diagnostic without access to the
/// original inputs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("pole at the type-1 point T = {0}")]
    PoleAtTypeOnePoint(Q),

    #[error("denominator has an irreducible factor of degree >= 2 over Q: {0}")]
    IrreducibleDenominator(String),

    #[error("pole {pole} lies on the circle |T - {center}| = radius")]
    PoleOnCircle { pole: Q, center: Q },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("no complementary affinoid: {0}")]
    NoComplement(String),

    #[error("margin too large: {0}")]
    MarginTooLarge(String),

    #[error("limit is not contained in basis neighbourhood #{0}")]
    BasisNotNeighborhood(usize),

    #[error("vector is not cyclic: det[m, ∇m, ...] vanishes identically")]
    NotCyclic,

    #[error("singular linear system")]
    SingularSystem,

    #[error("pole of a coefficient at the type-1 point T = {0}")]
    PoleAtPoint(Q),

    #[error("radius {0} is outside (0, 1]")]
    OutOfRange(String),

    #[error("unsupported remainder: {0}")]
    Unsupported(String),

    #[error("matrix is not triangular")]
    NotTriangular,

    #[error("spectrum blocks are not pairwise disjoint")]
    NotSeparated,

    #[error("samples are not collinear within one piece: t = {0}, {1}, {2}")]
    NotPiecewiseAffine(Q, Q, Q),

    #[error("one-sided limits disagree at t = {0}")]
    DiscontinuityDetected(Q),

    #[error("not enough samples: {0}")]
    InsufficientSamples(String),

    #[error("no stabilisation up to l = {0}")]
    NeverStabilized(u32),

    #[error("pole on the boundary of the disc: {0}")]
    PoleOnBoundary(Q),

    #[error("function is not analytic on the disc: {0}")]
    NotAnalytic(String),

    #[error("eigenvalue {0} lies on the boundary of the cluster disc")]
    EigenvalueOnBoundary(Q),

    #[error("characteristic polynomial does not split over Q")]
    NonSplitCharPoly,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unbound constant `{name}` at line {line}")]
    UnboundConstant { name: String, line: usize },

    #[error("constant `{name}` is not a rational literal: {value}")]
    NonRationalLiteral { name: String, value: String },

    #[error("missing problem field: {0}")]
    MissingField(String),

    #[error("at t = {t}: {source}")]
    AtSample { t: Q, source: Box<Error> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
