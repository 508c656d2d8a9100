use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("invalid rank {rank} for dimension {dim} (need 1 <= n <= d-1)")]
    InvalidRank { rank: usize, dim: usize },

    #[error("not a rank-{rank} projection: idempotency residual {idempotency:.3e}, trace residual {trace:.3e}")]
    InvalidPoint { rank: usize, idempotency: f64, trace: f64 },

    #[error("not a tangent vector: residual of qA+Aq-A is {0:.3e}")]
    NotTangent(f64),

    #[error("not Hermitian: residual {0:.3e}")]
    NotHermitian(f64),

    #[error("rank deficient: expected rank {expected}, found {found} independent columns")]
    RankDeficient { expected: usize, found: usize },

    #[error("points are not in the same leaf: residual of qq'-q' is {0:.3e}")]
    LeafMismatch(f64),

    #[error("fiber condition violated: residual {0:.3e}")]
    FiberCondition(f64),

    #[error("tangent vector is based at a different point (residual {0:.3e})")]
    BaseMismatch(f64),

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("base point too close to zero (norm {0:.3e})")]
    DegenerateBase(f64),

    #[error("pair is not transverse: range(p1) + range(p2)^perp is not a direct sum (condition number {0:.3e})")]
    NotTransverse(f64),

    #[error("degenerate direction: Tr(qA^2) = {0:.3e}")]
    DegenerateDirection(f64),

    #[error("matrix is not traceless: trace {0:.3e}")]
    NotTraceless(f64),

    #[error("matrix must be nonzero")]
    ZeroMatrix,

    #[error("degenerate symplectic form: rank {rank} of {expected}")]
    DegenerateSymplectic { rank: usize, expected: usize },

    #[error("form of degree {degree} needs {expected} tangent vectors, got {got}")]
    Arity { degree: usize, expected: usize, got: usize },

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("not a point of the d=2 quadric model: {0}")]
    NotQuadric(&'static str),

    #[error("vector is not tangent to the quadric (residual {0:.3e})")]
    NotQuadricTangent(f64),

    #[error("sample count must be positive")]
    NoSamples,

    #[error("integrand failed at sample {index}: {source}")]
    Integrand {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
