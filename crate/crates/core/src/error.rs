use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    InvalidMatrix,

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("input is empty")]
    EmptyInput,

    #[error("basis vectors are linearly dependent (smallest singular value {smallest_singular:.3e})")]
    DegenerateBasis { smallest_singular: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index ({i},{j},{k},{l}) out of range for dimension {dim}")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        dim: usize,
    },

    #[error(
        "generator ({i},{j},{k},{l}) = {given} conflicts with value {forced} forced by curvature symmetries"
    )]
    SymmetryConflict {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        given: f64,
        forced: f64,
    },

    #[error("first Bianchi identity violated by {magnitude:.3e}")]
    BianchiViolation { magnitude: f64 },

    #[error("tensor violates curvature symmetries by {magnitude:.3e}")]
    NotCurvatureTensor { magnitude: f64 },

    #[error("endomorphism is not skew-adjoint: |P + P^T|_max = {magnitude:.3e}")]
    NotSkew { magnitude: f64 },

    #[error("vectors span a degenerate plane")]
    DegeneratePlane,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("reduced Jacobi operator has {clusters} distinct eigenvalues, expected 2")]
    NotTwoRoot { clusters: usize },

    #[error("invalid multiplicity pattern: {0}")]
    InvalidPattern(String),

    #[error("no Jacobi-dual eigenvector pairs were found")]
    NoDualPairsFound,

    #[error("the simple-root classification requires dimension n > 4, got n = {dim}")]
    DimensionTooLow { dim: usize },

    #[error("not a two-root tensor with a simple root: {0}")]
    NotSimpleRootTwoRoot(String),

    #[error("multiplicity-(n-2) eigenvalue is not constant: spread {deviation:.3e}")]
    MuNotConstant { deviation: f64 },

    #[error("shifted tensor vanishes: zero simple root")]
    ZeroSimpleRoot,

    #[error("quadratic form A^({index},{index}) is not rank one: residual {magnitude:.3e}")]
    RankExceeded { index: usize, magnitude: f64 },

    #[error("off-diagonal form A^({a},{b}) contradicts every sign choice: residual {magnitude:.3e}")]
    SignInconsistency { a: usize, b: usize, magnitude: f64 },

    #[error("recovered endomorphism is not skew-adjoint: |P + P^T|_max = {magnitude:.3e}")]
    SkewnessViolation { magnitude: f64 },

    #[error("P(X) is not an eigenvector of the shifted Jacobi operator: residual {magnitude:.3e}")]
    EigenvectorCheckFailed { magnitude: f64 },

    #[error("P is singular: eigenvalue {nu:.3e} of -P^2 is not positive")]
    SingularP { nu: f64 },

    #[error("eigenvalue {value:.6} of -P^2 has odd multiplicity {multiplicity}")]
    OddMultiplicity { value: f64, multiplicity: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
