use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("triangle {triangle} has non-positive (negative area) signed area {area:e}")]
    NegativeArea { triangle: usize, area: f64 },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("boundary edge ({0}, {1}) has no tag")]
    UntaggedBoundaryEdge(usize, usize),
    #[error("edge ({0}, {1}) is tagged more than once")]
    DuplicateTag(usize, usize),
    #[error("tagged edge ({0}, {1}) is not on the domain boundary")]
    NotABoundaryEdge(usize, usize),
    #[error("vertex index {index} out of range in triangle {triangle}")]
    VertexOutOfRange { triangle: usize, index: usize },
    #[error("degenerate dual face of zero length in triangle {0}")]
    DegenerateFace(usize),
    #[error("periodic pairing failed: {0}")]
    Periodic(String),
    #[error("{0}")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular diagonal block in preconditioner at cell {0}")]
    SingularPreconditioner(usize),
    #[error("operator is not positive definite (p.Ap = {0:e})")]
    IndefiniteOperator(f64),
    #[error("line search stagnated after {halvings} halvings at Newton iteration {iteration} (|f| = {residual:e})")]
    Stagnation {
        iteration: usize,
        halvings: usize,
        residual: f64,
    },
    #[error("pressure system has no Dirichlet vertex and no pinned vertex")]
    SingularSystem,
    #[error("linear solver did not converge: {0}")]
    NotConverged(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
