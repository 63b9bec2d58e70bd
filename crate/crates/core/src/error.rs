use thiserror::Error;

/// Errors raised by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("attempted to invert zero")]
    ZeroInverse,
    #[error("the zero polynomial has no unit normal form")]
    ZeroPolynomial,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("determinant of size {0} exceeds the supported bound")]
    MatrixTooLarge(usize),
    #[error("polynomial division is not exact")]
    NotDivisible,
    #[error("could not parse `{input}`: {message}")]
    Parse { input: String, message: String },
    #[error("framework document: {0}")]
    Schema(String),
    #[error("lattice basis is singular")]
    SingularLattice,
    #[error("edge {0} has a zero-length bar")]
    ZeroLengthBar(String),
    #[error("edge {0} joins a vertex copy to itself")]
    DegenerateEdge(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertexName(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("sublattice matrix is singular")]
    SingularSublattice,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no velocity sample for vertex {vertex} at offset {offset:?}")]
    MissingSample { vertex: usize, offset: Vec<i64> },
    #[error("framework is not in Maxwell counting equilibrium ({edges} edges, {dof} vertex coordinates)")]
    NotMaxwell { edges: usize, dof: usize },
    #[error("kernel expansion needs {atoms} atoms, above the limit of {limit}")]
    StageTooLarge { atoms: u128, limit: usize },
    #[error("atom {0} lies in none of the given components")]
    UncoveredAtom(usize),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(input: &str, message: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            message: message.into(),
        }
    }
}
