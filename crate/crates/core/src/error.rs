use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coincident poles: k[{first}] and k[{second}] differ by less than 1e-12")]
    CoincidentPoles { first: usize, second: usize },

    #[error("spectral point {index} lies in the lower half plane (v = {v})")]
    LowerHalfPlane { index: usize, v: f64 },

    #[error("degenerate norming constant at index {index}: zero vector")]
    DegenerateNorming { index: usize },

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector cannot be normalized to a polarization")]
    ZeroVector,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("pole hit: {0}")]
    Pole(String),

    #[error("degenerate dressing chain: direction for index {index} vanished")]
    DegenerateChain { index: usize },

    #[error("spectral parameter on the imaginary axis: {0}")]
    ImaginaryAxis(String),

    #[error("spectral points must have strictly increasing u: {0}")]
    Ordering(String),

    #[error("singular linear system ({what}): condition number {condition:.3e}")]
    Singular { what: String, condition: f64 },

    #[error("matrix is not unitary: |U^†U - I| = {0:.3e}")]
    NotUnitary(f64),

    #[error("invalid boundary specification: {0}")]
    InvalidBoundary(String),

    #[error("invalid index or index set: {0}")]
    InvalidIndex(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("peak search failed: {0}")]
    Window(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("{step}: {source}")]
    Step { step: String, source: Box<Error> },
}

impl Error {
    /// Re-labels per-item validation errors with the position of the item.
    pub(crate) fn at_index(self, i: usize) -> Self {
        match self {
            Error::LowerHalfPlane { v, .. } => Error::LowerHalfPlane { index: i, v },
            Error::DegenerateNorming { .. } | Error::ZeroVector => Error::DegenerateNorming { index: i },
            other => other,
        }
    }
}
