use thiserror::Error;

/// Errors produced by mesh construction and the numerical operators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("top simplex {0:?} appears more than once")]
    DuplicateSimplex(Vec<usize>),
    #[error("simplex {simplex:?} references vertex {index}, but only {count} vertices exist")]
    DanglingVertexIndex {
        simplex: Vec<usize>,
        index: usize,
        count: usize,
    },
    #[error("complex is not orientable: conflict across face {0:?}")]
    NonOrientable(Vec<usize>),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("exact rank computation exceeded {bits} bits; use the floating-point fallback")]
    OverflowInExactArithmetic { bits: u64 },
    #[error("resolution {resolution} is below the minimum {minimum} for shape {shape}")]
    UnsupportedResolution {
        shape: &'static str,
        resolution: usize,
        minimum: usize,
    },
    #[error("degree {degree} out of range 0..={max} for this operation")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("cochains belong to different complexes")]
    ComplexMismatch,
    #[error("cochain of degree {degree} has {found} values, complex has {expected} simplices")]
    LengthMismatch {
        degree: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("factorization failed: {0}")]
    FactorizationFailure(String),
    #[error("mesh is not well-centered; no diagonal Hodge star is available")]
    NotWellCentered,
    #[error(
        "ambiguous kernel in degree {degree}: eigenvalue {eigenvalue:e} is within a factor of 10 of the cutoff {cutoff:e}"
    )]
    AmbiguousKernel {
        degree: usize,
        eigenvalue: f64,
        cutoff: f64,
    },
    #[error("cochain is not in the harmonic complement (relative leakage {0:e})")]
    NotInHarmonicComplement(f64),
    #[error("invalid Stokes-Dirac degrees (p, q) = ({p}, {q}) for dimension {n}")]
    InvalidDegrees { p: usize, q: usize, n: usize },
    #[error("operation requires a {expected}-dimensional complex, got {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("integrability conditions hold but the solve residual {0:e} exceeds tolerance")]
    SolverFailure(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
