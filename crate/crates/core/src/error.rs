use thiserror::Error;

use crate::complex::Simplex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("no field instantiation for p = {0}")]
    Unsupported(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subquotient invariant violated: {0}")]
    InvariantViolation(String),
    #[error("induced map is not well defined: {0}")]
    NotWellDefined(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("simplex with no vertices")]
    EmptySimplex,
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Vec<u32>),
    #[error("simplex {0} has level 0 and would never be present")]
    ZeroLevel(Simplex),
    #[error("simplex {simplex} listed twice with levels {first} and {second}")]
    DuplicateSimplex {
        simplex: Simplex,
        first: usize,
        second: usize,
    },
    #[error("face {face} (level {face_level}) dies before its coface {coface} (level {coface_level})")]
    LevelMonotonicity {
        face: Simplex,
        face_level: usize,
        coface: Simplex,
        coface_level: usize,
    },
    #[error("declared length {declared} is below the largest level {max_level}")]
    LengthTooShort { declared: usize, max_level: usize },
    #[error("filtration index {index} outside [0, {len}]")]
    IndexOutOfRange { index: usize, len: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("vertex {0} of the source has no image")]
    MissingVertex(u32),
    #[error("image of {simplex} is {image}, which is not a simplex of the target")]
    NotSimplicial { simplex: Simplex, image: Simplex },
    #[error("cover piece {piece} is not closed under faces: {face} missing")]
    NotSubcomplex { piece: i64, face: Simplex },
    #[error("cover piece {piece} contains {simplex}, which is not a simplex of the target")]
    OutsideTarget { piece: i64, simplex: Simplex },
    #[error("cover piece id {0} used twice")]
    DuplicatePiece(i64),
    #[error("pullback cover misses {}", fmt_simplices(.0))]
    NotCovering(Vec<Simplex>),
    #[error("nerve tuple {0:?} is not strictly increasing or out of range")]
    BadTuple(Vec<usize>),
}

fn fmt_simplices(s: &[Simplex]) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("total differential does not square to zero in degree {0}")]
    SignError(i64),
    #[error("E_2 mismatch at (p, q) = ({p}, {q}): filtered page gives {page}, Cech route gives {cech}")]
    Mismatch {
        p: usize,
        q: usize,
        page: usize,
        cech: usize,
    },
    #[error("spectral sequence did not stabilise by page {0}")]
    NonTermination(usize),
    #[error("pages must share r and be consecutive: ({r0}, {i0}) vs ({r1}, {i1})")]
    PageMismatch {
        r0: usize,
        i0: usize,
        r1: usize,
        i1: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
