use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid system size n = {n}: {reason}")]
    InvalidSize { n: usize, reason: &'static str },

    #[error("invalid site pair ({i}, {j})")]
    InvalidPair { i: usize, j: usize },

    #[error("site {site} out of range for n = {n}")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("state has no nonzero amplitude")]
    ZeroState,

    #[error("two-site reduced state is not rotationally invariant (deviation {deviation:e})")]
    NotRotationallyInvariant { deviation: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("phasor system has no solution")]
    NoSolution,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
