use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("matrix is singular: pivot {pivot} has magnitude {magnitude:e}")]
    Singular { pivot: usize, magnitude: f64 },

    #[error("matrix is not symmetric positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("subdomain geometry does not align with mesh lines: {0}")]
    Alignment(String),

    #[error("node {node} is not covered by any subdomain")]
    NotACover { node: usize },

    #[error("partition of unity weights have not been built")]
    MissingWeights,

    #[error("subdomain {subdomain}: {source}")]
    Subdomain {
        subdomain: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
