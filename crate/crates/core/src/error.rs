use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or parameter combination violates a documented constraint.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The monomial Gram matrix is too ill-conditioned for double precision.
    #[error(
        "Gram matrix of order {order} has condition estimate {cond:.3e}, above the gate {gate:.3e}; \
         largest admissible order is {admissible}"
    )]
    Conditioning {
        order: usize,
        cond: f64,
        gate: f64,
        admissible: usize,
    },

    /// A quadrature rule did not reach the requested accuracy.
    #[error("quadrature did not converge: error estimate {achieved:.3e} exceeds {tol:.3e}")]
    Quadrature { achieved: f64, tol: f64 },

    /// A truncated series did not reach the requested tail bound.
    #[error("series truncated at {terms} terms with tail bound {achieved:.3e} > {tol:.3e}")]
    Truncation {
        terms: usize,
        achieved: f64,
        tol: f64,
    },

    /// A linear solve or factorization failed.
    #[error("linear algebra failure: {0}")]
    Solve(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
