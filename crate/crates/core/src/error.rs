use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("periodic facet {facet} has no partner: {reason}")]
    UnmatchedFacet { facet: usize, reason: String },

    #[error("polynomial degree {0} is not supported")]
    UnsupportedDegree(usize),

    #[error("quadrature of degree {0} is not supported")]
    UnsupportedQuadrature(usize),

    #[error("point ({x}, {y}) is not inside element {element}")]
    PointOutside { element: usize, x: f64, y: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("no tableau of order {order} for {family}")]
    UnsupportedOrder { family: &'static str, order: usize },

    #[error("unknown integrator `{0}`")]
    UnknownIntegrator(String),

    #[error("integrator `{0}` needs a partitioned (w, u) system")]
    NotPartitioned(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
