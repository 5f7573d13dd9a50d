use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {0} lies on the branch cut [1, inf); pass an explicit side")]
    CutAmbiguity(f64),
    #[error("point {re} + {im}i is outside the strip |Re z| < {bound}")]
    OutOfStrip { re: f64, im: f64, bound: f64 },
    #[error("point {re} + {im}i is within {dist:e} of a pole")]
    NearPole { re: f64, im: f64, dist: f64 },
    #[error("quadrature did not converge: estimated error {err:e} exceeds {tol:e}")]
    Quadrature { err: f64, tol: f64 },
    #[error("p/q not in lowest terms: {p}/{q}")]
    NotCoprime { p: i64, q: i64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("theta = {0} is outside the admissible arc")]
    OutOfArc(f64),
    #[error("s^2 = 1 is excluded")]
    DegenerateEigenvalue,
    #[error("no solution found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
