use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("parameter matrix is not symmetric")]
    NotSymmetric,
    #[error("parameter matrix is not invertible over the integers (det = {0})")]
    NotUnimodular(i128),
    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,
    #[error("not a point of the Siegel upper half space: {0}")]
    NotSiegel(String),
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("truncation radius {radius} too small: tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    Truncation { radius: f64, bound: f64, tolerance: f64 },
    #[error("theta value {0:e} too close to zero at the sample point")]
    NearZero(f64),
    #[error("elements live over different fibers")]
    FiberMismatch,
    #[error("group element does not fix the fiber (|g.T - T| = {0:e})")]
    NotInStabilizer(f64),
    #[error("element list is not closed under multiplication")]
    NotClosed,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
