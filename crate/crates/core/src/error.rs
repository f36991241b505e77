use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("polygon needs at least 3 distinct vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite coordinate at vertex {0}")]
    NonFiniteVertex(usize),
    #[error("polygon vertices are not in counterclockwise order")]
    NotCounterClockwise,
    #[error("polygon is not convex at vertex {0}")]
    NotConvex(usize),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("`{name}` = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("quermassintegrals violate the Alexandrov-Fenchel chain between W_{i} and W_{j}")]
    AlexandrovFenchel { i: usize, j: usize },
    #[error("quermassintegral list: {0}")]
    Quermassintegrals(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("ball of radius {radius} is not contained in the domain")]
    NotContained { radius: f64 },
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}
