use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation order {requested} exceeds available order {available}")]
    Truncation { requested: usize, available: usize },

    #[error("point {modulus} outside the disc of analyticity (radius {radius})")]
    Domain { modulus: f64, radius: f64 },

    #[error("point with imaginary part {imag} is not in the upper half-plane")]
    NotInUpperHalfPlane { imag: f64 },

    #[error("radius 1 requires analyticity beyond the unit circle, but the analytic radius is {analytic_radius}")]
    UnitCircleHypothesis { analytic_radius: f64 },

    #[error("evaluation at modulus {modulus} exceeds the supported limit {limit} for {function}")]
    EvaluationLimit {
        function: &'static str,
        modulus: f64,
        limit: f64,
    },

    #[error("rescaling factor {factor:e} for index {index} exceeds the {backend} limit {limit:e}")]
    Amplification {
        index: usize,
        factor: f64,
        limit: f64,
        backend: &'static str,
    },

    #[error("index {index} out of range for {samples} samples")]
    Index { index: usize, samples: usize },

    #[error("tail radius {tail_radius} must exceed the grid radius {radius}")]
    InvalidTailRadius { tail_radius: f64, radius: f64 },

    #[error("no closed-form coefficients for {0}")]
    UnsupportedOracle(String),

    #[error("{0} is not supported by the {1} backend")]
    UnsupportedBackend(String, &'static str),

    #[error("insufficient data: {available} usable points, at least {required} required")]
    InsufficientData { available: usize, required: usize },

    #[error("empty index range: onset {onset} beyond last index {last}")]
    EmptyRange { onset: usize, last: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for violations of the numerical hypotheses (analyticity radius,
    /// unit-circle condition, amplification and evaluation guards), as
    /// opposed to malformed input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::UnitCircleHypothesis { .. }
                | Error::EvaluationLimit { .. }
                | Error::Amplification { .. }
                | Error::InvalidTailRadius { .. }
        )
    }
}
