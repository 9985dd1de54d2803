use thiserror::Error;

/// Errors raised by the extropy engine and its supporting modules.
///
/// Non-convergence of a quadrature is not an error: it is reported through
/// the `converged` flag of [`crate::quadrature::IntegralResult`] and
/// [`crate::extropy::GweResult`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("integrand is not finite ({value}) at abscissa {abscissa}")]
    Evaluation { abscissa: f64, value: f64 },

    #[error("insufficient data: {got} observations, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    #[error("degenerate ratio: SRS extropy is zero")]
    DegenerateRatio,

    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
