use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{function}: `{name}` = {value} is outside the domain ({expected})")]
    Domain {
        function: &'static str,
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// An iterative method (series, quadrature, root finder) did not meet its
    /// tolerance within its iteration budget.
    #[error("{function}: no convergence ({detail})")]
    NonConvergence {
        function: &'static str,
        detail: String,
    },

    /// Sample data unusable for fitting.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(
    function: &'static str,
    name: &'static str,
    value: f64,
    expected: &'static str,
) -> Error {
    Error::Domain {
        function,
        name,
        value,
        expected,
    }
}

pub(crate) fn no_convergence(function: &'static str, detail: impl Into<String>) -> Error {
    Error::NonConvergence {
        function,
        detail: detail.into(),
    }
}
