use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model is infeasible")]
    InfeasibleModel,

    #[error("model is unbounded along coordinate {0}")]
    UnboundedModel(usize),

    #[error("uncertainty set is empty")]
    EmptyUncertaintySet,

    #[error("uncertainty set is unbounded along coordinate {0}")]
    UnboundedUncertaintySet(usize),

    #[error("operation requires a bounded uncertainty set")]
    UnrestrictedUncertaintySet,

    #[error("polyhedron is infeasible")]
    Infeasible,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("branch-and-bound node limit of {0} exceeded")]
    NodeLimitExceeded(usize),

    #[error("invalid configuration: {0}")]
    ConfigError(String),

    #[error("direction search failed to grow the basis: {0}")]
    NonTermination(String),

    #[error("query basis is ill-conditioned (condition estimate {0:.3e})")]
    IllConditionedQueryBasis(f64),

    #[error("sampling failure: {0}")]
    SamplingFailure(String),

    #[error("quadratic solver did not converge within {0} iterations")]
    ConvergenceFailure(usize),

    #[error("enumeration budget exceeded: {required} bases > {budget}")]
    BudgetExceeded { required: f64, budget: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
