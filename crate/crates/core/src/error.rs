use thiserror::Error;

/// Errors shared by all solver modules.
#[derive(Debug, Error)]
pub enum SolverError {
    /// Instance data violates a construction invariant (duplicate id,
    /// non-positive duration, decreasing breakpoint times, ...).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// The instance does not match the solver's problem class, e.g. a
    /// release date fed to a solver that requires none.
    #[error("unsupported variant: {0}")]
    UnsupportedVariant(String),

    /// No schedule satisfies the stated side constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A schedule passed in for evaluation breaks one of its invariants.
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    /// A caller-supplied callback broke its contract, e.g. a feasibility
    /// predicate that is not monotone in the target value.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Exact solvers refuse instances above their factorial guard.
    #[error("instance size {n} exceeds limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    /// A bracketed search did not converge within the iteration cap.
    #[error("search did not converge within {0} iterations")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, SolverError>;
