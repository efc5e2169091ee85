use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `H` is proportional to the identity, so the complement ancilla has
    /// zero normalization.
    #[error("degenerate Hamiltonian: normalization Z = {z:e} is not positive")]
    DegenerateHamiltonian { z: f64 },

    #[error("threshold rate is infinite (flat ancilla at beta = 0)")]
    InfiniteThreshold,

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("energy truncation leaves an empty low-energy subspace")]
    EmptySubspace,

    #[error("estimated cost {estimate:e} scalar ops exceeds budget {budget:e}")]
    BudgetExceeded { estimate: f64, budget: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
