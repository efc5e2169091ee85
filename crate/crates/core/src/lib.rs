//! Time reversal of unknown quantum states by iterated partial-swap
//! (density-matrix exponentiation) channels.
//!
//! The crate simulates the protocol on dense density matrices of small
//! dimension and evaluates the accompanying analytic error bounds and
//! complexity estimates, so the two can be compared directly.
//!
//! * [`linalg`]: dense complex linear algebra (Jacobi eigensolver,
//!   matrix functions, partial trace, norms).
//! * [`channel`]: the single-step partial-swap channel, its joint-unitary
//!   oracle, N-step iteration with optional forward drift, and the leading
//!   error term.
//! * [`protocol`]: complement and thermal ancillas, threshold rates, the
//!   full reversal run, optimal temperature and energy truncation.
//! * [`complexity`]: step-count estimators and the entropy/norm solver.
//! * [`wavepacket`]: free Lorentzian wave packet on a momentum grid.
//!
//! Units: `hbar = 1`.

pub mod channel;
pub mod complexity;
mod error;
pub mod linalg;
pub mod parallel;
pub mod protocol;
pub mod random;
pub mod stats;
pub mod wavepacket;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Hamiltonian};
