//! Dense complex linear algebra: Hermitian eigendecomposition, matrix
//! functions, tensor products and partial traces, norms and distances.

mod eigen;
mod functions;
mod matrix;
mod state;

pub use eigen::{eig_hermitian, EigenDecomposition, HERMITIAN_TOL};
pub use functions::{
    enforce_hermitian, expm_hermitian_scaled, partial_trace_ancilla, signed_norms, spectral_norm,
    tensor_product, trace_distance, von_neumann_entropy, SignedNorms, DRIFT_WARN_TOL, SYMMETRIZE_TOL,
};
pub use matrix::ComplexMatrix;
pub use state::{DensityMatrix, Hamiltonian, STATE_HERMITIAN_TOL, STATE_PSD_TOL, STATE_TRACE_TOL};
