use num_complex::Complex64 as C64;

use super::eigen::{eig_hermitian, EigenDecomposition};
use super::functions::{enforce_hermitian, unitary_from_eigen};
use super::ComplexMatrix;
use crate::error::{invalid, Result};

pub const STATE_HERMITIAN_TOL: f64 = 1e-12;
pub const STATE_TRACE_TOL: f64 = 1e-10;
pub const STATE_PSD_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates all three state invariants.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(invalid("density matrix must be square and non-empty"));
        }
        let drift = matrix.hermiticity_drift();
        if drift > STATE_HERMITIAN_TOL {
            return Err(invalid(format!("density matrix not Hermitian (drift {drift:e})")));
        }
        let mut matrix = matrix;
        matrix.symmetrize();
        let rho = Self { matrix };
        rho.check_trace_and_positivity()?;
        Ok(rho)
    }

    /// Channel outputs: re-symmetrized, not re-validated.
    pub(crate) fn from_channel_output(mut matrix: ComplexMatrix) -> Self {
        enforce_hermitian(&mut matrix);
        Self { matrix }
    }

    /// Normalizes `amplitudes` and returns the projector onto it.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("pure state needs a non-zero finite amplitude vector"));
        }
        let v: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
        let mut m = ComplexMatrix::outer(&v);
        m.symmetrize();
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// Diagonal state with the given populations.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        if p.is_empty() || p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(invalid("probabilities must be finite and non-negative"));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > STATE_TRACE_TOL {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { matrix: ComplexMatrix::from_diag(p) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix).expect("density matrix is Hermitian").values
    }

    /// Largest eigenvalue, i.e. the operator norm.
    pub fn norm(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr(rho * op)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * op[(k, i)];
            }
        }
        acc
    }

    /// `U rho U^dagger`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self::from_channel_output(u.conjugate(&self.matrix))
    }

    /// Re-checks all invariants; used by tests and after long iterations.
    pub fn validate(&self) -> Result<()> {
        let drift = self.matrix.hermiticity_drift();
        if drift > STATE_HERMITIAN_TOL {
            return Err(invalid(format!("hermiticity drift {drift:e}")));
        }
        self.check_trace_and_positivity()
    }

    fn check_trace_and_positivity(&self) -> Result<()> {
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TRACE_TOL || tr.im.abs() > STATE_TRACE_TOL {
            return Err(invalid(format!("trace {tr} is not 1")));
        }
        let min = eig_hermitian(&self.matrix)?.values[0];
        if min < -STATE_PSD_TOL {
            return Err(invalid(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Hermitian generator with its spectrum cached.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    matrix: ComplexMatrix,
    eigen: EigenDecomposition,
    trace: f64,
}

impl Hamiltonian {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(invalid("Hamiltonian must be square and non-empty"));
        }
        let drift = matrix.hermiticity_drift();
        if drift > STATE_HERMITIAN_TOL {
            return Err(invalid(format!("Hamiltonian not Hermitian (drift {drift:e})")));
        }
        let mut matrix = matrix;
        matrix.symmetrize();
        let eigen = eig_hermitian(&matrix)?;
        let trace = matrix.trace().re;
        Ok(Self { matrix, eigen, trace })
    }

    pub fn diagonal(energies: &[f64]) -> Result<Self> {
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(invalid("energies must be finite"));
        }
        Self::new(ComplexMatrix::from_diag(energies))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigen.vectors
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    pub fn eps_max(&self) -> f64 {
        *self.eigen.values.last().expect("non-empty")
    }

    pub fn eps_min(&self) -> f64 {
        self.eigen.values[0]
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// `H + delta * I`, reusing the cached eigenvectors.
    pub fn shifted(&self, delta: f64) -> Self {
        let n = self.dim();
        let mut matrix = self.matrix.clone();
        for i in 0..n {
            matrix[(i, i)] += delta;
        }
        let eigen = EigenDecomposition {
            values: self.eigen.values.iter().map(|l| l + delta).collect(),
            vectors: self.eigen.vectors.clone(),
        };
        Self { matrix, eigen, trace: self.trace + delta * n as f64 }
    }

    /// Shift so the ground energy is zero; returns the applied shift.
    pub fn ground_shifted(&self) -> (Self, f64) {
        let delta = -self.eps_min();
        (self.shifted(delta), delta)
    }

    /// Same eigenvectors, energies multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let eigen = EigenDecomposition {
            values: self.eigen.values.iter().map(|l| l * factor).collect(),
            vectors: self.eigen.vectors.clone(),
        };
        Self { matrix: self.matrix.scale_real(factor), eigen, trace: self.trace * factor }
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        unitary_from_eigen(&self.eigen, t)
    }

    /// Schrodinger-picture evolution by `t` (negative `t` runs backwards).
    pub fn evolve(&self, rho: &DensityMatrix, t: f64) -> DensityMatrix {
        if t == 0.0 {
            return rho.clone();
        }
        rho.conjugated(&self.propagator(t))
    }

    /// `V^dagger M V`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.eigen.vectors;
        v.adjoint().matmul(m).matmul(v)
    }

    /// `V M V^dagger`.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.eigen.vectors.conjugate(m)
    }

    /// `f(H)` through the spectrum.
    pub fn apply_fn(&self, f: impl FnMut(f64) -> C64) -> ComplexMatrix {
        self.eigen.apply_fn(f)
    }

    /// `Tr exp(-beta H)`.
    pub fn partition_function(&self, beta: f64) -> f64 {
        self.eigen.values.iter().map(|e| (-beta * e).exp()).sum()
    }

    /// `Tr(rho H)`.
    pub fn mean_energy(&self, rho: &DensityMatrix) -> f64 {
        rho.expectation(&self.matrix).re
    }
}
