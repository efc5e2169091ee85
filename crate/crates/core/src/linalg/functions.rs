use num_complex::Complex64 as C64;

use super::eigen::{eig_hermitian, EigenDecomposition};
use super::{ComplexMatrix, DensityMatrix};
use crate::error::{invalid, Result};

/// Above this drift a matrix is re-symmetrized after channel arithmetic.
pub const SYMMETRIZE_TOL: f64 = 1e-13;
/// Above this drift the re-symmetrization is reported.
pub const DRIFT_WARN_TOL: f64 = 1e-9;

/// `exp(-i s M)` for Hermitian `M`.
pub fn expm_hermitian_scaled(m: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    if !s.is_finite() {
        return Err(invalid(format!("time scale must be finite, got {s}")));
    }
    if !m.is_square() {
        return Err(invalid("exponential of a non-square matrix"));
    }
    if s == 0.0 {
        return Ok(ComplexMatrix::identity(m.rows()));
    }
    let eig = eig_hermitian(m)?;
    Ok(unitary_from_eigen(&eig, s))
}

pub(crate) fn unitary_from_eigen(eig: &EigenDecomposition, s: f64) -> ComplexMatrix {
    if s == 0.0 {
        return ComplexMatrix::identity(eig.values.len());
    }
    eig.apply_fn(|l| C64::from_polar(1.0, -l * s))
}

pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Trace out the second (ancilla) factor of a `d^2 x d^2` joint operator.
pub fn partial_trace_ancilla(joint: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    if d == 0 || joint.rows() != d * d || joint.cols() != d * d {
        return Err(invalid(format!(
            "partial trace expects a {0}x{0} matrix for d = {d}, got {1}x{2}",
            d * d,
            joint.rows(),
            joint.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|k| joint[(i * d + k, j * d + k)]).sum()))
}

/// Operator norm `max |lambda|` of a Hermitian matrix.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(signed_norms(m)?.spectral)
}

/// Both the largest eigenvalue and the largest eigenvalue modulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedNorms {
    pub max_eigenvalue: f64,
    pub spectral: f64,
}

pub fn signed_norms(m: &ComplexMatrix) -> Result<SignedNorms> {
    let eig = eig_hermitian(m)?;
    let max_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    let spectral = eig.values.iter().map(|l| l.abs()).fold(0.0, f64::max);
    Ok(SignedNorms { max_eigenvalue, spectral })
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(invalid(format!("trace distance between dims {} and {}", a.dim(), b.dim())));
    }
    let diff = a.matrix() - b.matrix();
    let eig = eig_hermitian(&diff)?;
    Ok(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>())
}

/// Entropy in nats, `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eig = eig_hermitian(rho.matrix()).expect("density matrix is Hermitian");
    eig.values.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum::<f64>().max(0.0)
}

/// Re-symmetrize `m` when channel arithmetic has introduced anti-Hermitian
/// drift. Returns the drift observed before the fix.
pub fn enforce_hermitian(m: &mut ComplexMatrix) -> f64 {
    let drift = m.hermiticity_drift();
    if drift > SYMMETRIZE_TOL {
        if drift > DRIFT_WARN_TOL {
            log::warn!("hermiticity drift {drift:e} exceeds {DRIFT_WARN_TOL:e}; re-symmetrizing");
        }
        m.symmetrize();
    }
    drift
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian, seeded_rng};
    use std::f64::consts::{LN_2, PI};

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[1.0, -1.0])
    }

    #[test]
    fn expm_zero_is_identity() {
        let mut rng = seeded_rng(1);
        let h = random_hermitian(3, &mut rng);
        assert_eq!(expm_hermitian_scaled(&h, 0.0).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn expm_pauli_z_at_pi() {
        let u = expm_hermitian_scaled(&pauli_z(), PI).unwrap();
        let minus_i = ComplexMatrix::identity(2).scale_real(-1.0);
        assert!(u.max_abs_diff(&minus_i) < 1e-15);
    }

    #[test]
    fn expm_rejects_non_finite_scale() {
        assert!(expm_hermitian_scaled(&pauli_z(), f64::NAN).is_err());
        assert!(expm_hermitian_scaled(&pauli_z(), f64::INFINITY).is_err());
    }

    // Independent route: truncated Taylor series of exp(-i s M).
    fn taylor_expm(m: &ComplexMatrix, s: f64, terms: usize) -> ComplexMatrix {
        let gen = m.scale(C64::new(0.0, -s));
        let mut term = ComplexMatrix::identity(m.rows());
        let mut sum = term.clone();
        for k in 1..terms {
            term = term.matmul(&gen).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    #[test]
    fn expm_matches_taylor_oracle() {
        let mut rng = seeded_rng(5);
        let h = random_hermitian(3, &mut rng);
        let u = expm_hermitian_scaled(&h, 0.7).unwrap();
        assert!(u.max_abs_diff(&taylor_expm(&h, 0.7, 40)) <= 1e-9);
        let uu = u.adjoint().matmul(&u);
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(3)) <= 1e-10);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = seeded_rng(2);
        let rho = random_density(3, &mut rng);
        let sigma = random_density(3, &mut rng);
        let joint = tensor_product(rho.matrix(), sigma.matrix());
        let back = partial_trace_ancilla(&joint, 3).unwrap();
        assert!(back.max_abs_diff(rho.matrix()) <= 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let a = C64::new(1.0 / 2f64.sqrt(), 0.0);
        let z = C64::new(0.0, 0.0);
        let bell = ComplexMatrix::outer(&[a, z, z, a]);
        let reduced = partial_trace_ancilla(&bell, 2).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_matches_double_loop() {
        let mut rng = seeded_rng(3);
        let joint = random_density(4, &mut rng);
        let m = joint.matrix();
        let r = partial_trace_ancilla(m, 2).unwrap();
        let mut oracle = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..2 {
                    acc += m[(2 * i + k, 2 * j + k)];
                }
                oracle[(i, j)] = acc;
            }
        }
        assert!(r.max_abs_diff(&oracle) <= 1e-15);
        assert!((r.trace() - m.trace()).norm() <= 1e-12);
        assert!(partial_trace_ancilla(m, 3).is_err());
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm(&ComplexMatrix::from_diag(&[0.2, -0.5])).unwrap(), 0.5);
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(spectral_norm(&m).is_err());
    }

    // Power iteration on M^2 converges to the largest |lambda|^2.
    fn power_iteration_norm(m: &ComplexMatrix) -> f64 {
        let m2 = m.matmul(m);
        let n = m.rows();
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64)).collect();
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w: Vec<C64> = (0..n).map(|i| (0..n).map(|k| m2[(i, k)] * v[k]).sum()).collect();
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            lambda = norm;
            v = w.into_iter().map(|z| z / norm).collect();
        }
        lambda.sqrt()
    }

    #[test]
    fn spectral_norm_matches_power_iteration() {
        let mut rng = seeded_rng(8);
        for _ in 0..5 {
            let h = random_hermitian(4, &mut rng);
            let a = spectral_norm(&h).unwrap();
            assert!((a - power_iteration_norm(&h)).abs() <= 1e-8 * a.max(1.0));
        }
    }

    #[test]
    fn trace_distance_examples() {
        let mut rng = seeded_rng(4);
        let rho = random_density(3, &mut rng);
        assert!(trace_distance(&rho, &rho).unwrap() < 1e-15);
        let a = DensityMatrix::from_probabilities(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::from_probabilities(&[0.0, 1.0]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(trace_distance(&a, &rho).is_err());
    }

    #[test]
    fn qubit_trace_distance_is_half_bloch_distance() {
        let mut rng = seeded_rng(12);
        let a = random_density(2, &mut rng);
        let b = random_density(2, &mut rng);
        let bloch = |r: &DensityMatrix| {
            let m = r.matrix();
            [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re]
        };
        let (ra, rb) = (bloch(&a), bloch(&b));
        let oracle = 0.5 * ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((trace_distance(&a, &b).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::from_probabilities(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((von_neumann_entropy(&mixed) - 4f64.ln()).abs() < 1e-14);
        let r = DensityMatrix::from_probabilities(&[0.5, 0.25, 0.25]).unwrap();
        assert!((von_neumann_entropy(&r) - 1.5 * LN_2).abs() < 1e-14);
    }
}
