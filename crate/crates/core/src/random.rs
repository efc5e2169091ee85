//! Seeded random instances.
//!
//! All streams come from `SplitMix64` seeded with the user's 64-bit seed;
//! Gaussian deviates use `rand_distr::StandardNormal`. A given seed therefore
//! reproduces the same Hamiltonians and states on every platform.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::linalg::{ComplexMatrix, DensityMatrix, Hamiltonian};

pub type InstanceRng = SplitMix64;

pub fn seeded_rng(seed: u64) -> InstanceRng {
    SplitMix64::seed_from_u64(seed)
}

fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng))
}

/// GUE-style sample `H = (A + A^dagger)/2`.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let a = ginibre(d, rng);
    let mut h = (&a + &a.adjoint()).scale_real(0.5);
    h.symmetrize();
    h
}

/// GUE Hamiltonian rescaled so that `eps_max - Tr H / d = 1`, i.e. the
/// characteristic time scale of the dynamics is one. Dimension one and
/// degenerate draws are returned unscaled.
pub fn random_hamiltonian_unit_timescale(d: usize, rng: &mut impl Rng) -> Hamiltonian {
    let h = Hamiltonian::new(random_hermitian(d, rng)).expect("GUE sample is Hermitian");
    let rate = h.eps_max() - h.trace() / d as f64;
    if rate > 0.0 {
        h.scaled(1.0 / rate)
    } else {
        h
    }
}

/// Mixed state `G G^dagger / Tr(G G^dagger)` from a Ginibre matrix.
pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(d, rng);
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("Ginibre state is valid")
}

pub fn random_pure(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    DensityMatrix::pure(&v).expect("non-zero amplitudes")
}
