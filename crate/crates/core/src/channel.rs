//! The partial-swap (LMR) channel.
//!
//! One step couples the system to a fresh ancilla copy `sigma` through
//! `exp(-i theta S)`, with `S` the swap, and traces the ancilla out:
//!
//! ```text
//! Phi[rho] = cos^2(theta) rho + sin^2(theta) sigma - i sin(theta) cos(theta) [sigma, rho]
//! ```
//!
//! Iterating `N` steps with `theta = omega * tau / N` approximates the
//! unitary `exp(-i omega tau sigma)` with an error of order `(omega tau)^2 / N`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::linalg::{
    eig_hermitian, enforce_hermitian, partial_trace_ancilla, spectral_norm, trace_distance, ComplexMatrix,
    DensityMatrix, Hamiltonian,
};
use crate::parallel::par_for_each_mut;

/// Above this per-step angle the small-rotation expansion gets poor.
pub const THETA_WARN: f64 = 0.1;

/// Swap on `C^d ⊗ C^d`: `S (|x> ⊗ |y>) = |y> ⊗ |x>`.
#[derive(Clone, Debug)]
pub struct SwapOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl SwapOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `exp(-i theta S) = cos(theta) I - i sin(theta) S`, using `S^2 = I`.
    pub fn unitary(&self, theta: f64) -> ComplexMatrix {
        let id = ComplexMatrix::identity(self.dim * self.dim).scale_real(theta.cos());
        &id + &self.matrix.scale(C64::new(0.0, -theta.sin()))
    }
}

pub fn build_swap(d: usize) -> Result<SwapOperator> {
    if d == 0 {
        return Err(invalid("swap dimension must be positive"));
    }
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for x in 0..d {
        for y in 0..d {
            m[(y * d + x, x * d + y)] = C64::new(1.0, 0.0);
        }
    }
    Ok(SwapOperator { dim: d, matrix: m })
}

/// One protocol run: rate, duration, step count and optional drift.
#[derive(Clone, Debug)]
pub struct LmrSchedule {
    omega: f64,
    tau: f64,
    n_steps: usize,
    drift: Option<Hamiltonian>,
}

impl LmrSchedule {
    pub fn new(omega: f64, tau: f64, n_steps: usize) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(invalid(format!("rate omega must be finite and non-negative, got {omega}")));
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(invalid(format!("duration tau must be finite and non-negative, got {tau}")));
        }
        if n_steps == 0 {
            return Err(invalid("step count must be at least 1"));
        }
        let sched = Self { omega, tau, n_steps, drift: None };
        let theta = sched.theta();
        if theta > FRAC_PI_2 {
            return Err(invalid(format!("per-step angle omega*dt = {theta} exceeds pi/2")));
        }
        if theta > THETA_WARN {
            log::warn!("per-step angle omega*dt = {theta:.3} is not small; expect large LMR error");
        }
        Ok(sched)
    }

    /// Apply forward evolution under `h` concurrently with the LMR steps.
    pub fn with_drift(mut self, h: Hamiltonian) -> Self {
        self.drift = Some(h);
        self
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn drift(&self) -> Option<&Hamiltonian> {
        self.drift.as_ref()
    }

    pub fn delta_t(&self) -> f64 {
        self.tau / self.n_steps as f64
    }

    pub fn theta(&self) -> f64 {
        self.omega * self.delta_t()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() > FRAC_PI_2 {
        return Err(invalid(format!("step angle must be finite with |theta| <= pi/2, got {theta}")));
    }
    Ok(())
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(invalid(format!("system dim {} != ancilla dim {}", rho.dim(), sigma.dim())));
    }
    Ok(())
}

fn step_matrix(rho: &ComplexMatrix, sigma: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let comm = sigma.commutator(rho);
    let a = rho.scale_real(c * c);
    let b = sigma.scale_real(s * s);
    let k = comm.scale(C64::new(0.0, -s * c));
    &(&a + &b) + &k
}

/// Closed-form single step.
pub fn lmr_step_exact(rho: &DensityMatrix, sigma: &DensityMatrix, theta: f64) -> Result<DensityMatrix> {
    check_dims(rho, sigma)?;
    check_theta(theta)?;
    Ok(DensityMatrix::from_channel_output(step_matrix(rho.matrix(), sigma.matrix(), theta)))
}

/// Single step by brute force: evolve `rho ⊗ sigma` under the swap
/// unitary on the `d^2`-dimensional joint space and trace out the ancilla.
pub fn lmr_step_joint(rho: &DensityMatrix, sigma: &DensityMatrix, theta: f64) -> Result<DensityMatrix> {
    check_dims(rho, sigma)?;
    check_theta(theta)?;
    let d = rho.dim();
    let u = build_swap(d)?.unitary(theta);
    let joint = rho.matrix().kron(sigma.matrix());
    let evolved = u.conjugate(&joint);
    Ok(DensityMatrix::from_channel_output(partial_trace_ancilla(&evolved, d)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostic {
    pub step: usize,
    pub trace_drift: f64,
    pub hermiticity_drift: f64,
    /// Trace distance to `exp(-i (omega sigma + H) t) rho0 exp(+i ...)`.
    pub distance_to_target: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct IterateOptions {
    /// Record a diagnostic every this many steps (and at the last step).
    pub diagnostics_every: Option<usize>,
    /// Allow the element-parallel kernel when `sigma` and the drift are
    /// both diagonal.
    pub parallel: bool,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self { diagnostics_every: None, parallel: true }
    }
}

/// `N` steps of the channel with a fresh copy of `sigma` each step.
///
/// With a drift `H`, each step is `exp(-i H dt/2) Phi exp(-i H dt/2)`
/// (as conjugations), a symmetric splitting of the drift around the kick.
pub fn lmr_iterate(
    rho0: &DensityMatrix,
    sigma: &DensityMatrix,
    sched: &LmrSchedule,
) -> Result<(DensityMatrix, Vec<StepDiagnostic>)> {
    lmr_iterate_with(rho0, sigma, sched, IterateOptions::default())
}

pub fn lmr_iterate_with(
    rho0: &DensityMatrix,
    sigma: &DensityMatrix,
    sched: &LmrSchedule,
    opts: IterateOptions,
) -> Result<(DensityMatrix, Vec<StepDiagnostic>)> {
    check_dims(rho0, sigma)?;
    if let Some(h) = sched.drift() {
        if h.dim() != rho0.dim() {
            return Err(invalid(format!("drift dim {} != system dim {}", h.dim(), rho0.dim())));
        }
    }
    if let Some(0) = opts.diagnostics_every {
        return Err(invalid("diagnostics interval must be positive"));
    }
    let commuting = sigma.matrix().is_diagonal() && sched.drift().is_none_or(|h| h.matrix().is_diagonal());
    let target = match opts.diagnostics_every {
        Some(_) => Some(TargetEvolution::new(rho0, sigma, sched)?),
        None => None,
    };
    if commuting {
        Ok(DiagonalKernel::new(sigma, sched).run(rho0, sched.n_steps(), opts, target.as_ref()))
    } else {
        dense_iterate(rho0, sigma, sched, opts, target.as_ref())
    }
}

struct TargetEvolution {
    generator: Hamiltonian,
    rho0: DensityMatrix,
    dt: f64,
}

impl TargetEvolution {
    fn new(rho0: &DensityMatrix, sigma: &DensityMatrix, sched: &LmrSchedule) -> Result<Self> {
        let mut g = sigma.matrix().scale_real(sched.omega());
        if let Some(h) = sched.drift() {
            g = &g + h.matrix();
        }
        Ok(Self { generator: Hamiltonian::new(g)?, rho0: rho0.clone(), dt: sched.delta_t() })
    }

    fn diagnostic(&self, step: usize, m: &ComplexMatrix, drift: f64) -> StepDiagnostic {
        let ideal = self.generator.evolve(&self.rho0, step as f64 * self.dt);
        let current = DensityMatrix::from_channel_output(m.clone());
        StepDiagnostic {
            step,
            trace_drift: (m.trace().re - 1.0).abs(),
            hermiticity_drift: drift,
            distance_to_target: trace_distance(&current, &ideal).unwrap_or(f64::NAN),
        }
    }
}

fn record_due(step: usize, n: usize, every: Option<usize>) -> bool {
    every.is_some_and(|e| step % e == 0 || step == n)
}

fn dense_iterate(
    rho0: &DensityMatrix,
    sigma: &DensityMatrix,
    sched: &LmrSchedule,
    opts: IterateOptions,
    target: Option<&TargetEvolution>,
) -> Result<(DensityMatrix, Vec<StepDiagnostic>)> {
    let theta = sched.theta();
    let half = sched.drift().map(|h| h.propagator(0.5 * sched.delta_t()));
    let mut rho = rho0.matrix().clone();
    let mut diags = Vec::new();
    let n = sched.n_steps();
    for step in 1..=n {
        if let Some(u) = &half {
            rho = u.conjugate(&rho);
        }
        rho = step_matrix(&rho, sigma.matrix(), theta);
        if let Some(u) = &half {
            rho = u.conjugate(&rho);
        }
        let drift = enforce_hermitian(&mut rho);
        if let (Some(t), true) = (target, record_due(step, n, opts.diagnostics_every)) {
            diags.push(t.diagnostic(step, &rho, drift));
        }
    }
    Ok((DensityMatrix::from_channel_output(rho), diags))
}

/// Element-wise form of the channel when `sigma` and the drift are diagonal.
///
/// Off-diagonal entries are multiplied by a fixed factor per step,
/// populations relax affinely towards `sigma`, so `k` steps compose in
/// closed form: `f^k` by repeated squaring and
/// `p <- cos^(2k) p + (1 - cos^(2k)) sigma`. Only the upper triangle is
/// propagated and mirrored, so the output is exactly Hermitian.
struct DiagonalKernel {
    dim: usize,
    /// `(i, j, factor)` for `i < j`.
    off: Vec<(usize, usize, C64)>,
    /// `ln cos^2 theta`.
    log_cos2: f64,
    sigma: Vec<f64>,
}

impl DiagonalKernel {
    fn new(sigma: &DensityMatrix, sched: &LmrSchedule) -> Self {
        let d = sigma.dim();
        let (s, c) = sched.theta().sin_cos();
        let dt = sched.delta_t();
        let sig: Vec<f64> = sigma.matrix().diag().iter().map(|z| z.re).collect();
        let energies: Vec<f64> = match sched.drift() {
            Some(h) => h.matrix().diag().iter().map(|z| z.re).collect(),
            None => vec![0.0; d],
        };
        let mut off = Vec::with_capacity(d * (d - 1) / 2);
        for i in 0..d {
            for j in (i + 1)..d {
                let kick = C64::new(c * c, -s * c * (sig[i] - sig[j]));
                let phase = C64::from_polar(1.0, -(energies[i] - energies[j]) * dt);
                off.push((i, j, phase * kick));
            }
        }
        Self { dim: d, off, log_cos2: (-s * s).ln_1p(), sigma: sig }
    }

    fn run(
        &self,
        rho0: &DensityMatrix,
        n: usize,
        opts: IterateOptions,
        target: Option<&TargetEvolution>,
    ) -> (DensityMatrix, Vec<StepDiagnostic>) {
        let m0 = rho0.matrix();
        let mut off: Vec<(C64, C64)> = self.off.iter().map(|&(i, j, f)| (m0[(i, j)], f)).collect();
        let mut pops: Vec<(f64, f64)> =
            (0..self.dim).map(|i| (m0[(i, i)].re, self.sigma[i])).collect();
        let a = self.log_cos2;
        let mut diags = Vec::new();

        match (opts.diagnostics_every, target) {
            (Some(every), Some(t)) => {
                let mut done = 0;
                while done < n {
                    let chunk = (every - done % every).min(n - done);
                    advance(&mut off, &mut pops, a, chunk, opts.parallel);
                    done += chunk;
                    if record_due(done, n, Some(every)) {
                        diags.push(t.diagnostic(done, &self.assemble(&off, &pops), 0.0));
                    }
                }
            }
            _ => advance(&mut off, &mut pops, a, n, opts.parallel),
        }
        (DensityMatrix::from_channel_output(self.assemble(&off, &pops)), diags)
    }

    fn assemble(&self, off: &[(C64, C64)], pops: &[(f64, f64)]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, &(p, _)) in pops.iter().enumerate() {
            m[(i, i)] = C64::new(p, 0.0);
        }
        for (&(i, j, _), &(z, _)) in self.off.iter().zip(off) {
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        m
    }
}

fn advance(off: &mut [(C64, C64)], pops: &mut [(f64, f64)], log_cos2: f64, steps: usize, parallel: bool) {
    if steps == 0 {
        return;
    }
    par_for_each_mut(off, parallel, |(z, f)| {
        let mut left = steps;
        while left > 0 {
            let k = left.min(u32::MAX as usize);
            *z *= f.powu(k as u32);
            left -= k;
        }
    });
    let x = steps as f64 * log_cos2;
    let (keep, relax) = (x.exp(), -x.exp_m1());
    for (p, sigma) in pops.iter_mut() {
        *p = keep * *p + relax * *sigma;
    }
}

/// Leading-order error matrix of `N` steps relative to the ideal unitary:
/// `((omega tau)^2 / N) (sigma + [sigma, [sigma, rho]]/2 - rho)`, evaluated
/// at the final state.
pub fn lmr_error_term(
    rho_final: &DensityMatrix,
    sigma: &DensityMatrix,
    omega_tau: f64,
    n: usize,
) -> Result<ComplexMatrix> {
    check_dims(rho_final, sigma)?;
    if n == 0 {
        return Err(invalid("step count must be at least 1"));
    }
    let (r, s) = (rho_final.matrix(), sigma.matrix());
    let double = s.commutator(&s.commutator(r)).scale_real(0.5);
    let inner = &(s - r) + &double;
    let mut out = inner.scale_real(omega_tau * omega_tau / n as f64);
    out.symmetrize();
    Ok(out)
}

/// Norm bound `((omega tau)^2 / N) (|sigma| + |rho| + 2 |rho| |sigma|^2)`.
pub fn lmr_error_bound(rho: &DensityMatrix, sigma: &DensityMatrix, omega_tau: f64, n: usize) -> Result<f64> {
    check_dims(rho, sigma)?;
    if n == 0 {
        return Err(invalid("step count must be at least 1"));
    }
    if !omega_tau.is_finite() {
        return Err(invalid("omega*tau must be finite"));
    }
    let ns = spectral_norm(sigma.matrix())?;
    let nr = spectral_norm(rho.matrix())?;
    Ok(omega_tau * omega_tau / n as f64 * (ns + nr + 2.0 * nr * ns * ns))
}

/// Exact target `exp(-i omega tau sigma) rho exp(+i omega tau sigma)`.
pub fn ideal_evolution(rho: &DensityMatrix, sigma: &DensityMatrix, omega_tau: f64) -> Result<DensityMatrix> {
    check_dims(rho, sigma)?;
    let eig = eig_hermitian(sigma.matrix())?;
    let u = eig.apply_fn(|l| C64::from_polar(1.0, -l * omega_tau));
    Ok(rho.conjugated(&u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian, seeded_rng};

    #[test]
    fn swap_small_dims() {
        assert_eq!(build_swap(1).unwrap().matrix(), &ComplexMatrix::identity(1));
        let s2 = build_swap(2).unwrap();
        let expected = ComplexMatrix::from_fn(4, 4, |i, j| {
            let perm = [0, 2, 1, 3];
            if perm[i] == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        });
        assert_eq!(s2.matrix(), &expected);
        let s3 = build_swap(3).unwrap();
        assert_eq!(s3.matrix().matmul(s3.matrix()), ComplexMatrix::identity(9));
        assert!(s3.matrix().is_hermitian(0.0));
        assert!(s3.matrix().as_slice().iter().all(|z| z.im == 0.0 && (z.re == 0.0 || z.re == 1.0)));
        assert!(build_swap(0).is_err());
    }

    #[test]
    fn swap_maps_basis_products() {
        let d = 3;
        let s = build_swap(d).unwrap();
        for x in 0..d {
            for y in 0..d {
                let col = x * d + y;
                let row = (0..d * d).find(|&r| s.matrix()[(r, col)].re == 1.0).unwrap();
                assert_eq!(row, y * d + x);
            }
        }
    }

    #[test]
    fn step_limits() {
        let mut rng = seeded_rng(21);
        let rho = random_density(3, &mut rng);
        let sigma = random_density(3, &mut rng);
        let same = lmr_step_exact(&rho, &sigma, 0.0).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) < 1e-16);
        let swapped = lmr_step_exact(&rho, &sigma, FRAC_PI_2).unwrap();
        assert!(swapped.matrix().max_abs_diff(sigma.matrix()) < 1e-15);
        let joint = lmr_step_joint(&rho, &sigma, FRAC_PI_2).unwrap();
        assert!(joint.matrix().max_abs_diff(sigma.matrix()) < 1e-15);
        assert!(lmr_step_joint(&rho, &sigma, 0.0).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn exact_matches_joint_oracle() {
        let mut rng = seeded_rng(22);
        let rho = random_density(2, &mut rng);
        let sigma = random_density(2, &mut rng);
        let a = lmr_step_exact(&rho, &sigma, 0.05).unwrap();
        let b = lmr_step_joint(&rho, &sigma, 0.05).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
        let rho = random_density(3, &mut rng);
        let sigma = random_density(3, &mut rng);
        let a = lmr_step_exact(&rho, &sigma, 0.3).unwrap();
        let b = lmr_step_joint(&rho, &sigma, 0.3).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
    }

    #[test]
    fn step_rejects_bad_input() {
        let rho = DensityMatrix::maximally_mixed(2);
        let sigma = DensityMatrix::maximally_mixed(3);
        assert!(lmr_step_exact(&rho, &sigma, 0.1).is_err());
        assert!(lmr_step_joint(&rho, &sigma, 0.1).is_err());
        assert!(lmr_step_exact(&rho, &rho, 2.0).is_err());
        assert!(lmr_step_exact(&rho, &rho, f64::NAN).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(LmrSchedule::new(1.0, 1.0, 0).is_err());
        assert!(LmrSchedule::new(-1.0, 1.0, 10).is_err());
        assert!(LmrSchedule::new(1.0, f64::NAN, 10).is_err());
        assert!(LmrSchedule::new(100.0, 1.0, 10).is_err());
        let s = LmrSchedule::new(2.0, 1.5, 7).unwrap();
        assert!((s.delta_t() * 7.0 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn iterate_identity_cases() {
        let mut rng = seeded_rng(23);
        let rho = random_density(2, &mut rng);
        let sigma = random_density(2, &mut rng);
        let sched = LmrSchedule::new(0.0, 1.0, 1).unwrap();
        let (out, diags) = lmr_iterate(&rho, &sigma, &sched).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-16);
        assert!(diags.is_empty());
    }

    #[test]
    fn iterate_qubit_against_exact_conjugation() {
        // sigma = |0><0|, rho = |+><+|: the leading error term has norm
        // 0.559 * (omega tau)^2 / N.
        let sigma = DensityMatrix::from_probabilities(&[1.0, 0.0]).unwrap();
        let h = C64::new(0.5, 0.0);
        let rho = DensityMatrix::new(ComplexMatrix::from_vec(2, 2, vec![h, h, h, h]).unwrap()).unwrap();
        let ideal = ideal_evolution(&rho, &sigma, 0.5).unwrap();
        let err = |n: usize| {
            let sched = LmrSchedule::new(0.5, 1.0, n).unwrap();
            let (out, _) = lmr_iterate(&rho, &sigma, &sched).unwrap();
            trace_distance(&out, &ideal).unwrap()
        };
        let (e100, e1000) = (err(100), err(1000));
        let predicted = 0.25 / 1000.0 * (0.25f64 + 0.0625).sqrt();
        assert!((e1000 - predicted).abs() <= 0.02 * predicted, "{e1000} vs {predicted}");
        assert!((e100 / e1000 - 10.0).abs() <= 1.5);
    }

    #[test]
    fn dense_and_diagonal_paths_agree() {
        let mut rng = seeded_rng(24);
        let h = Hamiltonian::new(random_hermitian(3, &mut rng)).unwrap();
        let rho = random_density(3, &mut rng);
        // sigma diagonal in H's eigenbasis; compare the basis-rotated
        // diagonal path with the dense path in the original basis.
        let sig_diag = [0.5, 0.3, 0.2];
        let sigma_e = DensityMatrix::from_probabilities(&sig_diag).unwrap();
        let sigma = DensityMatrix::new(h.from_eigenbasis(sigma_e.matrix())).unwrap();
        let h_e = Hamiltonian::diagonal(h.eigenvalues()).unwrap();
        let sched = LmrSchedule::new(3.0, 0.8, 400).unwrap();
        let (dense, _) = lmr_iterate(&rho, &sigma, &sched.clone().with_drift(h.clone())).unwrap();
        let rho_e = DensityMatrix::new(h.to_eigenbasis(rho.matrix())).unwrap();
        let (diag, _) = lmr_iterate(&rho_e, &sigma_e, &sched.with_drift(h_e)).unwrap();
        let back = h.from_eigenbasis(diag.matrix());
        assert!(back.max_abs_diff(dense.matrix()) < 1e-11);
    }

    #[test]
    fn diagnostics_recorded() {
        let mut rng = seeded_rng(25);
        let rho = random_density(2, &mut rng);
        let sigma = random_density(2, &mut rng);
        let sched = LmrSchedule::new(1.0, 1.0, 100).unwrap();
        let opts = IterateOptions { diagnostics_every: Some(25), parallel: false };
        let (out, diags) = lmr_iterate_with(&rho, &sigma, &sched, opts).unwrap();
        assert_eq!(diags.iter().map(|d| d.step).collect::<Vec<_>>(), vec![25, 50, 75, 100]);
        assert!(diags.iter().all(|d| d.trace_drift < 1e-13 && d.distance_to_target < 0.02));
        let (plain, _) = lmr_iterate(&rho, &sigma, &sched).unwrap();
        assert_eq!(out, plain);
    }

    #[test]
    fn error_term_and_bound_examples() {
        let mut rng = seeded_rng(26);
        let sigma = random_density(2, &mut rng);
        let z = lmr_error_term(&sigma, &sigma, 0.7, 10).unwrap();
        assert!(z.max_abs() < 1e-15);
        let rho = random_density(2, &mut rng);
        assert!(lmr_error_term(&rho, &sigma, 0.0, 10).unwrap().max_abs() == 0.0);
        assert!(lmr_error_term(&rho, &sigma, 0.3, 0).is_err());
        assert_eq!(lmr_error_bound(&rho, &sigma, 0.0, 5).unwrap(), 0.0);
        let t = lmr_error_term(&rho, &sigma, 0.3, 300).unwrap();
        assert!(t.trace().norm() < 1e-12);

        // pure rho, sigma = I/d
        let d = 3.0;
        let pure = DensityMatrix::from_probabilities(&[1.0, 0.0, 0.0]).unwrap();
        let flat = DensityMatrix::maximally_mixed(3);
        let b = lmr_error_bound(&pure, &flat, 0.4, 50).unwrap();
        let expected = 0.16 / 50.0 * (1.0 / d + 1.0 + 2.0 / (d * d));
        assert!((b - expected).abs() < 1e-15);
    }
}
