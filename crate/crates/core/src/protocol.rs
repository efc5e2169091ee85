//! Time reversal driven by the partial-swap channel.
//!
//! Two ancilla preparations are supported. The complement ancilla
//! `sigma = (eps_max I - H) / Z` needs `H` explicitly; the thermal ancilla
//! `sigma = exp(-beta H) / Z_beta` only needs a bath and a copy of the
//! system. In both cases the channel generates `exp(+i c H tau)` for some
//! positive `c`, which runs the system backwards once `omega` is large
//! enough to outpace the system's own forward evolution.

use num_complex::Complex64 as C64;

use crate::channel::{lmr_error_bound, lmr_iterate_with, IterateOptions, LmrSchedule};
use crate::error::{invalid, Error, Result};
use crate::linalg::{signed_norms, trace_distance, ComplexMatrix, DensityMatrix, Hamiltonian};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaKind {
    Complement,
    Thermal,
}

/// Ancilla state together with how it was prepared.
#[derive(Clone, Debug)]
pub struct AncillaSpec {
    sigma: DensityMatrix,
    kind: AncillaKind,
    normalization: f64,
    beta: Option<f64>,
    energy_shift: f64,
    eps_max: f64,
}

impl AncillaSpec {
    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn kind(&self) -> AncillaKind {
        self.kind
    }

    /// `Z` for the complement ancilla, `Z_beta` for the thermal one.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// Constant added to `H` before preparation (thermal ancillas are built
    /// from the Hamiltonian with its ground energy moved to zero).
    pub fn energy_shift(&self) -> f64 {
        self.energy_shift
    }

    /// Largest eigenvalue of the (shifted) Hamiltonian used to prepare the
    /// ancilla.
    pub fn eps_max(&self) -> f64 {
        self.eps_max
    }

    /// Backward rate per unit `omega`: `1/Z`, or `beta/Z_beta` for the
    /// high-temperature linearization of the thermal state.
    pub fn backward_rate(&self) -> f64 {
        match self.kind {
            AncillaKind::Complement => 1.0 / self.normalization,
            AncillaKind::Thermal => self.beta.unwrap_or(0.0) / self.normalization,
        }
    }
}

/// `sigma = (eps_max I - H) / Z` with `Z = eps_max dim - Tr H`.
pub fn build_sigma_complement(h: &Hamiltonian) -> Result<AncillaSpec> {
    let eps_max = h.eps_max();
    let gaps: Vec<f64> = h.eigenvalues().iter().map(|l| eps_max - l).collect();
    let z: f64 = gaps.iter().sum();
    let scale = h.eigenvalues().iter().map(|l| l.abs()).fold(0.0, f64::max);
    if !(z > 1e-14 * h.dim() as f64 * scale) {
        return Err(Error::DegenerateHamiltonian { z });
    }
    let sigma = h.apply_fn(|l| C64::new((eps_max - l) / z, 0.0));
    Ok(AncillaSpec {
        sigma: DensityMatrix::from_channel_output(sigma),
        kind: AncillaKind::Complement,
        normalization: z,
        beta: None,
        energy_shift: 0.0,
        eps_max,
    })
}

/// Gibbs state `exp(-beta H) / Z_beta` of the ground-shifted Hamiltonian.
pub fn build_sigma_thermal(h: &Hamiltonian, beta: f64) -> Result<AncillaSpec> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(invalid(format!("inverse temperature must be finite and >= 0, got {beta}")));
    }
    let (shifted, shift) = h.ground_shifted();
    let z = shifted.partition_function(beta);
    let sigma = shifted.apply_fn(|e| C64::new((-beta * e).exp() / z, 0.0));
    Ok(AncillaSpec {
        sigma: DensityMatrix::from_channel_output(sigma),
        kind: AncillaKind::Thermal,
        normalization: z,
        beta: Some(beta),
        energy_shift: shift,
        eps_max: shifted.eps_max(),
    })
}

/// Minimum rate for actual reversal: `Z` (complement) or `Z_beta / beta`
/// (thermal), with `hbar = 1`.
pub fn threshold_rate(ancilla: &AncillaSpec) -> Result<f64> {
    match ancilla.kind {
        AncillaKind::Complement => Ok(ancilla.normalization),
        AncillaKind::Thermal => match ancilla.beta {
            Some(b) if b > 0.0 => Ok(ancilla.normalization / b),
            _ => Err(Error::InfiniteThreshold),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReversalRun {
    pub omega: f64,
    /// Wall duration of the protocol.
    pub tau: f64,
    pub n_steps: usize,
    /// Let the system keep evolving under `H` while the protocol runs.
    pub drift: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversalReport {
    pub kind: AncillaKind,
    /// Backward delay produced by the channel alone, `omega * rate * tau`.
    pub tau_requested: f64,
    pub tau_protocol: f64,
    /// Backward delay net of drift; negative means the system still moved
    /// forward.
    pub net_backward_shift: f64,
    /// Spectral norm of `rho_out - rho(t - net_backward_shift)`.
    pub error_measured: f64,
    /// Largest (signed) eigenvalue of the same difference.
    pub error_max_eigenvalue: f64,
    pub error_bound: f64,
    pub trace_distance_to_target: f64,
    pub n_steps: usize,
    pub omega: f64,
    pub threshold_omega: f64,
    pub drift_enabled: bool,
    /// `net_backward_shift > 0`.
    pub reversal: bool,
    pub energy_shift: f64,
}

/// Run the reversal protocol on `rho_t` and compare with exact backward
/// evolution by the net shift.
///
/// The iteration runs in the eigenbasis of `H`, where both ancilla kinds
/// and the drift are diagonal; ancillas that do not commute with `H` fall
/// back to the dense path in the original basis.
pub fn run_reversal(
    rho_t: &DensityMatrix,
    h: &Hamiltonian,
    ancilla: &AncillaSpec,
    run: &ReversalRun,
) -> Result<(DensityMatrix, ReversalReport)> {
    run_reversal_with(rho_t, h, ancilla, run, IterateOptions::default())
}

/// [`run_reversal`] with explicit iteration options.
pub fn run_reversal_with(
    rho_t: &DensityMatrix,
    h: &Hamiltonian,
    ancilla: &AncillaSpec,
    run: &ReversalRun,
    opts: IterateOptions,
) -> Result<(DensityMatrix, ReversalReport)> {
    let d = rho_t.dim();
    if h.dim() != d || ancilla.sigma.dim() != d {
        return Err(invalid(format!(
            "dimension mismatch: state {d}, Hamiltonian {}, ancilla {}",
            h.dim(),
            ancilla.sigma.dim()
        )));
    }
    let sched = LmrSchedule::new(run.omega, run.tau, run.n_steps)?;

    let sigma_e = h.to_eigenbasis(ancilla.sigma.matrix());
    let commutes = (0..d).all(|i| (0..d).all(|j| i == j || sigma_e[(i, j)].norm() <= 1e-12));
    let rho_out = if commutes {
        let pops: Vec<f64> = sigma_e.diag().iter().map(|z| z.re).collect();
        let sigma_diag = DensityMatrix::from_channel_output(ComplexMatrix::from_diag(&pops));
        let rho_e = DensityMatrix::from_channel_output(h.to_eigenbasis(rho_t.matrix()));
        let mut sched_e = sched;
        if run.drift {
            sched_e = sched_e.with_drift(Hamiltonian::diagonal(h.eigenvalues())?);
        }
        let (out_e, _) = lmr_iterate_with(&rho_e, &sigma_diag, &sched_e, opts)?;
        DensityMatrix::from_channel_output(h.from_eigenbasis(out_e.matrix()))
    } else {
        let mut sched = sched;
        if run.drift {
            sched = sched.with_drift(h.clone());
        }
        lmr_iterate_with(rho_t, &ancilla.sigma, &sched, opts)?.0
    };

    let rate = ancilla.backward_rate();
    let tau_requested = run.omega * rate * run.tau;
    let net = tau_requested - if run.drift { run.tau } else { 0.0 };
    let target = h.evolve(rho_t, -net);
    let norms = signed_norms(&(rho_out.matrix() - target.matrix()))?;
    let threshold_omega = match threshold_rate(ancilla) {
        Ok(t) if run.drift => t,
        Ok(_) => 0.0,
        Err(Error::InfiniteThreshold) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let error_bound = match ancilla.kind {
        AncillaKind::Complement => lmr_error_bound(rho_t, &ancilla.sigma, run.omega * run.tau, run.n_steps)?,
        AncillaKind::Thermal => thermal_error_bound_at_rate(
            target.norm(),
            ancilla.normalization,
            run.n_steps,
            run.tau,
            ancilla.beta.unwrap_or(0.0),
            ancilla.eps_max,
            run.omega,
        )?,
    };
    let report = ReversalReport {
        kind: ancilla.kind,
        tau_requested,
        tau_protocol: run.tau,
        net_backward_shift: net,
        error_measured: norms.spectral,
        error_max_eigenvalue: norms.max_eigenvalue,
        error_bound,
        trace_distance_to_target: trace_distance(&rho_out, &target)?,
        n_steps: run.n_steps,
        omega: run.omega,
        threshold_omega,
        drift_enabled: run.drift,
        reversal: net > 0.0,
        energy_shift: ancilla.energy_shift,
    };
    Ok((rho_out, report))
}

/// Leading deviation of the thermal protocol from ideal reversal at
/// `omega = 2 omega_th`: `-i tau beta [H^2, rho]`, with `H` ground-shifted.
pub fn delta_rho2_thermal(rho: &DensityMatrix, h: &Hamiltonian, beta: f64, tau: f64) -> Result<ComplexMatrix> {
    if h.dim() != rho.dim() {
        return Err(invalid("dimension mismatch between state and Hamiltonian"));
    }
    let (shifted, _) = h.ground_shifted();
    let h2 = shifted.apply_fn(|e| C64::new(e * e, 0.0));
    let mut out = h2.commutator(rho.matrix()).scale(C64::new(0.0, -tau * beta));
    out.symmetrize();
    Ok(out)
}

/// The two contributions to the thermal-protocol error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalBound {
    /// Channel discretization, `4 Z_beta^2 / N (tau/beta)^2 |rho|`.
    pub lmr: f64,
    /// High-temperature expansion, `(tau/beta) (beta eps_max)^2 |rho|`.
    pub expansion: f64,
}

impl ThermalBound {
    pub fn total(&self) -> f64 {
        self.lmr + self.expansion
    }
}

pub fn thermal_error_bound_parts(
    rho_norm: f64,
    z_beta: f64,
    n: usize,
    tau: f64,
    beta: f64,
    eps_max: f64,
) -> Result<ThermalBound> {
    if n == 0 {
        return Err(invalid("step count must be at least 1"));
    }
    for (name, v) in [("rho_norm", rho_norm), ("z_beta", z_beta), ("tau", tau), ("beta", beta), ("eps_max", eps_max)] {
        if !v.is_finite() || v < 0.0 {
            return Err(invalid(format!("{name} must be finite and non-negative, got {v}")));
        }
    }
    if tau == 0.0 {
        return Ok(ThermalBound { lmr: 0.0, expansion: 0.0 });
    }
    if beta == 0.0 {
        return Ok(ThermalBound { lmr: f64::INFINITY, expansion: 0.0 });
    }
    let ratio = tau / beta;
    Ok(ThermalBound {
        lmr: 4.0 * z_beta * z_beta / n as f64 * ratio * ratio * rho_norm,
        expansion: ratio * (beta * eps_max).powi(2) * rho_norm,
    })
}

/// Net error bound of the thermal protocol at `omega = 2 omega_th`.
pub fn thermal_error_bound(rho_norm: f64, z_beta: f64, n: usize, tau: f64, beta: f64, eps_max: f64) -> Result<f64> {
    Ok(thermal_error_bound_parts(rho_norm, z_beta, n, tau, beta, eps_max)?.total())
}

/// Same bound for an arbitrary rate: the channel term is `(omega tau)^2/N`
/// and the expansion term scales with `omega / (2 omega_th)`. Reduces to
/// [`thermal_error_bound`] at `omega = 2 Z_beta / beta`.
pub fn thermal_error_bound_at_rate(
    rho_norm: f64,
    z_beta: f64,
    n: usize,
    tau: f64,
    beta: f64,
    eps_max: f64,
    omega: f64,
) -> Result<f64> {
    let parts = thermal_error_bound_parts(rho_norm, z_beta, n, tau, beta, eps_max)?;
    if beta == 0.0 || tau == 0.0 {
        return Ok(parts.total());
    }
    let rate_factor = omega * beta / (2.0 * z_beta);
    Ok(parts.lmr * rate_factor * rate_factor + parts.expansion * rate_factor)
}

/// Minimizer of the thermal bound over `beta` with `Z_beta` held at `z`:
/// `beta eps_max = (8 z^2 eps_max tau / N)^(1/3)`.
pub fn optimal_beta_frozen(z: f64, eps_max: f64, n: usize, tau: f64) -> f64 {
    beta_star(z, eps_max, n as f64, tau)
}

pub(crate) fn beta_star(z: f64, eps_max: f64, n: f64, tau: f64) -> f64 {
    (8.0 * z * z * eps_max * tau / n).cbrt() / eps_max
}

/// Self-consistent optimum when `Z_beta` depends on `beta`: damped
/// fixed-point iteration from `z_initial`.
pub fn optimal_beta_with(
    z_of_beta: impl Fn(f64) -> f64,
    z_initial: f64,
    eps_max: f64,
    n: usize,
    tau: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(invalid("step count must be at least 1"));
    }
    beta_fixed_point(z_of_beta, z_initial, eps_max, n as f64, tau)
}

pub(crate) fn beta_fixed_point(
    z_of_beta: impl Fn(f64) -> f64,
    z_initial: f64,
    eps_max: f64,
    n: f64,
    tau: f64,
) -> Result<f64> {
    const MAX_ITER: usize = 100;
    const TOL: f64 = 1e-10;
    if !(n >= 1.0) || !(tau > 0.0) || !(eps_max > 0.0) || !(z_initial > 0.0) {
        return Err(invalid("optimal beta needs n >= 1 and positive tau, eps_max, Z"));
    }
    let mut beta = beta_star(z_initial, eps_max, n, tau);
    for _ in 0..MAX_ITER {
        let next = 0.5 * beta + 0.5 * beta_star(z_of_beta(beta), eps_max, n, tau);
        if !next.is_finite() {
            break;
        }
        if (next - beta).abs() <= TOL * beta {
            return Ok(next);
        }
        beta = next;
    }
    Err(Error::NoConvergence { what: "optimal beta fixed point", iterations: MAX_ITER })
}

/// Optimal bath temperature for a reversal of duration `tau` with `n` steps.
pub fn optimal_beta(h: &Hamiltonian, n: usize, tau: f64) -> Result<f64> {
    let (shifted, _) = h.ground_shifted();
    optimal_beta_with(|b| shifted.partition_function(b), h.dim() as f64, shifted.eps_max(), n, tau)
}

/// `3 (z^2/N)^(1/3) (eps_max tau)^(4/3) |rho|`.
pub fn net_accuracy_frozen(z: f64, eps_max: f64, n: usize, tau: f64, rho_norm: f64) -> f64 {
    accuracy_at(z, eps_max, n as f64, tau, rho_norm)
}

pub(crate) fn accuracy_at(z: f64, eps_max: f64, n: f64, tau: f64, rho_norm: f64) -> f64 {
    3.0 * (z * z / n).cbrt() * (eps_max * tau).powf(4.0 / 3.0) * rho_norm
}

/// Net accuracy at the self-consistent optimal temperature.
pub fn net_accuracy(h: &Hamiltonian, n: usize, tau: f64, rho_norm: f64) -> Result<f64> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    let (shifted, _) = h.ground_shifted();
    let beta = optimal_beta(h, n, tau)?;
    Ok(net_accuracy_frozen(shifted.partition_function(beta), shifted.eps_max(), n, tau, rho_norm))
}

/// Split of a state into parts below and above an energy cut.
#[derive(Clone, Debug)]
pub struct EnergyTruncation {
    pub rho_low: DensityMatrix,
    pub rho_high: Option<DensityMatrix>,
    /// Weight above the cut, `Tr((1 - P) rho)`.
    pub eps_e: f64,
    /// `(dE / (E_cut - E_mean))^2`.
    pub chebyshev_bound: f64,
    pub mean_energy: f64,
    pub energy_std: f64,
    /// Columns: eigenvectors of `H` below the cut.
    basis: ComplexMatrix,
    kept_energies: Vec<f64>,
}

impl EnergyTruncation {
    pub fn rank(&self) -> usize {
        self.kept_energies.len()
    }

    /// `rho_low` and `H` restricted to the low-energy subspace.
    pub fn low_subspace(&self) -> Result<(DensityMatrix, Hamiltonian)> {
        let small = self.basis.adjoint().matmul(self.rho_low.matrix()).matmul(&self.basis);
        Ok((DensityMatrix::from_channel_output(small), Hamiltonian::diagonal(&self.kept_energies)?))
    }

    /// Map an operator on the low-energy subspace back to the full space.
    pub fn embed(&self, small: &DensityMatrix) -> Result<DensityMatrix> {
        if small.dim() != self.rank() {
            return Err(invalid("embedded state has the wrong dimension"));
        }
        Ok(DensityMatrix::from_channel_output(self.basis.conjugate(small.matrix())))
    }
}

pub fn energy_truncate(rho: &DensityMatrix, h: &Hamiltonian, e_max_cut: f64) -> Result<EnergyTruncation> {
    let d = rho.dim();
    if h.dim() != d {
        return Err(invalid("dimension mismatch between state and Hamiltonian"));
    }
    if !e_max_cut.is_finite() {
        return Err(invalid("energy cut must be finite"));
    }
    let energies = h.eigenvalues();
    let rho_e = h.to_eigenbasis(rho.matrix());
    let pops: Vec<f64> = rho_e.diag().iter().map(|z| z.re).collect();
    let mean: f64 = pops.iter().zip(energies).map(|(p, e)| p * e).sum();
    if e_max_cut <= mean {
        return Err(invalid(format!("energy cut {e_max_cut} must exceed the mean energy {mean}")));
    }
    let var: f64 = pops.iter().zip(energies).map(|(p, e)| p * (e - mean).powi(2)).sum::<f64>().max(0.0);
    let keep: Vec<bool> = energies.iter().map(|&e| e < e_max_cut).collect();
    let p_low: f64 = pops.iter().zip(&keep).filter(|(_, &k)| k).map(|(p, _)| p).sum();
    let eps_e: f64 = pops.iter().zip(&keep).filter(|(_, &k)| !k).map(|(p, _)| p).sum::<f64>().clamp(0.0, 1.0);
    if !(p_low > 0.0) {
        return Err(Error::EmptySubspace);
    }

    let block = |inside: bool, weight: f64| {
        let m = ComplexMatrix::from_fn(d, d, |i, j| {
            if keep[i] == inside && keep[j] == inside { rho_e[(i, j)] / weight } else { C64::new(0.0, 0.0) }
        });
        DensityMatrix::from_channel_output(h.from_eigenbasis(&m))
    };
    let rho_low = block(true, p_low);
    let rho_high = (eps_e > 1e-14).then(|| block(false, eps_e));

    let kept_idx: Vec<usize> = (0..d).filter(|&i| keep[i]).collect();
    let v = h.eigenvectors();
    let basis = ComplexMatrix::from_fn(d, kept_idx.len(), |i, k| v[(i, kept_idx[k])]);
    let chebyshev_bound = if var > 0.0 { var / (e_max_cut - mean).powi(2) } else { 0.0 };
    Ok(EnergyTruncation {
        rho_low,
        rho_high,
        eps_e,
        chebyshev_bound,
        mean_energy: mean,
        energy_std: var.sqrt(),
        basis,
        kept_energies: kept_idx.iter().map(|&i| energies[i]).collect(),
    })
}
