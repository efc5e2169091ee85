//! Free particle with a Lorentzian packet, `psi(p) ~ exp(-|p| xi0)`, on a
//! truncated momentum grid.
//!
//! In the momentum basis the free Hamiltonian `p^2 / 2m` is diagonal, so
//! forward evolution is exact and any error in the refocused packet comes
//! from the reversal protocol alone. Widths are measured in position space
//! through the discrete transform dual to the grid.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::channel::{lmr_iterate_with, IterateOptions, LmrSchedule};
use crate::complexity::{ComplexityEstimate, Regime};
use crate::error::{invalid, Error, Result};
use crate::linalg::{DensityMatrix, Hamiltonian};
use crate::protocol::{accuracy_at, beta_fixed_point, build_sigma_thermal, run_reversal_with, ReversalReport, ReversalRun};

/// Smallest allowed `p_max * xi0`. At this cutoff the amplitude is already
/// `e^-3`; larger values need more grid points to keep the position box wide
/// enough for a spread packet.
pub const MIN_CUTOFF_PRODUCT: f64 = 3.0;

/// Inverse-participation width of the continuum packet at `t = 0`,
/// in units of `xi0`: `(int n)^2 / int n^2` for `n ~ (x^2 + xi0^2)^-2`.
const IPR_CALIBRATION: f64 = 0.8 * PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavePacketConfig {
    pub xi0: f64,
    pub mass: f64,
    pub grid_points: usize,
    pub p_max: f64,
}

impl Default for WavePacketConfig {
    fn default() -> Self {
        Self { xi0: 1.0, mass: 1.0, grid_points: 32, p_max: 5.0 }
    }
}

impl WavePacketConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("xi0", self.xi0), ("mass", self.mass), ("p_max", self.p_max)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if !(8..=128).contains(&self.grid_points) || self.grid_points % 2 != 0 {
            return Err(invalid(format!("grid_points must be even and in 8..=128, got {}", self.grid_points)));
        }
        if self.p_max * self.xi0 < MIN_CUTOFF_PRODUCT {
            return Err(invalid(format!(
                "momentum cutoff does not resolve the packet: p_max*xi0 = {} < {MIN_CUTOFF_PRODUCT}",
                self.p_max * self.xi0
            )));
        }
        Ok(())
    }

    pub fn momentum_step(&self) -> f64 {
        2.0 * self.p_max / self.grid_points as f64
    }

    /// `p_j = (j - d/2) dp`, from `-p_max` up to `p_max - dp`.
    pub fn momentum_grid(&self) -> Vec<f64> {
        let d = self.grid_points as i64;
        let dp = self.momentum_step();
        (0..d).map(|j| (j - d / 2) as f64 * dp).collect()
    }

    /// Period of the position grid dual to the momentum grid.
    pub fn box_length(&self) -> f64 {
        2.0 * PI / self.momentum_step()
    }

    /// Analytic mean energy `1 / (4 m xi0^2)`.
    pub fn mean_energy(&self) -> f64 {
        1.0 / (4.0 * self.mass * self.xi0 * self.xi0)
    }

    pub fn spread(&self, tau: f64) -> SpreadEstimate {
        let xi_tau = tau / (self.mass * self.xi0);
        SpreadEstimate { xi_tau, ratio: xi_tau / self.xi0, mean_energy: self.mean_energy() }
    }
}

/// Typical size after free flight, `xi_tau = tau / (m xi0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadEstimate {
    pub xi_tau: f64,
    /// `xi_tau / xi0 = 4 E tau`.
    pub ratio: f64,
    pub mean_energy: f64,
}

pub fn build_packet_state(cfg: &WavePacketConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let amps: Vec<C64> = cfg.momentum_grid().iter().map(|p| C64::new((-p.abs() * cfg.xi0).exp(), 0.0)).collect();
    DensityMatrix::pure(&amps)
}

pub fn free_hamiltonian(cfg: &WavePacketConfig) -> Result<Hamiltonian> {
    cfg.validate()?;
    let energies: Vec<f64> = cfg.momentum_grid().iter().map(|p| p * p / (2.0 * cfg.mass)).collect();
    Hamiltonian::diagonal(&energies)
}

/// Probability of each position-grid point, `x_k = (k - d/2) L / d`.
///
/// `n(x) = (1/d) sum_{l,m} rho_lm exp(i (p_l - p_m) x)` only depends on the
/// sums of `rho` along its diagonals, so the profile costs `O(d^2)`.
pub fn position_density(rho: &DensityMatrix, cfg: &WavePacketConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let d = cfg.grid_points;
    if rho.dim() != d {
        return Err(invalid(format!("state dim {} does not match grid {d}", rho.dim())));
    }
    let m = rho.matrix();
    // diag[k] holds offset k - (d - 1), i.e. l - m from -(d-1) to d-1.
    let diag: Vec<C64> = (0..2 * d - 1)
        .map(|k| {
            let off = k as i64 - (d as i64 - 1);
            (0..d as i64)
                .filter_map(|col| {
                    let row = col + off;
                    (0..d as i64).contains(&row).then(|| m[(row as usize, col as usize)])
                })
                .sum()
        })
        .collect();
    let dp = cfg.momentum_step();
    let dx = cfg.box_length() / d as f64;
    Ok((0..d)
        .map(|k| {
            let x = (k as f64 - (d / 2) as f64) * dx;
            let s: C64 = diag
                .iter()
                .enumerate()
                .map(|(i, c)| c * C64::from_polar(1.0, (i as f64 - (d as f64 - 1.0)) * dp * x))
                .sum();
            (s.re / d as f64).max(0.0)
        })
        .collect())
}

/// Calibrated inverse-participation width: `(sum n)^2 / sum n^2` grid
/// points times the spacing, scaled so the ideal `t = 0` packet gives
/// `xi0`.
pub fn spread_width(rho: &DensityMatrix, cfg: &WavePacketConfig) -> Result<f64> {
    let n = position_density(rho, cfg)?;
    let rank = rho.eigenvalues().iter().filter(|&&l| l > 1e-10).count();
    if rank > cfg.grid_points / 2 {
        log::warn!("state has rank {rank} on a {}-point grid; width is unreliable", cfg.grid_points);
    }
    let total: f64 = n.iter().sum();
    let sq: f64 = n.iter().map(|v| v * v).sum();
    let dx = cfg.box_length() / cfg.grid_points as f64;
    Ok(total * total / sq * dx / IPR_CALIBRATION)
}

/// Continuum estimate `Z_beta ~ tau sqrt(E / beta)` of the statistical sum
/// over the volume the packet spreads into; prefactor set to one.
pub fn wavepacket_z_beta(cfg: &WavePacketConfig, tau: f64, beta: f64) -> f64 {
    tau * (cfg.mean_energy() / beta).sqrt()
}

/// `sum_n exp(-beta (2 pi n / L)^2 / 2m)` for a box of length
/// `L = xi_tau`.
pub fn discrete_z_beta(cfg: &WavePacketConfig, tau: f64, beta: f64) -> f64 {
    let l = cfg.spread(tau).xi_tau;
    let k = 2.0 * PI / l;
    let term = |n: f64| (-beta * (k * n).powi(2) / (2.0 * cfg.mass)).exp();
    let mut z = term(0.0);
    let mut n = 1.0;
    loop {
        let t = term(n);
        z += 2.0 * t;
        if t < 1e-17 * z {
            return z;
        }
        n += 1.0;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavepacketComplexity {
    /// `N ~ eps^-4 (xi_tau/xi0)^7`.
    pub estimate: ComplexityEstimate,
    /// `beta ~ eps / (E xi_tau/xi0)`.
    pub beta_opt: f64,
    /// Same reversal with the state known in advance, `N' ~ (xi_tau/xi0)/eps`.
    pub known_state_steps: f64,
    pub ratio: f64,
}

pub fn wavepacket_complexity(cfg: &WavePacketConfig, tau: f64, eps: f64) -> Result<WavepacketComplexity> {
    cfg.validate()?;
    check_tau_eps(tau, eps)?;
    let r = cfg.spread(tau).ratio;
    let n = r.powi(7) / eps.powi(4);
    Ok(WavepacketComplexity {
        estimate: ComplexityEstimate {
            n_steps: n,
            regime: Regime::ThermalWavepacket,
            eps,
            tau_r: tau,
            tau_tilde: None,
            dim: None,
            rho_norm: 1.0,
            assumption_doubtful: false,
        },
        beta_opt: eps / (cfg.mean_energy() * r),
        known_state_steps: r / eps,
        ratio: r,
    })
}

fn check_tau_eps(tau: f64, eps: f64) -> Result<()> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(invalid(format!("tau must be finite and positive, got {tau}")));
    }
    if !eps.is_finite() || eps <= 0.0 || eps > 1.0 {
        return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

/// Step count and temperature from the general thermal-protocol bound,
/// with `Z_beta = tau sqrt(E/beta)`, the energy scale set to `E` and a pure
/// state: the smallest `N` whose optimized accuracy reaches `eps`.
pub fn wavepacket_machinery(cfg: &WavePacketConfig, tau: f64, eps: f64) -> Result<(f64, f64)> {
    cfg.validate()?;
    check_tau_eps(tau, eps)?;
    let e = cfg.mean_energy();
    let z = |b: f64| wavepacket_z_beta(cfg, tau, b);
    let solve = |n: f64| -> Result<(f64, f64)> {
        let beta = beta_fixed_point(z, z(1.0 / e), e, n, tau)?;
        Ok((accuracy_at(z(beta), e, n, tau, 1.0), beta))
    };
    let (mut lo, mut hi) = (0.0f64, 700.0f64);
    if solve(lo.exp())?.0 <= eps {
        return Ok((1.0, solve(1.0)?.1));
    }
    if solve(hi.exp())?.0 > eps {
        return Err(invalid("accuracy target is out of reach"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if solve(mid.exp())?.0 > eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let n = hi.exp();
    Ok((n, solve(n)?.1))
}

#[derive(Clone, Copy, Debug)]
pub struct DemoOptions {
    /// Width samples recorded during the protocol (besides the start).
    pub trace_points: usize,
    /// Cap on the estimated cost, in complex element updates.
    pub budget: f64,
    pub parallel: bool,
}

impl Default for DemoOptions {
    fn default() -> Self {
        Self { trace_points: 16, budget: 1e9, parallel: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WidthSample {
    pub step: usize,
    pub width: f64,
}

#[derive(Clone, Debug)]
pub struct RefocusDemo {
    pub initial_width: f64,
    /// Width after free flight for `tau`, before the protocol starts.
    pub spread_width: f64,
    /// Width after exact backward evolution by `tau`.
    pub baseline_width: f64,
    pub trace: Vec<WidthSample>,
    pub final_width: f64,
    pub report: ReversalReport,
    /// `final_width <= 1.5 xi0`.
    pub refocused: bool,
}

/// Estimated element updates for the refocus demo.
pub fn demo_cost(cfg: &WavePacketConfig, n_steps: usize, trace_points: usize) -> f64 {
    let d = cfg.grid_points as f64;
    let per_run = d * d * ((n_steps.max(1) as f64).log2().ceil() + 2.0);
    per_run * (trace_points as f64 + 2.0) + 8.0 * d * d * d
}

/// Spread the packet freely for `tau`, then run the thermal protocol for
/// the same duration and watch the width.
///
/// At `omega = 2 Z_beta / beta` the net backward shift equals `tau`, so a
/// good run brings the width back to about `xi0`; below threshold the
/// packet keeps spreading.
pub fn demo_spread_and_refocus(
    cfg: &WavePacketConfig,
    tau: f64,
    omega: f64,
    n_steps: usize,
    beta: f64,
    opts: &DemoOptions,
) -> Result<RefocusDemo> {
    cfg.validate()?;
    if !tau.is_finite() || tau < 0.0 {
        return Err(invalid(format!("tau must be finite and non-negative, got {tau}")));
    }
    let estimate = demo_cost(cfg, n_steps, opts.trace_points);
    if estimate > opts.budget {
        return Err(Error::BudgetExceeded { estimate, budget: opts.budget });
    }
    let h = free_hamiltonian(cfg)?;
    let rho0 = build_packet_state(cfg)?;
    let rho_t = h.evolve(&rho0, tau);
    let ancilla = build_sigma_thermal(&h, beta)?;
    let iter_opts = IterateOptions { diagnostics_every: None, parallel: opts.parallel };

    let initial_width = spread_width(&rho0, cfg)?;
    let spread = spread_width(&rho_t, cfg)?;
    let baseline_width = spread_width(&h.evolve(&rho_t, -tau), cfg)?;

    let points = opts.trace_points.clamp(1, n_steps.max(1));
    let dt = tau / n_steps.max(1) as f64;
    let mut trace = vec![WidthSample { step: 0, width: spread }];
    let mut state = rho_t.clone();
    let mut done = 0usize;
    for k in 1..=points {
        let target = ((k as u128 * n_steps as u128) / points as u128) as usize;
        let chunk = target - done;
        if chunk == 0 {
            continue;
        }
        let sched = LmrSchedule::new(omega, dt * chunk as f64, chunk)?.with_drift(h.clone());
        state = lmr_iterate_with(&state, ancilla.sigma(), &sched, iter_opts)?.0;
        done = target;
        trace.push(WidthSample { step: done, width: spread_width(&state, cfg)? });
    }

    let run = ReversalRun { omega, tau, n_steps, drift: true };
    let (out, report) = run_reversal_with(&rho_t, &h, &ancilla, &run, iter_opts)?;
    let final_width = spread_width(&out, cfg)?;
    Ok(RefocusDemo {
        initial_width,
        spread_width: spread,
        baseline_width,
        trace,
        final_width,
        report,
        refocused: final_width <= 1.5 * cfg.xi0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::threshold_rate;

    fn cfg(d: usize, p_max: f64) -> WavePacketConfig {
        WavePacketConfig { xi0: 1.0, mass: 1.0, grid_points: d, p_max }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(32, 5.0).validate().is_ok());
        assert!(cfg(32, 2.0).validate().is_err());
        assert!(cfg(6, 5.0).validate().is_err());
        assert!(cfg(33, 5.0).validate().is_err());
        assert!(cfg(256, 5.0).validate().is_err());
        assert!(WavePacketConfig { mass: 0.0, ..cfg(32, 5.0) }.validate().is_err());
    }

    #[test]
    fn packet_is_symmetric_and_pure() {
        let c = cfg(32, 5.0);
        let rho = build_packet_state(&c).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        let d = c.grid_points;
        let m = rho.matrix();
        // p_j and -p_j sit at j and d - j.
        for j in 1..d / 2 {
            assert!((m[(j, j)] - m[(d - j, d - j)]).norm() < 1e-15);
        }
    }

    #[test]
    fn discrete_mean_energy_approaches_analytic() {
        let c = WavePacketConfig { p_max: 8.0, grid_points: 128, ..Default::default() };
        let rho = build_packet_state(&c).unwrap();
        let e = free_hamiltonian(&c).unwrap().mean_energy(&rho);
        assert!((e / c.mean_energy() - 1.0).abs() < 0.1, "{e}");
    }

    #[test]
    fn free_hamiltonian_is_the_parabola() {
        let c = cfg(16, 4.0);
        let h = free_hamiltonian(&c).unwrap();
        let grid = c.momentum_grid();
        assert_eq!(grid[8], 0.0);
        assert_eq!(h.matrix()[(8, 8)].re, 0.0);
        for (j, p) in grid.iter().enumerate() {
            assert!((h.matrix()[(j, j)].re - p * p / 2.0).abs() < 1e-15);
        }
        assert!((h.eps_max() - 8.0).abs() < 1e-15);
    }

    #[test]
    fn position_density_is_normalized() {
        let c = cfg(32, 5.0);
        let n = position_density(&build_packet_state(&c).unwrap(), &c).unwrap();
        assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Peak at the origin, symmetric around it.
        let mid = c.grid_points / 2;
        assert!(n.iter().all(|&v| v <= n[mid] + 1e-15));
        for k in 1..mid {
            assert!((n[mid + k] - n[mid - k]).abs() < 1e-14);
        }
    }

    #[test]
    fn initial_width_is_xi0() {
        for (d, p_max) in [(32, 5.0), (64, 3.0), (64, 8.0)] {
            let c = cfg(d, p_max);
            let w = spread_width(&build_packet_state(&c).unwrap(), &c).unwrap();
            assert!((w - 1.0).abs() < 0.15, "d={d} p_max={p_max}: {w}");
        }
    }

    #[test]
    fn exact_round_trip_restores_width() {
        let c = cfg(32, 5.0);
        let h = free_hamiltonian(&c).unwrap();
        let rho = build_packet_state(&c).unwrap();
        let w0 = spread_width(&rho, &c).unwrap();
        let back = h.evolve(&h.evolve(&rho, 3.0), -3.0);
        assert!((spread_width(&back, &c).unwrap() - w0).abs() < 1e-10);
    }

    #[test]
    fn forward_flight_conserves_energy() {
        let c = cfg(64, 3.0);
        let h = free_hamiltonian(&c).unwrap();
        let rho = build_packet_state(&c).unwrap();
        let e0 = h.mean_energy(&rho);
        assert!((h.mean_energy(&h.evolve(&rho, 7.0)) - e0).abs() < 1e-10);
    }

    #[test]
    fn spread_estimate_relations() {
        let c = WavePacketConfig { xi0: 0.7, mass: 2.0, ..cfg(32, 5.0) };
        let s = c.spread(3.0);
        assert!((s.ratio - 4.0 * s.mean_energy * 3.0).abs() < 1e-12);
        assert!((s.xi_tau - 3.0 / (2.0 * 0.7)).abs() < 1e-12);
    }

    #[test]
    fn z_beta_scalings_and_discrete_sum() {
        let c = cfg(32, 5.0);
        let z = |t, b| wavepacket_z_beta(&c, t, b);
        assert!((z(2.0, 0.3) / z(1.0, 0.3) - 2.0).abs() < 1e-12);
        assert!((z(1.0, 0.4) / z(1.0, 0.1) - 0.5).abs() < 1e-12);
        let tau = 10.0 / (4.0 * c.mean_energy());
        for be in [0.1, 0.3, 1.0] {
            let beta = be / c.mean_energy();
            let ratio = discrete_z_beta(&c, tau, beta) / z(tau, beta);
            assert!((1.0 / 3.0..=3.0).contains(&ratio), "beta E = {be}: {ratio}");
        }
    }

    #[test]
    fn complexity_examples() {
        let c = cfg(32, 5.0);
        // ratio 2 means tau = 2 / (4 E) = 2 with m = xi0 = 1.
        let w = wavepacket_complexity(&c, 2.0, 0.5).unwrap();
        assert!((w.ratio - 2.0).abs() < 1e-12);
        assert!((w.estimate.n_steps - 2048.0).abs() < 1e-9);
        let q = w.estimate.n_steps / w.known_state_steps;
        assert!((q - 0.5f64.powi(-3) * 2f64.powi(6)).abs() < 1e-9);
        assert!((w.beta_opt - 0.5 / (0.25 * 2.0)).abs() < 1e-12);
        assert!(wavepacket_complexity(&c, 2.0, 0.0).is_err());
        assert!(wavepacket_complexity(&c, 0.0, 0.5).is_err());
    }

    #[test]
    fn machinery_matches_closed_form() {
        let c = cfg(32, 5.0);
        let e = c.mean_energy();
        for (tau, eps) in [(4.0, 0.1), (12.0, 0.05), (30.0, 0.2)] {
            let (n, beta) = wavepacket_machinery(&c, tau, eps).unwrap();
            let closed = 40.5 * (e * tau).powi(7) / eps.powi(4);
            assert!((n / closed - 1.0).abs() < 1e-6, "{n} vs {closed}");
            assert!((beta / (eps / (1.5 * e * e * tau)) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn demo_refuses_over_budget() {
        let c = cfg(32, 5.0);
        let opts = DemoOptions { budget: 10.0, ..Default::default() };
        assert!(matches!(
            demo_spread_and_refocus(&c, 3.0, 10.0, 1000, 0.1, &opts),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn demo_below_threshold_keeps_spreading() {
        let c = cfg(32, 5.0);
        let tau = 3.0;
        let beta = 0.1 / (c.mean_energy() * 3.0);
        let h = free_hamiltonian(&c).unwrap();
        let th = threshold_rate(&build_sigma_thermal(&h, beta).unwrap()).unwrap();
        let d = demo_spread_and_refocus(&c, tau, 0.5 * th, 1 << 16, beta, &DemoOptions::default()).unwrap();
        assert!(!d.report.reversal);
        assert!(d.final_width > d.spread_width);
        assert!(!d.refocused);
        assert!((d.baseline_width - d.initial_width).abs() < 1e-10);
        assert_eq!(d.trace.last().unwrap().step, 1 << 16);
    }
}
