//! How many channel steps a reversal needs for a target accuracy.
//!
//! Entropies are in nats internally; the "missing information" `k` is in
//! bits, `S = ln dim - k ln 2`.

use std::f64::consts::LN_2;

use crate::error::{invalid, Result};
use crate::linalg::Hamiltonian;
use crate::stats::golden_section_min;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    KnownH,
    HighEntropy,
    ThermalWavepacket,
}

/// Estimated step count. `n_steps` is real-valued; round up only when a
/// protocol is actually run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexityEstimate {
    pub n_steps: f64,
    pub regime: Regime,
    pub eps: f64,
    pub tau_r: f64,
    pub tau_tilde: Option<f64>,
    pub dim: Option<f64>,
    pub rho_norm: f64,
    /// The estimate assumes `|sigma| << |rho|`; set when `|rho| dim < 10`,
    /// where that no longer clearly holds.
    pub assumption_doubtful: bool,
}

impl ComplexityEstimate {
    pub fn steps_ceil(&self) -> usize {
        self.n_steps.ceil().max(1.0) as usize
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(invalid(format!("{name} must be finite and positive, got {v}")));
    }
    Ok(())
}

/// `N = (|rho| / eps) (dim tau_r / tau_tilde)^2`.
pub fn n_epsilon_known_h(
    rho_norm: f64,
    eps: f64,
    dim: f64,
    tau_r: f64,
    tau_tilde: f64,
) -> Result<ComplexityEstimate> {
    check_positive("eps", eps)?;
    if eps > 1.0 {
        return Err(invalid(format!("accuracy eps must be at most 1, got {eps}")));
    }
    if !(0.0..=1.0).contains(&rho_norm) {
        return Err(invalid(format!("state norm must lie in [0, 1], got {rho_norm}")));
    }
    check_positive("dim", dim)?;
    check_positive("tau_r", tau_r)?;
    check_positive("tau_tilde", tau_tilde)?;
    let x = dim * tau_r / tau_tilde;
    Ok(ComplexityEstimate {
        n_steps: rho_norm / eps * x * x,
        regime: Regime::KnownH,
        eps,
        tau_r,
        tau_tilde: Some(tau_tilde),
        dim: Some(dim),
        rho_norm,
        assumption_doubtful: rho_norm * dim < 10.0,
    })
}

/// Natural timescale `1 / (eps_max - Tr H / dim)`.
pub fn timescale(h: &Hamiltonian) -> Result<f64> {
    let gap = h.eps_max() - h.trace() / h.dim() as f64;
    if !(gap > 0.0) {
        return Err(invalid("Hamiltonian with a flat spectrum has no timescale"));
    }
    Ok(1.0 / gap)
}

/// A state characterised only by its dimension and entropy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropySpec {
    dim: f64,
    entropy_nats: f64,
}

impl EntropySpec {
    pub fn new(dim: f64, entropy_nats: f64) -> Result<Self> {
        if !(dim >= 2.0) || !dim.is_finite() || dim.fract() != 0.0 {
            return Err(invalid(format!("dimension must be an integer >= 2, got {dim}")));
        }
        let max = dim.ln();
        if !entropy_nats.is_finite() || entropy_nats < 0.0 || entropy_nats > max * (1.0 + 1e-15) {
            return Err(invalid(format!("entropy {entropy_nats} outside [0, ln {dim}]")));
        }
        Ok(Self { dim, entropy_nats: entropy_nats.min(max) })
    }

    /// From the number of bits `k` the state falls short of maximal entropy.
    pub fn from_k_bits(dim: f64, k_bits: f64) -> Result<Self> {
        let log2_dim = dim.log2();
        if !k_bits.is_finite() || k_bits < 0.0 || k_bits > log2_dim * (1.0 + 1e-15) {
            return Err(invalid(format!("k = {k_bits} bits outside [0, log2 dim]")));
        }
        Self::new(dim, ((log2_dim - k_bits) * LN_2).max(0.0))
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    pub fn entropy_nats(&self) -> f64 {
        self.entropy_nats
    }

    pub fn k_bits(&self) -> f64 {
        ((self.dim.ln() - self.entropy_nats) / LN_2).max(0.0)
    }
}

/// Same as [`n_epsilon_known_h`] with `|rho|` replaced by `k / log2 dim`.
pub fn n_epsilon_high_entropy(spec: &EntropySpec, eps: f64, tau_r: f64, tau_tilde: f64) -> Result<ComplexityEstimate> {
    let rho_norm = (spec.k_bits() / spec.dim.log2()).min(1.0);
    let mut est = n_epsilon_known_h(rho_norm, eps, spec.dim, tau_r, tau_tilde)?;
    est.regime = Regime::HighEntropy;
    Ok(est)
}

/// `-x ln x - (1-x) ln(1-x)`.
pub fn binary_entropy(x: f64) -> f64 {
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    h(x) + h(1.0 - x)
}

fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Largest eigenvalue any state of dimension `dim` and entropy `S` can
/// have: the larger root of `S = H(p1) + (1 - p1) ln(dim - 1)`.
pub fn max_p1_exact(dim: f64, entropy_nats: f64) -> Result<f64> {
    let spec = EntropySpec::new(dim, entropy_nats)?;
    let s = spec.entropy_nats;
    let tail = (dim - 1.0).ln();
    let f = |p: f64| binary_entropy(p) + (1.0 - p) * tail - s;
    let (mut lo, mut hi) = (1.0 / dim, 1.0 - 1e-15);
    if f(lo) <= 0.0 {
        return Ok(lo);
    }
    if f(hi) >= 0.0 {
        return Ok(1.0);
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Brute-force counterpart of [`max_p1_exact`] for small dimensions.
///
/// For a trial `p1`, searches over all tails `p2..p_dim <= p1` summing to
/// `1 - p1` for the one with the largest entropy: a composition grid picks
/// the start, pairwise one-dimensional moves refine it. `p1` is feasible
/// when that entropy reaches `S`; bisection finds the largest feasible `p1`.
pub fn max_p1_oracle(dim: usize, entropy_nats: f64) -> Result<f64> {
    if !(2..=8).contains(&dim) {
        return Err(invalid(format!("oracle supports 2 <= dim <= 8, got {dim}")));
    }
    let spec = EntropySpec::new(dim as f64, entropy_nats)?;
    let s = spec.entropy_nats;
    let (mut lo, mut hi) = (1.0 / dim as f64, 1.0);
    if max_tail_entropy(dim, hi) >= s {
        return Ok(1.0);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if max_tail_entropy(dim, mid) >= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn max_tail_entropy(dim: usize, p1: f64) -> f64 {
    let m = dim - 1;
    let mass = 1.0 - p1;
    if mass > p1 * m as f64 + 1e-15 {
        // Tail cannot fit under the cap.
        return f64::NEG_INFINITY;
    }
    let grid = match m {
        1 => 1,
        2 | 3 => 24,
        4 | 5 => 14,
        _ => 10,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut parts = vec![0usize; m];
    compositions(grid, 0, &mut parts, &mut |c| {
        let tail: Vec<f64> = c.iter().map(|&u| mass * u as f64 / grid as f64).collect();
        if tail.iter().all(|&x| x <= p1 + 1e-15) {
            let h = shannon(&tail);
            if best.as_ref().is_none_or(|(b, _)| h > *b) {
                best = Some((h, tail));
            }
        }
    });
    let mut tail = match best {
        Some((_, t)) => t,
        None => {
            // Greedy fill: as many entries at the cap as fit.
            let mut left = mass;
            (0..m)
                .map(|_| {
                    let x = left.min(p1);
                    left -= x;
                    x
                })
                .collect()
        }
    };
    for _ in 0..200 {
        let before = shannon(&tail);
        for i in 0..m {
            for j in (i + 1)..m {
                let pair = tail[i] + tail[j];
                let lo = (pair - p1).max(0.0);
                let hi = pair.min(p1);
                if hi - lo <= 0.0 {
                    continue;
                }
                let neg = |x: f64| -(shannon(&[x]) + shannon(&[pair - x]));
                let x = golden_section_min(lo, hi, 1e-14, neg);
                if neg(x) < neg(tail[i]) {
                    tail[i] = x;
                    tail[j] = pair - x;
                }
            }
        }
        if shannon(&tail) - before <= 1e-15 {
            break;
        }
    }
    shannon(&[p1]) + shannon(&tail)
}

fn compositions(total: usize, idx: usize, parts: &mut [usize], f: &mut impl FnMut(&[usize])) {
    if idx + 1 == parts.len() {
        parts[idx] = total;
        f(parts);
        return;
    }
    for u in 0..=total {
        parts[idx] = u;
        compositions(total - u, idx + 1, parts, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_h_examples() {
        let e = n_epsilon_known_h(1.0, 0.01, 2.0, 1.0, 1.0).unwrap();
        assert!((e.n_steps - 400.0).abs() < 1e-9);
        assert_eq!(e.regime, Regime::KnownH);
        let e4 = n_epsilon_known_h(1.0, 0.01, 4.0, 1.0, 1.0).unwrap();
        assert!((e4.n_steps / e.n_steps - 4.0).abs() < 1e-12);
        assert!(n_epsilon_known_h(1.0, 0.0, 2.0, 1.0, 1.0).is_err());
        assert!(n_epsilon_known_h(1.0, 1.5, 2.0, 1.0, 1.0).is_err());
        assert!(e.assumption_doubtful);
        assert!(!n_epsilon_known_h(0.9, 0.01, 16.0, 1.0, 1.0).unwrap().assumption_doubtful);
    }

    #[test]
    fn high_entropy_examples() {
        let dim = 16.0;
        let pure = EntropySpec::from_k_bits(dim, 4.0).unwrap();
        let a = n_epsilon_high_entropy(&pure, 0.01, 1.0, 1.0).unwrap();
        let b = n_epsilon_known_h(1.0, 0.01, dim, 1.0, 1.0).unwrap();
        assert!((a.n_steps - b.n_steps).abs() < 1e-9 * b.n_steps);

        let mixed = EntropySpec::from_k_bits(dim, 0.0).unwrap();
        assert_eq!(n_epsilon_high_entropy(&mixed, 0.01, 1.0, 1.0).unwrap().n_steps, 0.0);

        let big = EntropySpec::from_k_bits(2f64.powi(20), 3.0).unwrap();
        let a = n_epsilon_high_entropy(&big, 0.01, 1.0, 1.0).unwrap();
        let b = n_epsilon_known_h(1.0, 0.01, 2f64.powi(20), 1.0, 1.0).unwrap();
        assert!((a.n_steps / b.n_steps - 0.15).abs() < 1e-12);
        assert!(n_epsilon_high_entropy(&big, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn entropy_spec_validation() {
        assert!(EntropySpec::new(1.0, 0.0).is_err());
        assert!(EntropySpec::new(4.0, 2.0).is_err());
        assert!(EntropySpec::new(4.0, -0.1).is_err());
        let s = EntropySpec::new(8.0, 8f64.ln()).unwrap();
        assert!(s.k_bits().abs() < 1e-15);
        let s = EntropySpec::from_k_bits(8.0, 1.0).unwrap();
        assert!((s.entropy_nats() - 2.0 * LN_2).abs() < 1e-15);
        assert!(EntropySpec::from_k_bits(8.0, 4.0).is_err());
    }

    #[test]
    fn max_p1_limits() {
        // The entropy is flat at the uniform point, so rounding in S moves
        // the root by ~sqrt(1e-16).
        for d in [2.0, 5.0, 64.0] {
            assert!((max_p1_exact(d, f64::ln(d)).unwrap() - 1.0 / d).abs() < 1e-7);
            assert!(max_p1_exact(d, 1e-12).unwrap() > 1.0 - 1e-9);
        }
        assert!(max_p1_exact(4.0, 2.0).is_err());
        assert!(max_p1_exact(1.0, 0.0).is_err());
    }

    #[test]
    fn max_p1_is_a_root() {
        let (d, s) = (10.0, 1.3);
        let p = max_p1_exact(d, s).unwrap();
        let resid = binary_entropy(p) + (1.0 - p) * 9f64.ln() - s;
        assert!(resid.abs() < 1e-11);
        assert!(p > 1.0 / d);
    }

    // Bisection on the binary entropy alone: the two-level problem has no tail.
    fn binary_root(s: f64) -> f64 {
        let (mut lo, mut hi) = (0.5, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if binary_entropy(mid) > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn two_level_case_matches_binary_entropy_root() {
        let root = binary_root(0.5);
        assert!((binary_entropy(root) - 0.5).abs() < 1e-12);
        assert!((root - 0.7997).abs() < 1e-3);
        assert!((max_p1_exact(2.0, 0.5).unwrap() - root).abs() < 1e-12);
        assert!((max_p1_oracle(2, 0.5).unwrap() - root).abs() < 1e-9);
        let half = max_p1_oracle(2, LN_2).unwrap();
        assert!((half - 0.5).abs() < 1e-7, "{half}");
    }

    #[test]
    fn oracle_agrees_with_exact_solver() {
        for d in [3usize, 4] {
            for s in [0.3, 0.8, (d as f64).ln() * 0.9] {
                let a = max_p1_oracle(d, s).unwrap();
                let b = max_p1_exact(d as f64, s).unwrap();
                assert!((a - b).abs() < 1e-3, "d={d} S={s}: {a} vs {b}");
            }
        }
        let a = max_p1_oracle(4, 3f64.ln()).unwrap();
        let b = max_p1_exact(4.0, 3f64.ln()).unwrap();
        assert!((a - b).abs() < 1e-3);
    }

    #[test]
    fn timescale_of_simple_spectra() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0]).unwrap();
        assert!((timescale(&h).unwrap() - 2.0).abs() < 1e-15);
        let flat = Hamiltonian::diagonal(&[1.0, 1.0]).unwrap();
        assert!(timescale(&flat).is_err());
    }
}
