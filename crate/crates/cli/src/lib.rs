//! Command-line experiments for the reversal protocol.
//!
//! Every subcommand builds its instances from `--seed` alone, runs its
//! points on a worker pool and writes the records in input order, so the
//! same arguments always give the same data rows.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use timerev_core::channel::{ideal_evolution, lmr_error_bound, lmr_iterate, LmrSchedule};
use timerev_core::complexity::{max_p1_exact, n_epsilon_high_entropy, n_epsilon_known_h, EntropySpec};
use timerev_core::linalg::{spectral_norm, trace_distance, Hamiltonian};
use timerev_core::parallel::{par_map, with_threads};
use timerev_core::protocol::{
    build_sigma_complement, build_sigma_thermal, delta_rho2_thermal, optimal_beta, run_reversal, threshold_rate,
    thermal_error_bound, AncillaSpec, ReversalRun,
};
use timerev_core::random::{random_density, random_hamiltonian_unit_timescale, random_hermitian, seeded_rng};
use timerev_core::stats::loglog_slope;
use timerev_core::wavepacket::{demo_cost, demo_spread_and_refocus, wavepacket_complexity, DemoOptions, WavePacketConfig};
use timerev_core::Error;

pub mod output;

use output::{render, Clock, Format, Record};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_REVERSAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const COLUMNS_HELP: &str = "\
Output columns (CSV header order; JSON objects use the same keys):
  reverse:        experiment,seed,dim,ancilla,beta,omega_mult,tau,n,omega,threshold_omega,
                  net_backward_shift,reversal,error_measured,error_max_eigenvalue,error_bound,
                  trace_distance_to_target,trace_distance_to_initial,timestamp,runtime_ms
  sweep-n:        experiment,seed,dim,omega_tau,n,error_measured,error_bound,trace_distance,
                  timestamp,runtime_ms
  thermal-sweep:  experiment,seed,dim,tau,n,beta,omega_mult,omega,infinite_threshold,error_measured,
                  error_bound,eq12_bound,delta_rho2_norm,bound_argmin,optimal_beta,timestamp,runtime_ms
  entropy-bound:  experiment,dim,k_bits,eps,tau_r,tau_tilde,out_of_regime,p1_exact,p1_approx,
                  n_bound,n_exact_norm,timestamp,runtime_ms
  wavepacket:     experiment,grid,p_max,xi0,mass,ratio,tau,eps,beta,omega,n,step,width,
                  initial_width,spread_width,final_width,refocused,error_measured,error_bound,
                  timestamp,runtime_ms

Floats carry 17 significant digits. With --deterministic, timestamp and runtime_ms are 0.
Exit codes: 0 success, 1 error, 2 no reversal (rate below threshold), 64 usage.";

#[derive(Debug, Parser)]
#[command(name = "timerev", version, about = "Time-reversal experiments with iterated partial-swap channels", after_long_help = COLUMNS_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Refuse runs whose estimated cost exceeds this many scalar operations.
    #[arg(long, default_value_t = 1e9, global = true)]
    pub budget: f64,
    /// Zero the timestamp and runtime columns.
    #[arg(long, global = true)]
    pub deterministic: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a random state forward for tau, then run the protocol for tau.
    Reverse(ReverseArgs),
    /// Channel error against the ideal unitary over a list of step counts.
    SweepN(SweepNArgs),
    /// Thermal-ancilla error and bounds over a list of temperatures.
    ThermalSweep(ThermalArgs),
    /// Largest eigenvalue at fixed entropy and the high-entropy step bound.
    EntropyBound(EntropyArgs),
    /// Spread a wave packet and refocus it with a thermal ancilla.
    Wavepacket(WavepacketArgs),
}

#[derive(Debug, Args)]
pub struct ReverseArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rate as a multiple of the threshold rate.
    #[arg(long, default_value_t = 2.0)]
    pub omega_mult: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Step counts (comma separated or repeated).
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    pub n: Vec<usize>,
    /// Use a thermal ancilla at this inverse temperature instead of the
    /// complement ancilla.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Switch off the system's own evolution during the protocol.
    #[arg(long)]
    pub no_drift: bool,
}

#[derive(Debug, Args)]
pub struct SweepNArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub omega_tau: f64,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256,512,1024")]
    pub n: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct ThermalArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, value_delimiter = ',', default_value = "100000")]
    pub n: Vec<usize>,
    /// Inverse temperatures, in units of the inverse bandwidth.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
          default_value = "0.01,0.0158,0.0251,0.0398,0.0631,0.1,0.158,0.251,0.398,0.631,1")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub omega_mult: f64,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Hilbert-space dimensions.
    #[arg(long, value_delimiter = ',', default_value = "1048576")]
    pub dim: Vec<f64>,
    /// Bits below maximal entropy.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub k: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau_r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau_tilde: f64,
}

#[derive(Debug, Args)]
pub struct WavepacketArgs {
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[arg(long, default_value_t = 5.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub xi0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Spread ratio xi_tau / xi0 reached before the protocol starts.
    #[arg(long, default_value_t = 3.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Inverse temperature; defaults to the optimum for `--eps`.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub omega_mult: f64,
    #[arg(long, value_delimiter = ',', default_value = "33554432")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    pub trace_points: usize,
}

/// Failure of a command, mapped to an exit code by [`run`].
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Error(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e.to_string())
    }
}

/// Records plus whether any run failed to reverse.
pub struct Outcome {
    pub records: Vec<Record>,
    pub no_reversal: bool,
}

/// Parse `args`, run the command and write its output. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let clock = Clock::new(cli.common.deterministic);
    let outcome = with_threads(cli.common.threads, || execute(&cli.command, &cli.common, clock));
    let outcome = match outcome {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_ERROR;
        }
    };
    let text = render(&outcome.records, cli.common.format);
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return EXIT_ERROR;
    }
    if outcome.no_reversal {
        eprintln!("summary: no reversal (rate at or below threshold)");
        EXIT_NO_REVERSAL
    } else {
        EXIT_OK
    }
}

pub fn execute(cmd: &Command, common: &Common, clock: Clock) -> Result<Outcome, Failure> {
    match cmd {
        Command::Reverse(a) => cmd_reverse(a, common, clock),
        Command::SweepN(a) => cmd_sweep_n(a, common, clock),
        Command::ThermalSweep(a) => cmd_thermal_sweep(a, common, clock),
        Command::EntropyBound(a) => cmd_entropy_bound(a, clock),
        Command::Wavepacket(a) => cmd_wavepacket(a, common, clock),
    }
}

fn positive_dim(dim: usize) -> Result<(), Failure> {
    if dim == 0 {
        return Err(Failure::Usage("--dim must be at least 1".into()));
    }
    Ok(())
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<(), Failure> {
    if v.is_empty() {
        return Err(Failure::Usage(format!("--{name} needs at least one value")));
    }
    Ok(())
}

/// Scalar operations for `n` channel steps on a `d`-dimensional state:
/// `d^3` per dense step, or a closed-form `d^2 log2 n` when the ancilla
/// and the drift share an eigenbasis.
pub fn step_cost(d: usize, n: usize, commuting: bool) -> f64 {
    let d = d as f64;
    if commuting {
        d * d * ((n.max(1) as f64).log2().ceil() + 2.0) + 8.0 * d * d * d
    } else {
        d * d * d * n as f64
    }
}

fn check_budget(cost: f64, budget: f64) -> Result<(), Failure> {
    if cost > budget {
        return Err(Error::BudgetExceeded { estimate: cost, budget }.into());
    }
    Ok(())
}

fn cmd_reverse(a: &ReverseArgs, common: &Common, clock: Clock) -> Result<Outcome, Failure> {
    positive_dim(a.dim)?;
    nonempty("n", &a.n)?;
    let mut rng = seeded_rng(a.seed);
    let h = random_hamiltonian_unit_timescale(a.dim, &mut rng);
    let rho0 = random_density(a.dim, &mut rng);
    let rho_t = h.evolve(&rho0, a.tau);
    let (ancilla, kind): (AncillaSpec, &str) = match a.beta {
        None => (build_sigma_complement(&h)?, "complement"),
        Some(b) => (build_sigma_thermal(&h, b)?, "thermal"),
    };
    let threshold = threshold_rate(&ancilla)?;
    let omega = a.omega_mult * threshold;
    for &n in &a.n {
        check_budget(step_cost(a.dim, n, true), common.budget)?;
    }
    let results = par_map(&a.n, |&n| {
        let t0 = clock.start();
        let run = ReversalRun { omega, tau: a.tau, n_steps: n, drift: !a.no_drift };
        run_reversal(&rho_t, &h, &ancilla, &run).and_then(|(out, rep)| {
            let rec = Record::new("reverse")
                .with("seed", a.seed)
                .with("dim", a.dim)
                .with("ancilla", kind)
                .with("beta", a.beta.unwrap_or(f64::NAN))
                .with("omega_mult", a.omega_mult)
                .with("tau", a.tau)
                .with("n", n)
                .with("omega", omega)
                .with("threshold_omega", rep.threshold_omega)
                .with("net_backward_shift", rep.net_backward_shift)
                .with("reversal", rep.reversal)
                .with("error_measured", rep.error_measured)
                .with("error_max_eigenvalue", rep.error_max_eigenvalue)
                .with("error_bound", rep.error_bound)
                .with("trace_distance_to_target", rep.trace_distance_to_target)
                .with("trace_distance_to_initial", trace_distance(&out, &rho0)?);
            Ok((clock.stamp(rec, t0), rep.reversal || a.tau == 0.0))
        })
    });
    let mut records = Vec::with_capacity(results.len());
    let mut no_reversal = false;
    for r in results {
        let (rec, ok) = r?;
        no_reversal |= !ok;
        records.push(rec);
    }
    Ok(Outcome { records, no_reversal })
}

fn cmd_sweep_n(a: &SweepNArgs, common: &Common, clock: Clock) -> Result<Outcome, Failure> {
    positive_dim(a.dim)?;
    if a.n.len() < 3 {
        return Err(Failure::Error(Error::InvalidInput("sweep-n needs at least 3 step counts".into()).to_string()));
    }
    if !a.omega_tau.is_finite() || a.omega_tau < 0.0 {
        return Err(Failure::Usage("--omega-tau must be finite and non-negative".into()));
    }
    let mut rng = seeded_rng(a.seed);
    let rho = random_density(a.dim, &mut rng);
    let sigma = random_density(a.dim, &mut rng);
    let ideal = ideal_evolution(&rho, &sigma, a.omega_tau)?;
    for &n in &a.n {
        check_budget(step_cost(a.dim, n, false), common.budget)?;
    }
    let results = par_map(&a.n, |&n| -> timerev_core::Result<(Record, f64)> {
        let t0 = clock.start();
        let sched = LmrSchedule::new(a.omega_tau, 1.0, n)?;
        let (out, _) = lmr_iterate(&rho, &sigma, &sched)?;
        let err = spectral_norm(&(out.matrix() - ideal.matrix()))?;
        let rec = Record::new("sweep-n")
            .with("seed", a.seed)
            .with("dim", a.dim)
            .with("omega_tau", a.omega_tau)
            .with("n", n)
            .with("error_measured", err)
            .with("error_bound", lmr_error_bound(&rho, &sigma, a.omega_tau, n)?)
            .with("trace_distance", trace_distance(&out, &ideal)?);
        Ok((clock.stamp(rec, t0), err))
    });
    let mut records = Vec::new();
    let mut errs = Vec::new();
    for r in results {
        let (rec, e) = r?;
        records.push(rec);
        errs.push(e);
    }
    if errs.iter().all(|&e| e > 0.0) {
        let x: Vec<f64> = a.n.iter().map(|&n| n as f64).collect();
        eprintln!("summary: log-log slope of error vs N = {:.4}", loglog_slope(&x, &errs));
    } else {
        eprintln!("summary: zero error at some N; slope not fitted");
    }
    Ok(Outcome { records, no_reversal: false })
}

/// GUE Hamiltonian shifted to a zero ground energy and scaled to unit
/// bandwidth, so `beta` is measured in units of `1 / eps_max`.
pub fn thermal_instance(dim: usize, seed: u64) -> (Hamiltonian, timerev_core::DensityMatrix) {
    let mut rng = seeded_rng(seed);
    let raw = Hamiltonian::new(random_hermitian(dim, &mut rng)).expect("GUE sample is Hermitian");
    let (g, _) = raw.ground_shifted();
    let h = if g.eps_max() > 0.0 { g.scaled(1.0 / g.eps_max()) } else { g };
    let rho0 = random_density(dim, &mut rng);
    (h, rho0)
}

fn cmd_thermal_sweep(a: &ThermalArgs, common: &Common, clock: Clock) -> Result<Outcome, Failure> {
    if a.dim < 2 {
        return Err(Failure::Usage("--dim must be at least 2".into()));
    }
    nonempty("n", &a.n)?;
    nonempty("beta", &a.beta)?;
    if let Some(b) = a.beta.iter().find(|b| !b.is_finite() || **b < 0.0) {
        return Err(Error::InvalidInput(format!("inverse temperature must be finite and >= 0, got {b}")).into());
    }
    let (h, rho0) = thermal_instance(a.dim, a.seed);
    let rho_t = h.evolve(&rho0, a.tau);
    for &n in &a.n {
        check_budget(step_cost(a.dim, n, true), common.budget)?;
    }
    let points: Vec<(usize, f64)> = a.n.iter().flat_map(|&n| a.beta.iter().map(move |&b| (n, b))).collect();
    let results = par_map(&points, |&(n, beta)| -> timerev_core::Result<(Record, f64, f64)> {
        let t0 = clock.start();
        let base = Record::new("thermal-sweep")
            .with("seed", a.seed)
            .with("dim", a.dim)
            .with("tau", a.tau)
            .with("n", n)
            .with("beta", beta)
            .with("omega_mult", a.omega_mult);
        let anc = build_sigma_thermal(&h, beta)?;
        let threshold = match threshold_rate(&anc) {
            Ok(t) => t,
            Err(Error::InfiniteThreshold) => {
                let rec = base
                    .with("omega", f64::INFINITY)
                    .with("infinite_threshold", true)
                    .with("error_measured", f64::NAN)
                    .with("error_bound", f64::INFINITY)
                    .with("eq12_bound", f64::INFINITY)
                    .with("delta_rho2_norm", 0.0);
                return Ok((rec, f64::INFINITY, clock.elapsed_ms(t0)));
            }
            Err(e) => return Err(e),
        };
        let omega = a.omega_mult * threshold;
        let run = ReversalRun { omega, tau: a.tau, n_steps: n, drift: true };
        let (_, rep) = run_reversal(&rho_t, &h, &anc, &run)?;
        let target = h.evolve(&rho_t, -rep.net_backward_shift);
        let eq12 = thermal_error_bound(target.norm(), anc.normalization(), n, a.tau, beta, anc.eps_max())?;
        let d2 = spectral_norm(&delta_rho2_thermal(&target, &h, beta, a.tau)?)?;
        let rec = base
            .with("omega", omega)
            .with("infinite_threshold", false)
            .with("error_measured", rep.error_measured)
            .with("error_bound", rep.error_bound)
            .with("eq12_bound", eq12)
            .with("delta_rho2_norm", d2);
        Ok((rec, eq12, clock.elapsed_ms(t0)))
    });
    let mut rows = Vec::new();
    for r in results {
        rows.push(r?);
    }
    let mut records = Vec::with_capacity(rows.len());
    for &n in &a.n {
        let opt = optimal_beta(&h, n, a.tau)?;
        let group: Vec<usize> = (0..points.len()).filter(|&i| points[i].0 == n).collect();
        let argmin = group.iter().copied().min_by(|&i, &j| rows[i].1.total_cmp(&rows[j].1));
        for &i in &group {
            let (rec, _, ms) = &rows[i];
            let rec = rec.clone().with("bound_argmin", Some(i) == argmin).with("optimal_beta", opt);
            records.push((i, clock.stamp_ms(rec, *ms)));
        }
        if let Some(i) = argmin {
            eprintln!("summary: N = {n}: bound minimized at beta = {} (optimal beta {opt:.6})", points[i].1);
        }
    }
    records.sort_by_key(|(i, _)| *i);
    let records = records.into_iter().map(|(_, r)| r).collect();
    Ok(Outcome { records, no_reversal: false })
}

fn cmd_entropy_bound(a: &EntropyArgs, clock: Clock) -> Result<Outcome, Failure> {
    nonempty("dim", &a.dim)?;
    nonempty("k", &a.k)?;
    let points: Vec<(f64, f64)> = a.dim.iter().flat_map(|&d| a.k.iter().map(move |&k| (d, k))).collect();
    let results = par_map(&points, |&(dim, k)| -> timerev_core::Result<Record> {
        let t0 = clock.start();
        let base = Record::new("entropy-bound")
            .with("dim", dim)
            .with("k_bits", k)
            .with("eps", a.eps)
            .with("tau_r", a.tau_r)
            .with("tau_tilde", a.tau_tilde);
        if !(dim >= 2.0) || k < 0.0 || k > dim.log2() {
            let rec = base
                .with("out_of_regime", true)
                .with("p1_exact", f64::NAN)
                .with("p1_approx", f64::NAN)
                .with("n_bound", f64::NAN)
                .with("n_exact_norm", f64::NAN);
            return Ok(clock.stamp(rec, t0));
        }
        let spec = EntropySpec::from_k_bits(dim, k)?;
        let p1 = max_p1_exact(dim, spec.entropy_nats())?;
        let bound = n_epsilon_high_entropy(&spec, a.eps, a.tau_r, a.tau_tilde)?;
        let exact = n_epsilon_known_h(p1, a.eps, dim, a.tau_r, a.tau_tilde)?;
        let rec = base
            .with("out_of_regime", false)
            .with("p1_exact", p1)
            .with("p1_approx", k / dim.log2())
            .with("n_bound", bound.n_steps)
            .with("n_exact_norm", exact.n_steps);
        Ok(clock.stamp(rec, t0))
    });
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome { records, no_reversal: false })
}

fn cmd_wavepacket(a: &WavepacketArgs, common: &Common, clock: Clock) -> Result<Outcome, Failure> {
    nonempty("n", &a.n)?;
    let cfg = WavePacketConfig { xi0: a.xi0, mass: a.mass, grid_points: a.grid, p_max: a.p_max };
    cfg.validate()?;
    if !a.ratio.is_finite() || a.ratio <= 0.0 {
        return Err(Failure::Usage("--ratio must be positive".into()));
    }
    let tau = a.ratio * a.mass * a.xi0 * a.xi0;
    let beta = match a.beta {
        Some(b) => b,
        None => wavepacket_complexity(&cfg, tau, a.eps)?.beta_opt,
    };
    let h = timerev_core::wavepacket::free_hamiltonian(&cfg)?;
    let threshold = threshold_rate(&build_sigma_thermal(&h, beta)?)?;
    let omega = a.omega_mult * threshold;
    for &n in &a.n {
        let cost = demo_cost(&cfg, n, a.trace_points);
        check_budget(cost, common.budget)?;
    }
    let opts = DemoOptions { trace_points: a.trace_points, budget: common.budget, parallel: false };
    let results = par_map(&a.n, |&n| {
        let t0 = clock.start();
        demo_spread_and_refocus(&cfg, tau, omega, n, beta, &opts).map(|d| (d, t0))
    });
    let mut records = Vec::new();
    let mut no_reversal = false;
    for (r, &n) in results.into_iter().zip(&a.n) {
        let (demo, t0) = r?;
        no_reversal |= !demo.report.reversal;
        eprintln!(
            "summary: N = {n}: width {:.4} -> {:.4} -> {:.4} (refocused: {})",
            demo.initial_width, demo.spread_width, demo.final_width, demo.refocused
        );
        for s in &demo.trace {
            let rec = Record::new("wavepacket")
                .with("grid", a.grid)
                .with("p_max", a.p_max)
                .with("xi0", a.xi0)
                .with("mass", a.mass)
                .with("ratio", a.ratio)
                .with("tau", tau)
                .with("eps", a.eps)
                .with("beta", beta)
                .with("omega", omega)
                .with("n", n)
                .with("step", s.step)
                .with("width", s.width)
                .with("initial_width", demo.initial_width)
                .with("spread_width", demo.spread_width)
                .with("final_width", demo.final_width)
                .with("refocused", demo.refocused)
                .with("error_measured", demo.report.error_measured)
                .with("error_bound", demo.report.error_bound);
            records.push(clock.stamp(rec, t0));
        }
    }
    Ok(Outcome { records, no_reversal })
}
