use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use timerev_core::channel::{lmr_iterate, lmr_iterate_with, IterateOptions, LmrSchedule};
use timerev_core::linalg::DensityMatrix;
use timerev_core::parallel::{par_map, seq_map};
use timerev_core::protocol::{build_sigma_complement, run_reversal, ReversalRun};
use timerev_core::random::{random_density, random_hamiltonian_unit_timescale, seeded_rng};

type Job = (DensityMatrix, DensityMatrix);

fn dense_jobs(count: usize, d: usize) -> Vec<Job> {
    let mut rng = seeded_rng(7);
    (0..count).map(|_| (random_density(d, &mut rng), random_density(d, &mut rng))).collect()
}

fn run_dense(job: &Job) -> f64 {
    let sched = LmrSchedule::new(1.0, 1.0, 500).unwrap();
    lmr_iterate(&job.0, &job.1, &sched).unwrap().0.purity()
}

/// Many independent dense-path runs: the batch level is where threads pay.
fn batch_dense(c: &mut Criterion) {
    let mut g = c.benchmark_group("batch_dense_iterate");
    g.sample_size(10);
    for d in [3usize, 6] {
        let jobs = dense_jobs(16, d);
        g.bench_with_input(BenchmarkId::new("parallel", d), &jobs, |b, jobs| b.iter(|| par_map(black_box(jobs), run_dense)));
        g.bench_with_input(BenchmarkId::new("sequential", d), &jobs, |b, jobs| b.iter(|| seq_map(black_box(jobs), run_dense)));
    }
    g.finish();
}

/// A step-count sweep of full reversals, as the CLI runs it.
fn sweep_reversal(c: &mut Criterion) {
    let mut rng = seeded_rng(8);
    let h = random_hamiltonian_unit_timescale(8, &mut rng);
    let rho = random_density(8, &mut rng);
    let anc = build_sigma_complement(&h).unwrap();
    let ns: Vec<usize> = (4..16).map(|k| 1usize << k).collect();
    let run = |&n: &usize| {
        let r = ReversalRun { omega: 2.0 * anc.normalization(), tau: 1.0, n_steps: n, drift: true };
        run_reversal(&rho, &h, &anc, &r).unwrap().1.error_measured
    };
    let mut g = c.benchmark_group("sweep_reversal_dim8");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| par_map(black_box(&ns), run)));
    g.bench_function("sequential", |b| b.iter(|| seq_map(black_box(&ns), run)));
    g.finish();
}

/// Element-parallel kernel on one large diagonal problem.
fn diagonal_kernel(c: &mut Criterion) {
    let d = 128;
    let mut rng = seeded_rng(9);
    let rho = random_density(d, &mut rng);
    let probs: Vec<f64> = random_density(d, &mut rng).matrix().diag().iter().map(|z| z.re).collect();
    let sigma = DensityMatrix::from_probabilities(&probs).unwrap();
    let sched = LmrSchedule::new(1.0, 1.0, 1 << 20).unwrap();
    let mut g = c.benchmark_group("diagonal_kernel_dim128");
    g.sample_size(20);
    for parallel in [true, false] {
        let name = if parallel { "parallel" } else { "sequential" };
        let opts = IterateOptions { diagnostics_every: None, parallel };
        g.bench_function(name, |b| b.iter(|| lmr_iterate_with(black_box(&rho), &sigma, &sched, opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, batch_dense, sweep_reversal, diagonal_kernel);
criterion_main!(benches);
