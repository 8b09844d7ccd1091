//! Sequential vs rayon execution of the data-parallel loops. Without the
//! `parallel` feature both variants run the same sequential code.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use witl_core::common_info::{bsc_broadcast_source, solve_common_info, CiBudget, SolveMode};
use witl_core::prob::JointPmf;
use witl_core::rd::{trace_rd_curve, BaConfig, DistortionSpec};
use witl_core::synthesis::{build_generator, exact_delta};
use witl_core::Exec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn dsbs() -> JointPmf {
    bsc_broadcast_source(0.5, 0.1, 2).unwrap()
}

fn rd_sweep(c: &mut Criterion) {
    let p = JointPmf::new(vec![4, 4], (1..=16).map(|v| v as f64 / 136.0).collect()).unwrap();
    let d = DistortionSpec::hamming(&[4, 4]);
    let grid: Vec<Vec<f64>> = (0..8)
        .flat_map(|i| (0..8).map(move |j| vec![0.25 * 1.6f64.powi(i), 0.25 * 1.6f64.powi(j)]))
        .collect();
    let cfg = BaConfig::default();
    let mut group = c.benchmark_group("rd_sweep_4x4_64pts");
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| trace_rd_curve(black_box(&p), &d, &grid, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn ci_scan(c: &mut Criterion) {
    let p = dsbs();
    let mut group = c.benchmark_group("ci_exhaustive_scan");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let budget = CiBudget {
            mode: SolveMode::Exhaustive,
            exec,
            ..CiBudget::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &budget, |b, budget| {
            b.iter(|| solve_common_info(black_box(&p), Some(2), budget).unwrap())
        });
    }
    group.finish();
}

fn ci_restarts(c: &mut Criterion) {
    let p = bsc_broadcast_source(0.5, 0.1, 3).unwrap();
    let mut group = c.benchmark_group("ci_restarts_broadcast3");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let budget = CiBudget {
            mode: SolveMode::Restart,
            restarts: 8,
            steps_per_stage: 300,
            exec,
            ..CiBudget::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &budget, |b, budget| {
            b.iter(|| solve_common_info(black_box(&p), Some(2), budget).unwrap())
        });
    }
    group.finish();
}

fn synthesis(c: &mut Criterion) {
    let p = dsbs();
    let sol = solve_common_info(
        &p,
        Some(2),
        &CiBudget {
            mode: SolveMode::Exhaustive,
            ..CiBudget::default()
        },
    )
    .unwrap();
    let mut group = c.benchmark_group("synthesis_exact_delta");
    group.sample_size(10);
    for n in [4usize, 6] {
        let gen = build_generator(&sol, n, 0.95, 0).unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
                b.iter(|| exact_delta(black_box(&gen), &p, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, rd_sweep, ci_scan, ci_restarts, synthesis);
criterion_main!(benches);
