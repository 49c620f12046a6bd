use std::hint::black_box;

use coupler_core::gadget::GadgetSpec;
use coupler_core::parity::{roundtrip_validate, LogicalProblem};
use coupler_core::robustness::Analyzer;
use coupler_core::spin::enumerate_spectrum_with;
use coupler_core::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn critical_sigmas(c: &mut Criterion) {
    let analyzer = Analyzer::new(&GadgetSpec::n_local(4, 1.0, 0.5, 0.25)).unwrap();
    let mut group = c.benchmark_group("critical_sigmas");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 500), &exec, |b, &exec| {
            b.iter(|| analyzer.critical_sigmas(black_box(500), 1, true, exec).unwrap())
        });
    }
    group.finish();
}

fn yield_curve(c: &mut Criterion) {
    let analyzer = Analyzer::new(&GadgetSpec::n_local(4, 1.0, 0.5, 1e-3)).unwrap();
    let grid: Vec<f64> = (0..=8).map(|k| k as f64 * 0.005).collect();
    let mut group = c.benchmark_group("yield_curve");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 500), &exec, |b, &exec| {
            b.iter(|| analyzer.yield_curve(&grid, black_box(500), 1, true, exec).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_spectrum");
    for n in [4, 8] {
        let h = GadgetSpec::n_local(n, 1.0, 0.5, 0.05).build().unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, 2 * n), &exec, |b, &exec| {
                b.iter(|| enumerate_spectrum_with(black_box(&h), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn roundtrip(c: &mut Criterion) {
    let p = LogicalProblem::new(6, vec![(0, 1, 0.5), (2, 5, -0.25), (3, 4, 1.0)]).unwrap();
    c.bench_function("lhz_roundtrip_m6", |b| {
        b.iter(|| roundtrip_validate(black_box(&p), p.default_constraint()).unwrap())
    });
}

criterion_group!(benches, critical_sigmas, yield_curve, spectrum, roundtrip);
criterion_main!(benches);
