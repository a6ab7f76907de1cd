use std::f64::consts::PI;
use std::hint::black_box;

use cpdq_core::{
    first_order_dl, fisher_metrics, info_ledger, integrate_hamilton, piston_simulate, solve_tise, special_variation,
    variational_ground_state, Constants, Grid1D, IntegratorConfig, PistonConfig, Potential,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn harmonic() -> Potential {
    Potential::Harmonic { m: 1.0, omega: 1.0 }
}

fn dynamics(c: &mut Criterion) {
    let nat = Constants::natural();
    // ten periods at dt = 1e-3
    let cfg = IntegratorConfig::new(1e-3, (20.0 * PI / 1e-3) as usize);
    c.bench_function("leapfrog_10_periods", |b| {
        b.iter(|| integrate_hamilton(&harmonic(), black_box(1.0), 0.0, &cfg, &nat).unwrap())
    });
    let rec = integrate_hamilton(&harmonic(), 1.0, 0.0, &cfg, &nat).unwrap();
    c.bench_function("special_variation_dl", |b| {
        b.iter(|| {
            let var = special_variation(&rec.traj, 5e-7);
            first_order_dl(&rec.traj, &var).unwrap()
        })
    });
    c.bench_function("info_ledger_trajectory", |b| {
        b.iter(|| info_ledger(&rec, &nat).unwrap())
    });
}

fn quantum(c: &mut Criterion) {
    let nat = Constants::natural();
    let mut group = c.benchmark_group("solve_tise_6_states");
    for n in [500, 2000, 8000] {
        let grid = Grid1D::new(-10.0, 10.0, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &grid, |b, g| {
            b.iter(|| solve_tise(&harmonic(), g, 6, &nat).unwrap())
        });
    }
    group.finish();

    let grid = Grid1D::new(-10.0, 10.0, 2000).unwrap();
    let psi = solve_tise(&harmonic(), &grid, 1, &nat).unwrap().states.remove(0);
    c.bench_function("fisher_metrics_2000", |b| {
        b.iter(|| fisher_metrics(black_box(&psi)).unwrap())
    });

    let mut slow = c.benchmark_group("variational");
    slow.sample_size(10);
    let small = Grid1D::new(-10.0, 10.0, 500).unwrap();
    slow.bench_function("ground_state_500", |b| {
        b.iter(|| variational_ground_state(&harmonic(), &small, &nat, 5000, 1e-12).unwrap())
    });
    slow.finish();
}

fn thermo(c: &mut Criterion) {
    let nat = Constants::natural();
    let mut group = c.benchmark_group("piston_expansion");
    for ratio in [1e-2, 1e-3] {
        let cfg = PistonConfig::expansion(1.0, 2.0, ratio, 1.0, 1.0);
        group.bench_with_input(BenchmarkId::from_parameter(ratio), &cfg, |b, cfg| {
            b.iter(|| piston_simulate(cfg, &nat).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dynamics, quantum, thermo);
criterion_main!(benches);
