use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wavepole::extrapolation::{fit_ratio_series, LocalProblem, WaveProblem, DEFAULT_K_SAMPLES};
use wavepole::solver::{default_bound_window, find_bound_states, scattering_state};
use wavepole::{PotentialModel, RadialGrid};

fn solver(c: &mut Criterion) {
    let well = PotentialModel::spherical_well(2.8, 1.0).unwrap();
    let grid = RadialGrid::covering(1e-3, 1.0, Some(0.159), Some(0.1)).unwrap();

    c.bench_function("bound states, well(2.8)", |b| {
        b.iter(|| find_bound_states(black_box(&well), &grid, default_bound_window(&well), 10).unwrap())
    });

    c.bench_function("scattering state, well(2.8), k = 0.1", |b| {
        b.iter(|| scattering_state(black_box(&well), 0.1, &grid).unwrap())
    });

    let bargmann = PotentialModel::bargmann(1.0, 0.1).unwrap();
    let problem = LocalProblem::with_default_grid(bargmann, 1e-3, DEFAULT_K_SAMPLES[0]).unwrap();
    let state = problem.bound_states().unwrap().pop().unwrap();
    let mut group = c.benchmark_group("ratio fit");
    group.sample_size(10);
    group.bench_function("Bargmann(1, 0.1), 13 radii", |b| {
        let radii: Vec<f64> = (0..=12).map(|i| i as f64 * 0.05).collect();
        b.iter(|| fit_ratio_series(&problem, &state, black_box(&radii), &DEFAULT_K_SAMPLES).unwrap())
    });
    group.finish();
}

criterion_group!(benches, solver);
criterion_main!(benches);
