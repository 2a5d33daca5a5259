//! Criterion benches comparing the rayon-parallel kernels against their
//! sequential twins: spectrum reduction, exact ground-state search and
//! annealing restarts.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use chimera_sat::chimera::{layout_embedding, realize, required_dims, ChimeraGraph, LayoutKind};
use chimera_sat::gadgets::{compile_problem, GadgetParams};
use chimera_sat::generate;
use chimera_sat::ising::{IsingModel, Vertex};
use chimera_sat::solver::{solve_exact, solve_exact_seq, solve_sa, solve_sa_seq, SaConfig};

fn dense_model(n: u32, seed: u64) -> IsingModel {
    use rand::prelude::*;
    let mut rng = generate::rng_from(seed);
    let mut m = IsingModel::new();
    for i in 1..=n {
        m.add_field(Vertex::Logical(i), rng.gen_range(-1.0..1.0));
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            m.add_coupling(Vertex::Logical(i), Vertex::Logical(j), rng.gen_range(-1.0..1.0))
                .unwrap();
        }
    }
    m
}

fn bench_reduced_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduced_spectrum");
    group.sample_size(10);
    // A compiled instance: independent ancillae, reduced over the logicals.
    let mut rng = generate::rng_from(7);
    let problem = generate::random_weighted_instance(&mut rng, 12, 10, 4, (0.5, 2.0), false);
    let compiled = compile_problem(&problem, &GadgetParams::default()).unwrap();
    let logicals = compiled.logical_vertices();
    group.bench_function(BenchmarkId::new("compiled", "par"), |b| {
        b.iter(|| black_box(compiled.model.reduced_spectrum(&logicals, 30).unwrap()))
    });
    group.bench_function(BenchmarkId::new("compiled", "seq"), |b| {
        b.iter(|| black_box(compiled.model.reduced_spectrum_seq(&logicals, 30).unwrap()))
    });
    // A dense model reduced over half its spins: coupled completions.
    let dense = dense_model(18, 11);
    let half: Vec<Vertex> = (1..=9).map(Vertex::Logical).collect();
    group.bench_function(BenchmarkId::new("dense", "par"), |b| {
        b.iter(|| black_box(dense.reduced_spectrum(&half, 26).unwrap()))
    });
    group.bench_function(BenchmarkId::new("dense", "seq"), |b| {
        b.iter(|| black_box(dense.reduced_spectrum_seq(&half, 26).unwrap()))
    });
    group.finish();
}

fn bench_solve_exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_exact");
    group.sample_size(10);
    for n in [16u32, 20] {
        let model = dense_model(n, u64::from(n));
        group.bench_with_input(BenchmarkId::new("par", n), &model, |b, m| {
            b.iter(|| black_box(solve_exact(m, 26).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("seq", n), &model, |b, m| {
            b.iter(|| black_box(solve_exact_seq(m, 26).unwrap()))
        });
    }
    group.finish();
}

fn bench_solve_sa(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_sa");
    group.sample_size(10);
    let problem = generate::maxksat_instance(16, 3, 1.5, 3);
    let compiled = compile_problem(&problem, &GadgetParams::default()).unwrap();
    let (rows, cols) = required_dims(16, compiled.total_ancillas());
    let graph = ChimeraGraph::new(rows, cols);
    let embedding = layout_embedding(&compiled, &graph, LayoutKind::Linear).unwrap();
    let physical = realize(&compiled.model, &embedding, &GadgetParams::default()).unwrap();
    let config = SaConfig {
        sweeps: 1000,
        restarts: 16,
        seed: 5,
        ..SaConfig::default()
    };
    group.bench_function("par", |b| {
        b.iter(|| black_box(solve_sa(&physical.model, 0.2, &config)))
    });
    group.bench_function("seq", |b| {
        b.iter(|| black_box(solve_sa_seq(&physical.model, 0.2, &config)))
    });
    group.finish();
}

criterion_group!(benches, bench_reduced_spectrum, bench_solve_exact, bench_solve_sa);
criterion_main!(benches);
