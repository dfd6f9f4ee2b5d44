use std::hint::black_box;

use bellhide_core::dense::{min_eigenvalue, partial_transpose, realize};
use bellhide_core::locc::{outcome_distribution, BuiltinStrategy};
use bellhide_core::povmopt::optimize_reduced;
use bellhide_core::prep::{rng_from_seed, sample_recursive_with};
use bellhide_core::states::hiding_state;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn reduced_lp(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduced_lp");
    group.sample_size(10);
    for n in [4usize, 8, 12] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| optimize_reduced(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn realize_and_transpose(c: &mut Criterion) {
    let mut group = c.benchmark_group("realize_pt_min_eig");
    group.sample_size(10);
    for n in [1usize, 2, 3] {
        let state = hiding_state(n, 0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| {
            b.iter(|| min_eigenvalue(&partial_transpose(&realize(black_box(s)).unwrap())).unwrap())
        });
    }
    group.finish();
}

fn transcripts(c: &mut Criterion) {
    let mut group = c.benchmark_group("outcome_distribution");
    for n in [2usize, 3, 4] {
        let state = hiding_state(n, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("all-z", n), &state, |b, s| {
            b.iter(|| outcome_distribution(&BuiltinStrategy::AllZ, black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn recursive_sampler(c: &mut Criterion) {
    c.bench_function("sample_recursive_n16", |b| {
        let mut rng = rng_from_seed(1);
        b.iter(|| sample_recursive_with(black_box(16), 1, &mut rng).unwrap())
    });
}

criterion_group!(benches, reduced_lp, realize_and_transpose, transcripts, recursive_sampler);
criterion_main!(benches);
