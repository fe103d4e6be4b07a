use std::hint::black_box;

use bicubic_core::cubic::cubic_closed_form;
use bicubic_core::extrapolate::{estimate, EstimateConfig, Quantity};
use bicubic_core::transfer::{tm_count, z_meet_in_middle};
use bicubic_core::updown::ud_count;
use bicubic_core::{count_one_sided, golden, ColorSeq, EnsembleId, EnsembleTag};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn transfer(c: &mut Criterion) {
    let mut g = c.benchmark_group("transfer");
    g.sample_size(10);
    for n in [8, 12] {
        g.bench_with_input(BenchmarkId::new("z", n), &n, |b, &n| {
            b.iter(|| tm_count(EnsembleId::bicubic(EnsembleTag::Z), black_box(n)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("w", n), &n, |b, &n| {
            b.iter(|| tm_count(EnsembleId::bicubic(EnsembleTag::W), black_box(n)).unwrap())
        });
    }
    g.bench_function("y/8", |b| b.iter(|| tm_count(EnsembleId::bicubic(EnsembleTag::Y), black_box(8)).unwrap()));
    for n in [16, 20] {
        g.bench_with_input(BenchmarkId::new("z-meet-in-middle", n), &n, |b, &n| {
            b.iter(|| z_meet_in_middle(black_box(n), |_| {}).unwrap())
        });
    }
    g.finish();
}

fn updown(c: &mut Criterion) {
    let mut g = c.benchmark_group("updown");
    g.sample_size(10);
    for (tag, n) in [(EnsembleTag::Z, 8), (EnsembleTag::V, 7), (EnsembleTag::U, 7)] {
        g.bench_with_input(BenchmarkId::new(tag.to_string(), n), &n, |b, &n| {
            b.iter(|| ud_count(EnsembleId::bicubic(tag), black_box(n)).unwrap())
        });
    }
    g.bench_function("v-cubic/10", |b| b.iter(|| ud_count(EnsembleId::cubic(EnsembleTag::V), black_box(10)).unwrap()));
    g.finish();
}

fn arches(c: &mut Criterion) {
    let word: ColorSeq = "1011001010011010".repeat(2).parse().unwrap();
    c.bench_function("arch-count/32", |b| b.iter(|| count_one_sided(black_box(&word))));
}

fn oracles(c: &mut Criterion) {
    c.bench_function("closed-form/z-400", |b| b.iter(|| cubic_closed_form(EnsembleTag::Z, black_box(400)).unwrap()));
    let z = golden::table(EnsembleTag::Z).unwrap();
    c.bench_function("estimate/z-growth", |b| {
        b.iter(|| estimate(black_box(&z), Quantity::GrowthRateSquared, EstimateConfig::default()).unwrap())
    });
}

criterion_group!(benches, transfer, updown, arches, oracles);
criterion_main!(benches);
