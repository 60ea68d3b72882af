use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lexichoice_bench::Fixture;
use lexichoice_core::battery::condition_battery;
use lexichoice_core::props::{check_choice, classify_tlcr, verify_preservation, PreservationConfig};
use lexichoice_core::witness::brute_search;
use lexichoice_core::{Domain, Property};

fn tabulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("tabulate");
    for n in [6, 8, 10, 12] {
        let f = Fixture::new(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| black_box(f.composed().tabulate().unwrap()))
        });
    }
    group.finish();
}

fn path_independence(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_pi");
    for n in [6, 8, 10] {
        let table = Fixture::new(n, 2).composed();
        group.bench_with_input(BenchmarkId::from_parameter(n), &table, |b, t| {
            b.iter(|| black_box(check_choice(t, Property::Pi).unwrap().holds))
        });
    }
    group.finish();
}

fn classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify_tlcr");
    for n in [6, 9, 12] {
        let f = Fixture::new(n, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f.exclusion, |b, e| {
            b.iter(|| black_box(classify_tlcr(e).unwrap().is_tlcr))
        });
    }
    group.finish();
}

fn preservation(c: &mut Criterion) {
    let f = Fixture::new(4, 4);
    c.bench_function("verify_pi_res_res_n4_exhaustive", |b| {
        b.iter(|| {
            let cfg = PreservationConfig::exhaustive();
            black_box(verify_preservation(&f.exclusion, Property::Pi, Domain::Res, Domain::Res, &cfg).unwrap().passed())
        })
    });
}

fn search(c: &mut Criterion) {
    let entry = &condition_battery()[0];
    c.bench_function("brute_search_battery_entry", |b| {
        b.iter(|| {
            let cfg = PreservationConfig::exhaustive();
            black_box(brute_search(&entry.exclusion, Property::Pi, Domain::Res, Domain::Res, &cfg).unwrap().is_some())
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = tabulate, path_independence, classify, preservation, search
}
criterion_main!(benches);
