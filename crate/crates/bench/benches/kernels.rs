use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trichotomy::dynamics::{certify_prime_period, simulate, SimulationConfig};
use trichotomy::number_theory::frobenius_number;
use trichotomy::ratio::ratio;
use trichotomy::{classify, step, Equation, InitialConditions};

fn odd_lag_example() -> Equation {
    Equation::literal("1", "1/2", &[(2, "3/4"), (4, "3/4"), (7, "1")], &[(7, "1")])
}

fn bench_step(c: &mut Criterion) {
    let eq = odd_lag_example();
    let history: Vec<_> = ["1/3", "2", "5/7", "1", "3/2", "4", "1/9"]
        .iter()
        .map(|s| ratio(s))
        .collect();
    c.bench_function("step/odd-lag k=7", |b| {
        b.iter(|| step(black_box(&eq), black_box(&history)))
    });
}

fn bench_simulate(c: &mut Criterion) {
    let eq = odd_lag_example();
    let ics = InitialConditions::Rational(
        ["1/3", "2", "5/7", "1", "3/2", "4", "1/9"]
            .iter()
            .map(|s| ratio(s))
            .collect(),
    );
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    for bits in [64u32, 128, 256] {
        let cfg = SimulationConfig::float(1000, bits);
        group.bench_with_input(
            BenchmarkId::new("float 1000 steps", bits),
            &cfg,
            |b, cfg| b.iter(|| simulate(&eq, &ics, cfg).unwrap()),
        );
    }
    let cfg = SimulationConfig::exact(20);
    group.bench_function("exact 20 steps", |b| {
        b.iter(|| simulate(&eq, &ics, &cfg).unwrap())
    });
    group.finish();
}

fn bench_frobenius(c: &mut Criterion) {
    let sets: Vec<BTreeSet<u64>> = vec![
        BTreeSet::from([3, 5]),
        BTreeSet::from([6, 9, 20]),
        BTreeSet::from([11, 12]),
        BTreeSet::from([7, 9, 11, 12]),
    ];
    c.bench_function("frobenius/four sets", |b| {
        b.iter(|| {
            sets.iter()
                .map(|s| frobenius_number(black_box(s)).unwrap())
                .sum::<i64>()
        })
    });
}

fn bench_classify(c: &mut Criterion) {
    let eqs = [
        Equation::literal("0", "2", &[(2, "1"), (4, "1")], &[(1, "1")]),
        Equation::literal("1", "1", &[(2, "1")], &[(1, "1")]),
        odd_lag_example(),
    ];
    c.bench_function("classify/three families", |b| {
        b.iter(|| eqs.iter().map(|e| classify(black_box(e))).count())
    });
}

fn bench_certify(c: &mut Criterion) {
    let eq = Equation::literal("3", "1", &[(3, "1"), (6, "2")], &[(3, "1")]);
    let ics = InitialConditions::Rational(
        ["3", "3", "5", "3", "3", "2"]
            .iter()
            .map(|s| ratio(s))
            .collect(),
    );
    c.bench_function("certify/period 6 over 30 periods", |b| {
        b.iter(|| {
            let t = simulate(&eq, &ics, &SimulationConfig::exact(180)).unwrap();
            let seq: Vec<_> = t.chronological().cloned().collect();
            certify_prime_period(&seq, 6)
        })
    });
}

criterion_group!(
    benches,
    bench_step,
    bench_simulate,
    bench_frobenius,
    bench_classify,
    bench_certify
);
criterion_main!(benches);
