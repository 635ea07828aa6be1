use catrisk_core::{
    calibrate_gamma, certainty_equivalent, find_root, implied_life, simulate, Bracket, DiscreteLottery, FamilyKind,
    Money, PillDeal, PopulationSpec, RootOptions, UtilityFamily,
};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

const R: Money = Money(220_000.0);
const P: f64 = 1e-9;

fn root_finding(c: &mut Criterion) {
    let bracket = Bracket::new(0.0, 4.0).unwrap();
    c.bench_function("find_root/cubic", |b| {
        b.iter(|| find_root(|x| x * x * x - 2.0 * x - 5.0, black_box(bracket), RootOptions::default()))
    });
}

fn certainty_equivalents(c: &mut Criterion) {
    let coin = DiscreteLottery::from_pairs(&[(100.0, 0.5), (200.0, 0.5)]).unwrap();
    let pill = PillDeal::new(2e6, R.0, P).unwrap().as_lottery();
    let mut group = c.benchmark_group("certainty_equivalent");
    for u in [UtilityFamily::linear(), UtilityFamily::cara(1e-5).unwrap(), UtilityFamily::power(7.0).unwrap()] {
        group.bench_with_input(BenchmarkId::new("coin", u.name()), &u, |b, u| {
            b.iter(|| certainty_equivalent(u, black_box(&coin)))
        });
        group.bench_with_input(BenchmarkId::new("pill", u.name()), &u, |b, u| {
            b.iter(|| certainty_equivalent(u, black_box(&pill)))
        });
    }
    group.finish();
}

fn value_of_life(c: &mut Criterion) {
    let mut group = c.benchmark_group("implied_life");
    for u in [UtilityFamily::cara(10f64.powf(-5.53)).unwrap(), UtilityFamily::power(5.3).unwrap()] {
        group.bench_with_input(BenchmarkId::from_parameter(u.name()), &u, |b, u| {
            b.iter(|| implied_life(u, black_box(R), P))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("calibrate_gamma");
    group.sample_size(20);
    for kind in [FamilyKind::Cara, FamilyKind::Power] {
        group.bench_with_input(BenchmarkId::from_parameter(kind.name()), &kind, |b, &kind| {
            b.iter(|| calibrate_gamma(kind, black_box(Money(7e6)), R, P))
        });
    }
    group.finish();
}

fn population(c: &mut Criterion) {
    let deal = PillDeal::new(3e6, R.0, P).unwrap();
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    for n in [1_000, 10_000] {
        let spec = PopulationSpec { n_agents: n, ..PopulationSpec::default() };
        group.bench_with_input(BenchmarkId::from_parameter(n), &spec, |b, spec| b.iter(|| simulate(spec, &deal)));
    }
    group.finish();
}

criterion_group!(benches, root_finding, certainty_equivalents, value_of_life, population);
criterion_main!(benches);
