use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbit_rank::par::Strategy;
use orbit_rank::symrank::{truncate, GroupExpr};
use orbit_rank::verify::{run_suite, VerifyConfig};

const STRATEGIES: [Strategy; 2] = [Strategy::Sequential, Strategy::Parallel];

fn rho_profile(c: &mut Criterion) {
    let w = GroupExpr::wreath(GroupExpr::pow_inf(GroupExpr::z2()));
    let chain = truncate(&w, 4, 3).expect("within budget");
    let mut group = c.benchmark_group("rho_profile");
    for s in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{s:?}")), &s, |b, &s| {
            b.iter(|| chain.rho_profile(s))
        });
    }
    group.finish();
}

fn verify_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_suite");
    group.sample_size(10);
    for s in STRATEGIES {
        let config = VerifyConfig { trials: 20, strategy: s, ..VerifyConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{s:?}")), &config, |b, config| {
            b.iter(|| run_suite(config))
        });
    }
    group.finish();
}

criterion_group!(benches, rho_profile, verify_suite);
criterion_main!(benches);
