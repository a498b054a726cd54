//! Sequential against data-parallel evaluation of the randomized sweeps.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lnd_core::arith::Poly;
use lnd_core::checks;
use lnd_core::delta_family::{make_context, n_to_aut};
use lnd_core::random::Bounds;
use lnd_core::sweep::map_cases_sequential;

fn roundtrip_case(s: &mut lnd_core::random::Sampler) -> bool {
    checks::exp_log_roundtrip(&s.triangular_lnd()).is_ok()
}

fn sweeps(c: &mut Criterion) {
    let bounds = Bounds::default();
    let p: Poly = "x*z + y^2".parse().unwrap();
    let ctx = make_context(&p, &"1".parse().unwrap(), 3).unwrap();
    let n_case = |s: &mut lnd_core::random::Sampler| {
        let (a, b) = (s.nelem(), s.nelem());
        checks::n_group_case(&ctx, &a, &b).is_ok() && !n_to_aut(&a, &ctx).is_identity()
    };

    let mut g = c.benchmark_group("triangular_exp_log");
    for count in [16usize, 64] {
        g.bench_with_input(BenchmarkId::new("sequential", count), &count, |bch, &n| {
            bch.iter(|| map_cases_sequential(0, n, bounds, |_, s| roundtrip_case(s)))
        });
        #[cfg(feature = "parallel")]
        g.bench_with_input(BenchmarkId::new("parallel", count), &count, |bch, &n| {
            bch.iter(|| lnd_core::sweep::map_cases_parallel(0, n, bounds, |_, s| roundtrip_case(s)))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("n_group");
    g.sample_size(10);
    let count = 8;
    g.bench_function(BenchmarkId::new("sequential", count), |bch| {
        bch.iter(|| map_cases_sequential(0, count, bounds, |_, s| n_case(s)))
    });
    #[cfg(feature = "parallel")]
    g.bench_function(BenchmarkId::new("parallel", count), |bch| {
        bch.iter(|| lnd_core::sweep::map_cases_parallel(0, count, bounds, |_, s| n_case(s)))
    });
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
