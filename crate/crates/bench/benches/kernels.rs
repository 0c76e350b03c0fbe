use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use matrange_core::mrange::{member_with, random_ucp_image};
use matrange_core::sdp::solve;
use matrange_core::structure::is_minimal;
use matrange_core::suites;
use matrange_core::tuples::irreducible_decompose;
use matrange_core::ToleranceProfile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sdp(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let (feasible, _) = suites::planted_feasible_sdp(3);
    let (infeasible, _) = suites::planted_infeasible_sdp(3);
    c.bench_function("sdp/planted_feasible", |b| b.iter(|| solve(&feasible, &tol).unwrap()));
    c.bench_function("sdp/planted_infeasible", |b| b.iter(|| solve(&infeasible, &tol).unwrap()));
}

fn membership(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let a = suites::round_robin_tuple(11);
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let x = random_ucp_image(&mut r, &a, 2);
    c.bench_function("member/level2_image", |b| b.iter(|| member_with(&a, &x, &tol).unwrap()));
}

fn structure(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let (a, _) = suites::planted_decomposition(5);
    c.bench_function("decompose/planted", |b| {
        b.iter_batched(|| a.clone(), |a| irreducible_decompose(&a, 5).unwrap(), BatchSize::SmallInput)
    });
    let t = suites::round_robin_tuple(7);
    let mut g = c.benchmark_group("minimal");
    g.sample_size(10);
    g.bench_function("round_robin", |b| b.iter(|| is_minimal(&t, &tol).unwrap()));
    g.finish();
}

criterion_group!(benches, sdp, membership, structure);
criterion_main!(benches);
