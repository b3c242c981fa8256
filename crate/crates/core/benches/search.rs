//! Hot paths under the rayon backend and the sequential fallback.
//!
//! Bench ids are the same in both builds, so one can be compared against the
//! other with criterion baselines:
//!
//! ```text
//! cargo bench -p mmcodes-core -- --save-baseline parallel
//! cargo bench -p mmcodes-core --no-default-features -- --baseline parallel
//! ```

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mmcodes::*;

fn code(orders: &[usize], gens: &[&str]) -> MCssCode {
    let s = GroupSpec::new(orders.to_vec()).unwrap();
    let g: Vec<RingElem> = gens.iter().map(|g| parse_poly(g, &s).unwrap()).collect();
    MCssCode::from_generators(&s, &g, None).unwrap()
}

fn row1() -> MCssCode {
    code(&[2, 2, 2, 2], &["1 + w*x", "1 + x*y", "1 + y*z", "1 + w*z"])
}

fn big() -> MCssCode {
    code(&[3, 3, 3, 4], &["(1+x)*(1+y*z)", "(1+y)*(1+z*w)", "(1+z)*(1+w*x)", "(1+w)*(1+x*y)"])
}

fn backend() -> &'static str {
    if par::is_parallel() {
        "rayon"
    } else {
        "sequential"
    }
}

fn construction(c: &mut Criterion) {
    let s = GroupSpec::new(vec![3, 3, 3, 4]).unwrap();
    let g: Vec<RingElem> = ["(1+x)*(1+y*z)", "(1+y)*(1+z*w)", "(1+z)*(1+w*x)", "(1+w)*(1+x*y)"]
        .iter()
        .map(|g| parse_poly(g, &s).unwrap())
        .collect();
    c.bench_function("build/n648", |b| b.iter(|| MCssCode::from_generators(black_box(&s), &g, None).unwrap()));
}

fn distances(c: &mut Criterion) {
    eprintln!("backend: {}", backend());
    let budget = Budget::default();
    let r1 = row1();
    let mut g = c.benchmark_group("exhaustive");
    g.sample_size(10);
    for w in [3, 4] {
        g.bench_with_input(BenchmarkId::new("row1_dx", w), &w, |b, &w| {
            b.iter(|| distance_exhaustive(&r1, PauliType::X, w, &budget).unwrap())
        });
    }
    let b648 = big();
    g.bench_function("n648_dz_w3", |b| b.iter(|| distance_exhaustive(&b648, PauliType::Z, 3, &budget).unwrap()));
    g.finish();

    let mut g = c.benchmark_group("randomized");
    g.sample_size(10);
    let opts = RandomizedOptions { iterations: 16, seed: 5, streams: 4, stop_at: None };
    g.bench_function("n648_16_iterations", |b| b.iter(|| distance_randomized(&b648, PauliType::Z, &opts).unwrap()));
    g.finish();
}

fn confinement(c: &mut Criterion) {
    let budget = Budget::default();
    let r1 = row1();
    let mut g = c.benchmark_group("confinement");
    g.sample_size(10);
    g.bench_function("row1_exact_w3", |b| {
        b.iter(|| confinement_profile(&r1, PauliType::Z, 3, ConfinementMode::Exact, &budget).unwrap())
    });
    g.bench_function("row1_cluster_w4", |b| {
        b.iter(|| confinement_profile(&r1, PauliType::Z, 4, ConfinementMode::Cluster, &budget).unwrap())
    });
    g.finish();
}

criterion_group!(benches, construction, distances, confinement);
criterion_main!(benches);
