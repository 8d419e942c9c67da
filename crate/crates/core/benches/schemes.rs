use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use reachlabel::graph::{closure_matrix_with, scc_condense};
use reachlabel::oracle::{generate, verify_labels, GenSpec, GraphKind};
use reachlabel::{encode, BicliqueProfile, EncodeOptions, Exec, SchemeId};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn poset(n: usize) -> reachlabel::Digraph {
    generate(&GenSpec::new(GraphKind::Poset, n, 0.3, 1))
}

fn closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    for n in [500, 1000] {
        let dag = scc_condense(&generate(&GenSpec::new(GraphKind::Dag, n, 0.05, 1))).dag;
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &dag, |b, d| {
                b.iter(|| closure_matrix_with(black_box(d), exec))
            });
        }
    }
    group.finish();
}

fn encode_schemes(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode");
    group.sample_size(10);
    let g = poset(1000);
    for scheme in [SchemeId::Warmup, SchemeId::Third, SchemeId::Average] {
        for (name, exec) in MODES {
            let opts = EncodeOptions::new(scheme, BicliqueProfile::Force).with_exec(exec);
            group.bench_function(BenchmarkId::new(name, format!("{scheme:?}")), |b| {
                b.iter(|| encode(black_box(&g), &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    let g = poset(500);
    let ls = encode(&g, &EncodeOptions::new(SchemeId::Third, BicliqueProfile::Force)).unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| verify_labels(black_box(&g), &ls, exec)));
    }
    group.finish();
}

fn query(c: &mut Criterion) {
    let mut group = c.benchmark_group("query");
    for n in [250, 500, 1000, 2000] {
        let g = poset(n);
        for scheme in [SchemeId::Warmup, SchemeId::Third, SchemeId::Average] {
            let ls = encode(&g, &EncodeOptions::new(scheme, BicliqueProfile::Force)).unwrap();
            let pairs: Vec<(usize, usize)> = (0..256).map(|i| ((i * 7919) % n, (i * 104_729 + 13) % n)).collect();
            group.bench_with_input(BenchmarkId::new(format!("{scheme:?}"), n), &pairs, |b, pairs| {
                b.iter(|| {
                    for &(u, v) in pairs {
                        black_box(ls.query(u, v).unwrap());
                    }
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, closure, encode_schemes, verify, query);
criterion_main!(benches);
