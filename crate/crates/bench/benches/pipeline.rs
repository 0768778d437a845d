use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wsce_bench::{half_ring_config, half_ring_graph};
use wsce_core::harness::{run_on, RunOptions};
use wsce_core::tksc::Tksc;
use wsce_core::{average_linkage_cut, make_half_ring, normalized_modularity, weac, EnsembleMember};

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("tksc_kernels");
    for n in [100, 200, 400] {
        let g = half_ring_graph(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| Tksc::new(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn members_and_consensus(c: &mut Criterion) {
    let g = half_ring_graph(400);
    let kernels = Tksc::new(&g).unwrap();
    c.bench_function("partition_l4_n400", |b| {
        b.iter(|| kernels.partition(black_box(4), 7).unwrap())
    });

    let members: Vec<EnsembleMember> = (0..20)
        .map(|i| {
            let p = kernels.partition(2 + i % 3, i as u64).unwrap();
            let nm = normalized_modularity(&p, kernels.modular()).unwrap().nm;
            EnsembleMember::new(p, nm).unwrap()
        })
        .collect();
    c.bench_function("normalized_modularity_n400", |b| {
        b.iter(|| normalized_modularity(black_box(&members[0].partition), kernels.modular()).unwrap())
    });
    let xi = weac(&members).unwrap();
    c.bench_function("weac_20_members_n400", |b| b.iter(|| weac(black_box(&members)).unwrap()));
    c.bench_function("average_linkage_n400", |b| {
        b.iter(|| average_linkage_cut(black_box(&xi), 2).unwrap())
    });
}

fn end_to_end(c: &mut Criterion) {
    let cfg = half_ring_config(400);
    let ds = make_half_ring(400, 0.1, 0).unwrap();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("half_ring_400_one_repeat", |b| {
        b.iter(|| run_on(black_box(&cfg), &ds, &RunOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kernels, members_and_consensus, end_to_end);
criterion_main!(benches);
