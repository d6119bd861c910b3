use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spnorm::bounds::crt_generating_set;
use spnorm::decomposition::{factor_elq, PipelineContext};
use spnorm::reduction::level_ideal;
use spnorm::rings::RingDesc;
use spnorm::search::{bfs_balls, conjugacy_closure, FiniteSp};
use spnorm::symplectic::{random_sp, root_element, RootIndex};
use spnorm::words::eval_word;

fn level_ideals(c: &mut Criterion) {
    let ring = RingDesc::modulo(210).unwrap();
    let mut g = c.benchmark_group("level_ideal");
    for n in [3, 4, 5] {
        let a = random_sp(n, &ring, 40, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| level_ideal(black_box(a)).unwrap()));
    }
    g.finish();
}

fn elq(c: &mut Criterion) {
    let ring = RingDesc::modulo(2310).unwrap();
    let mut g = c.benchmark_group("factor_elq");
    for n in [3, 5, 8] {
        let a = random_sp(n, &ring, 60, 2);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| factor_elq(black_box(a)).unwrap()));
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let ring = RingDesc::modulo(30).unwrap();
    let set = crt_generating_set(3, &ring, 2, &RootIndex::long(1, true)).unwrap().set;
    let mut ctx = PipelineContext::new(&set).unwrap();
    let a = random_sp(3, &ring, 40, 3);
    c.bench_function("pipeline_run_n3_z30", |b| b.iter(|| ctx.run(black_box(&a)).unwrap()));
    let (w, _) = ctx.run(&a).unwrap();
    c.bench_function("pipeline_eval_n3_z30", |b| b.iter(|| eval_word(black_box(&w), &set).unwrap()));
}

fn balls(c: &mut Criterion) {
    let group = FiniteSp::new(2, 3).unwrap();
    let e = root_element(2, group.ring(), &RootIndex::long(1, true), &1.into());
    let gens = conjugacy_closure(&group, &[group.encode(&e).unwrap()], 1 << 20).unwrap();
    c.bench_function("bfs_sp4_f3_long_root", |b| b.iter(|| bfs_balls(&group, black_box(&gens), None).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = level_ideals, elq, pipeline, balls
}
criterion_main!(benches);
