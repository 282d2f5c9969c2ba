use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use feupdate::optimize::rng_from_seed;
use feupdate::{solve_modes, Bounds, Mlp, Objective, StructureConfig, UpdatingProblem, WeightRule};

fn fe(c: &mut Criterion) {
    let model = StructureConfig::h_structure_default().build().unwrap();
    c.bench_function("assemble 39 dof", |b| b.iter(|| black_box(&model).assemble().unwrap()));
    let matrices = model.assemble().unwrap();
    c.bench_function("solve 5 modes", |b| b.iter(|| solve_modes(black_box(&matrices), 5).unwrap()));
}

fn cost(c: &mut Criterion) {
    let model = StructureConfig::h_structure_default().build().unwrap();
    let bounds = Bounds::uniform(12, 6.0e10, 8.0e10).unwrap();
    let targets = vec![53.9, 117.3, 208.4, 254.0, 445.1];
    let problem = UpdatingProblem::with_weight_rule(model.clone(), targets, WeightRule::PaperRule, bounds).unwrap();
    let params = model.moduli();
    c.bench_function("updating cost", |b| b.iter(|| problem.evaluate(black_box(&params)).unwrap()));
}

fn mlp(c: &mut Criterion) {
    let mut rng = rng_from_seed(0);
    let net = Mlp::random(12, 8, &mut rng);
    let x = vec![0.1; 12];
    c.bench_function("mlp forward 12-8-1", |b| b.iter(|| net.forward(black_box(&x))));
    c.bench_function("mlp gradient 12-8-1", |b| b.iter(|| net.gradient(black_box(&x))));
}

criterion_group!(benches, fe, cost, mlp);
criterion_main!(benches);
