//! Criterion benchmarks for the eigenvalue and mountain-pass solvers.

use std::hint::black_box;

use criterion::Criterion;
use graph_yamabe::prelude::*;

fn grid_problem() -> (WeightedGraph, DomainDecomposition) {
    let g = generate(&Family::Grid(8, 8), MeasureRule::Unit, &WeightRule::Unit).expect("grid");
    let omega: Vec<usize> = (8..64).collect();
    let dom = DomainDecomposition::new(&g, &omega).expect("domain");
    (g, dom)
}

pub fn benchmarks(c: &mut Criterion) {
    let (grid, grid_dom) = grid_problem();
    c.bench_function("lambda1 grid(8,8)", |b| b.iter(|| lambda1(black_box(&grid), &grid_dom).unwrap()));
    c.bench_function("lambda_p p=3 grid(8,8)", |b| {
        b.iter(|| lambda_p(black_box(&grid), &grid_dom, 3.0).unwrap())
    });

    let path = generate(&Family::Path(5), MeasureRule::Unit, &WeightRule::Unit).expect("path");
    let toy_dom = DomainDecomposition::from_ids(&path, &["b", "c", "d"]).expect("domain");
    let toy = ProblemSpec::thm1(&path, &toy_dom, 0.0, 4.0).expect("toy problem");
    let cfg = SolverConfig::default();
    c.bench_function("mountain pass toy", |b| b.iter(|| mountain_pass_solve(black_box(&toy), &cfg).unwrap()));

    let lambda = lambda1(&grid, &grid_dom).expect("eigenvalue").value;
    let local = ProblemSpec::thm1(&grid, &grid_dom, 0.5 * lambda, 3.0).expect("grid problem");
    let mut group = c.benchmark_group("grid(8,8)");
    group.sample_size(10);
    group.bench_function("mountain pass", |b| b.iter(|| mountain_pass_solve(black_box(&local), &cfg).unwrap()));
    group.bench_function("nehari", |b| b.iter(|| nehari_solve(black_box(&local), &cfg).unwrap()));
    group.finish();
}
