use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use z6_bench::{at_sigma_plus, example};
use z6_core::abel::region_report;
use z6_core::dynamics::{return_map, scan_cycles};
use z6_core::equilibria::{brute_force_equilibria, solve_equilibria};
use z6_core::geometry::{build_polygonal, real_roots, restricted_scalar_product};

fn equilibria(c: &mut Criterion) {
    let mut g = c.benchmark_group("equilibria");
    for (name, p) in [("one", example(3.3)), ("seven", at_sigma_plus()), ("thirteen", example(1.0))] {
        g.bench_with_input(BenchmarkId::new("closed_form", name), &p, |b, p| b.iter(|| solve_equilibria(black_box(p))));
    }
    g.sample_size(10);
    g.bench_function("grid_400", |b| b.iter(|| brute_force_equilibria(black_box(&example(1.0)), 400)));
    g.finish();
}

fn abel(c: &mut Criterion) {
    let p = at_sigma_plus();
    c.bench_function("region_report", |b| b.iter(|| region_report(black_box(&p))));
}

fn return_maps(c: &mut Criterion) {
    let p = example(3.3);
    let mut g = c.benchmark_group("return_map");
    for rho in [0.5, 3.5, 20.0] {
        g.bench_with_input(BenchmarkId::from_parameter(rho), &rho, |b, &rho| b.iter(|| return_map(&p, black_box(rho), 1e-10)));
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan_cycles");
    g.sample_size(10);
    g.bench_function("p1_3.3", |b| b.iter(|| scan_cycles(black_box(&example(3.3)), 30.0, 120)));
    g.finish();
}

fn geometry(c: &mut Criterion) {
    let p = at_sigma_plus();
    let slope = 0.5114 / 0.8594;
    c.bench_function("quintic_roots", |b| {
        b.iter(|| {
            let poly = restricted_scalar_product(&p, (0.0, 1.5 - slope * 1.358), (1.0, slope), (0.5114, -0.8594));
            real_roots(black_box(&poly))
        })
    });
    c.bench_function("polygonal", |b| b.iter(|| build_polygonal(black_box(&p))));
}

criterion_group!(benches, equilibria, abel, return_maps, scan, geometry);
criterion_main!(benches);
