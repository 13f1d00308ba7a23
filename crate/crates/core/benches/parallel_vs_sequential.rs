use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use finedomain::geometry::{set_distance_with, Grid, GridMask, Point};
use finedomain::par::ExecMode;
use finedomain::runge::{RationalFunction, Term};
use finedomain::scenario::{sample_field, Region};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

/// A degree-256 factored term, the shape the Runge stages produce.
fn root_power() -> RationalFunction {
    let roots = (0..256).map(|k| Point::polar(0.8, TAU * k as f64 / 256.0)).collect();
    RationalFunction {
        terms: vec![Term::RootPower { roots, pole: None, power: 3, ln_scale: -40.0, phase: 0.0 }],
        pole_attestations: Vec::new(),
    }
}

fn field_evaluation(c: &mut Criterion) {
    let f = root_power();
    let region = Region { x0: -1.2, y0: -1.2, x1: 1.2, y1: 1.2 };
    let mut g = c.benchmark_group("field_evaluation_128px");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| black_box(sample_field(&f, region, 128, mode).unwrap()))
        });
    }
    g.finish();
}

fn mask_distance(c: &mut Criterion) {
    let grid = Grid::new(Point::new(0.0, 0.0), 1.0 / 256.0);
    let rect = grid.rect_covering(-1.5, -1.5, 1.5, 1.5);
    let disc = GridMask::from_centers(grid, rect, ExecMode::Parallel, |p| p.norm() <= 0.6);
    let ring = GridMask::from_centers(grid, rect, ExecMode::Parallel, |p| (0.8..=1.0).contains(&p.norm()));
    let mut g = c.benchmark_group("set_distance_h256");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| black_box(set_distance_with(&disc, &ring, mode).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, field_evaluation, mask_distance);
criterion_main!(benches);
