use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dpw_cmc::exec::Parallelism;
use dpw_cmc::flow::{self, FlowConfig, PathSpec};
use dpw_cmc::iwasawa::{iwasawa_grid, IwasawaConfig};
use dpw_cmc::loop_core::{LambdaGrid, Mat2};
use dpw_cmc::potential::{CylinderParams, CylinderPotential};
use dpw_cmc::surface::{build_surface, frames_on_grid, DomainGrid, PipelineConfig};
use num_complex::Complex64 as C64;

const MODES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn params() -> CylinderParams {
    CylinderParams::new(1.0 / 3.0).unwrap()
}

fn frame_integration(c: &mut Criterion) {
    let grid = LambdaGrid::new(128).unwrap();
    let ls = grid.points();
    let xi = CylinderPotential::new(params());
    let path = PathSpec::polyline(&[C64::new(0.0, 0.0), C64::new(0.0, 2.0), C64::new(0.8, 2.0)]).unwrap();
    let phi0 = vec![Mat2::identity(); ls.len()];
    let mut g = c.benchmark_group("frame_integration");
    g.sample_size(10);
    for (name, par) in MODES {
        let cfg = FlowConfig {
            parallelism: par,
            ..FlowConfig::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| flow::integrate_frame(&xi, &path, &phi0, &ls, cfg).unwrap())
        });
    }
    g.finish();
}

fn iwasawa_batch(c: &mut Criterion) {
    let grid = LambdaGrid::new(128).unwrap();
    let dom = DomainGrid::new(0.5, 2.0, 8, 8).unwrap();
    let cfg = FlowConfig::default();
    let phi0 = flow::cylinder_initial_frames(&params(), &grid.points(), &cfg).unwrap();
    let frames = frames_on_grid(&CylinderPotential::new(params()), &phi0, &dom, &grid, &cfg).unwrap();
    let icfg = IwasawaConfig::with_degree(32);
    let mut g = c.benchmark_group("iwasawa_grid");
    g.sample_size(10);
    for (name, par) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| iwasawa_grid(&grid, &frames, dom.n_angular + 1, &icfg, par))
        });
    }
    g.finish();
}

fn surface(c: &mut Criterion) {
    let grid = LambdaGrid::new(64).unwrap();
    let dom = DomainGrid::new(0.3, 3.0, 16, 16).unwrap();
    let mut g = c.benchmark_group("build_surface");
    g.sample_size(10);
    for (name, par) in MODES {
        let mut cfg = PipelineConfig::with_degree(16);
        cfg.flow.parallelism = par;
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| build_surface(&params(), &dom, &grid, cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, frame_integration, iwasawa_batch, surface);
criterion_main!(benches);
