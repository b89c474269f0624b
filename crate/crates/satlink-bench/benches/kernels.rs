//! Hot-path timings: the Marcum Q function (series vs fit), both coverage
//! routes, the interference triple sum, the satellite-hop outage quadrature,
//! the allocation solver and a small Monte-Carlo batch.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use satlink_core::analytic::{
    cdf_gamma_rd_interference, coverage_ni_approx, coverage_ni_exact, outage_sr,
};
use satlink_core::montecarlo::{mc_estimate, McConfig, McInputs, Scenario};
use satlink_core::optimizer::optimize;
use satlink_core::specfun::{marcum_q1, marcum_q1_approx};
use satlink_core::{
    GeometryParams, InterferenceParams, LinkBudget, OptimizeOptions, QuadratureOrders,
    RicianParams, ShadowedRicianParams,
};

fn db(v: f64) -> f64 {
    10f64.powf(v / 10.0)
}

fn geom(h1_km: f64, l_km: f64, t_i_km: f64) -> GeometryParams {
    GeometryParams::new(
        h1_km,
        l_km,
        t_i_km,
        6371.0,
        8371.0,
        6531.0,
        std::f64::consts::FRAC_PI_3,
        0.01,
    )
    .unwrap()
}

fn bench_marcum(c: &mut Criterion) {
    let a = (2.0f64 * 0.1).sqrt();
    c.bench_function("marcum_q1_series", |bench| {
        bench.iter(|| marcum_q1(black_box(a), black_box(1.3)).unwrap())
    });
    c.bench_function("marcum_q1_fit", |bench| {
        bench.iter(|| marcum_q1_approx(black_box(a), black_box(1.3)).unwrap())
    });
}

fn bench_coverage(c: &mut Criterion) {
    let g = geom(5.0, 20.0, 30.0);
    let ric = RicianParams::new(db(-10.0), db(15.0)).unwrap();
    c.bench_function("coverage_exact_integral", |bench| {
        bench.iter(|| coverage_ni_exact(black_box(&g), &ric, black_box(1.0), 2.0).unwrap())
    });
    c.bench_function("coverage_closed_form", |bench| {
        bench.iter(|| coverage_ni_approx(black_box(&g), &ric, black_box(1.0), 2.0).unwrap())
    });
}

fn bench_interference(c: &mut Criterion) {
    let g = geom(5.0, 5.0, 30.0);
    let serving = RicianParams::new(db(-10.0), db(5.0)).unwrap();
    let ip = InterferenceParams::from_link(&serving, 1.0, db(1.0), db(1.0), 1.0).unwrap();
    let orders = QuadratureOrders::uniform(50);
    c.bench_function("interference_cdf_triple_sum_50", |bench| {
        bench.iter(|| {
            cdf_gamma_rd_interference(black_box(1.0), &g, &ip, 2.0, &orders).unwrap()
        })
    });
}

fn bench_outage(c: &mut Criterion) {
    let g = geom(5.0, 20.0, 30.0);
    let sr = ShadowedRicianParams::new(10.0, 2, 1.0, db(57.0)).unwrap();
    let orders = QuadratureOrders::uniform(50);
    c.bench_function("satellite_outage_quadrature_50", |bench| {
        bench.iter(|| outage_sr(black_box(&g), &sr, black_box(1.0), &orders).unwrap())
    });
}

fn bench_optimize(c: &mut Criterion) {
    let budget = LinkBudget::new(1e7, 1e7, 1e7, 10.0, 50.0, 10.0, 2.0, 5.0).unwrap();
    let options = OptimizeOptions::default();
    c.bench_function("allocation_solver", |bench| {
        bench.iter(|| optimize(black_box(&budget), &options).unwrap())
    });
}

fn bench_monte_carlo(c: &mut Criterion) {
    let g = geom(5.0, 20.0, 30.0);
    let ric = RicianParams::new(db(-10.0), db(15.0)).unwrap();
    let mut inputs = McInputs::new(&g);
    inputs.rician = Some(&ric);
    let config = McConfig { trials: 10_000, seed: 1, scenario: Scenario::CoverageNi };
    c.bench_function("mc_coverage_10k_trials", |bench| {
        bench.iter(|| mc_estimate(black_box(&config), &inputs).unwrap())
    });
}

criterion_group!(
    kernels,
    bench_marcum,
    bench_coverage,
    bench_interference,
    bench_outage,
    bench_optimize,
    bench_monte_carlo
);
criterion_main!(kernels);
