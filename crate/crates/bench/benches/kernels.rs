use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use singzone_bench::{generic_state, params};
use singzone_core::decoupling::YAWPOS_OUTPUTS;
use singzone_core::liederiv::numeric_rows;
use singzone_core::sim::rk4_step;
use singzone_core::singularity::{scan_grid, zero_contour, GridAxis, ScanKind};
use singzone_core::{delta_yawpos, drift_field, s_value, yawpos_system, VirtualInput};

fn bench_pointwise(c: &mut Criterion) {
    let p = params();
    let s = generic_state();

    c.bench_function("drift_field", |b| {
        b.iter(|| drift_field(black_box(&s), black_box(&p)).unwrap())
    });

    c.bench_function("delta_closed_form", |b| {
        b.iter(|| delta_yawpos(black_box(&s), black_box(&p)).unwrap())
    });

    c.bench_function("numeric_rows_jet", |b| {
        b.iter(|| numeric_rows(black_box(&YAWPOS_OUTPUTS), black_box(&s), black_box(&p)).unwrap())
    });

    c.bench_function("yawpos_system_full", |b| {
        b.iter(|| yawpos_system(black_box(&s), black_box(&p)).unwrap())
    });

    c.bench_function("rk4_step", |b| {
        let u = VirtualInput::from_array([0.5, 0.02, -0.03, 0.01]);
        b.iter(|| rk4_step(black_box(&s), black_box(&u), black_box(&p), black_box(1e-3)).unwrap())
    });

    c.bench_function("s_value", |b| {
        b.iter(|| s_value(black_box(0.37), black_box(-0.21)))
    });
}

fn bench_grid(c: &mut Criterion) {
    let p = params();
    let axis = GridAxis::symmetric(1.5, 101).unwrap();

    c.bench_function("scan_det_oracle_101", |b| {
        b.iter(|| scan_grid(axis, axis, ScanKind::DetOracle, 0.0, 9.81, &p).unwrap())
    });

    let s_scan = scan_grid(axis, axis, ScanKind::SFunction, 0.0, 9.81, &p).unwrap();
    c.bench_function("zero_contour_101", |b| {
        b.iter(|| zero_contour(black_box(&s_scan)).unwrap())
    });
}

criterion_group!(benches, bench_pointwise, bench_grid);
criterion_main!(benches);
