use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pompeiu_core::chi_transform::{chi_ft_ellipsoid, chi_ft_numeric, spherical_zero_scan, QuadratureBudget, ScanParams};
use pompeiu_core::pompeiu_fields::{verify_pompeiu, CounterexampleField};
use pompeiu_core::symmetry::sphere_decision;
use pompeiu_core::{bessel_j, bessel_zeros, BesselOrder, Domain, SurfaceParametrization};

fn special_functions(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    for order in [BesselOrder::ZERO, BesselOrder::THREE_HALVES] {
        g.bench_with_input(BenchmarkId::new("bessel_j", order.two_nu()), &order, |b, &o| {
            b.iter(|| (0..100).map(|i| bessel_j(o, black_box(0.37 * i as f64)).unwrap()).sum::<f64>())
        });
    }
    g.bench_function("bessel_zeros_200", |b| b.iter(|| bessel_zeros(BesselOrder::ONE, black_box(200)).unwrap()));
    g.finish();
}

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("chi_transform");
    g.bench_function("ellipsoid_analytic", |b| {
        b.iter(|| chi_ft_ellipsoid(&[1.0, 1.0, 1.4], black_box(&[0.3, -1.2, 2.0])).unwrap())
    });
    let ell = Domain::ellipsoid(&[1.0, 1.0, 1.4]).unwrap();
    for res in [16, 48] {
        g.bench_with_input(BenchmarkId::new("polar_grid", res), &res, |b, &r| {
            b.iter(|| chi_ft_numeric(&ell, black_box(&[0.3, -1.2, 2.0]), &QuadratureBudget::grid(r)).unwrap())
        });
    }
    g.sample_size(10);
    g.bench_function("scan_ball_k10", |b| {
        let ball = Domain::ball(&[0.0; 3], 1.0).unwrap();
        b.iter(|| spherical_zero_scan(&ball, &ScanParams::new(10.0, 500, 512, 1e-8)).unwrap())
    });
    g.finish();
}

fn verification(c: &mut Criterion) {
    let mut g = c.benchmark_group("verification");
    g.sample_size(10);
    let s = bessel_zeros(BesselOrder::THREE_HALVES, 1).unwrap()[0].value;
    let field = CounterexampleField::radial(s, 3).unwrap();
    let ball = Domain::ball(&[0.0; 3], 1.0).unwrap();
    g.bench_function("radial_100_motions", |b| {
        b.iter(|| verify_pompeiu(&field, &ball, 100, 5.0, 1, &QuadratureBudget::default()).unwrap())
    });
    let surf = SurfaceParametrization::ellipsoid([0.0; 3], [1.0, 1.0, 1.05], None).with_nodes(65, 129);
    g.bench_function("sphere_decision_65x129", |b| b.iter(|| sphere_decision(&surf, 1e-3).unwrap()));
    g.finish();
}

criterion_group!(benches, special_functions, transforms, verification);
criterion_main!(benches);
