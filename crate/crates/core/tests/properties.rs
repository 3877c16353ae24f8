use std::f64::consts::PI;

use num_complex::Complex64;
use pompeiu_core::chi_transform::{chi_ft, chi_ft_analytic, chi_ft_numeric, spherical_zero_scan, QuadratureBudget, ScanParams};
use pompeiu_core::geometry::surface_normal;
use pompeiu_core::overdetermined::{boundary_defect, solve_ball, to_conjecture5};
use pompeiu_core::pompeiu_fields::{
    ball_radial_integral, dbar_integral, morera_contour, two_radii_test, CounterexampleField, PlanarGrid,
};
use pompeiu_core::chi_transform::integrate_over_domain;
use pompeiu_core::symmetry::{cross_residual, sphere_decision};
use pompeiu_core::{
    bessel_j, bessel_zeros, random_motion, spherical_j, BesselOrder, Domain, RadialFunction, RigidMotion,
    SurfaceParametrization,
};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn domain(kind: u8, dim: usize) -> Domain {
    match (kind % 3, dim) {
        (0, d) => Domain::ball(&vec![0.2; d], 0.9).unwrap(),
        (1, 2) => Domain::ellipsoid(&[1.0, 0.6]).unwrap(),
        (1, _) => Domain::ellipsoid(&[1.0, 0.7, 1.3]).unwrap(),
        (_, 2) => Domain::polygon(&[[0.0, 0.0], [1.2, -0.1], [1.0, 0.9], [0.1, 0.7]]).unwrap(),
        (_, _) => Domain::ellipsoid(&[0.5, 0.8, 0.6]).unwrap(),
    }
}

fn xi_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-6.0..6.0f64, dim)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn spherical_j_matches_half_integer_bessel(ell in 0usize..3, x in 0.1..50.0f64) {
        let order = BesselOrder::from_two_nu(2 * ell as u32 + 1).unwrap();
        let want = (PI / (2.0 * x)).sqrt() * bessel_j(order, x).unwrap();
        prop_assert!((spherical_j(ell, x).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn motions_compose(s1 in any::<u64>(), s2 in any::<u64>(), kind in 0u8..3, dim in 2usize..4,
                       x in prop::collection::vec(-4.0..4.0f64, 3)) {
        let d = domain(kind, dim);
        let (a, b) = (random_motion(s1, 2.0, dim).unwrap(), random_motion(s2, 2.0, dim).unwrap());
        let moved = d.apply_motion(&a).unwrap().apply_motion(&b).unwrap();
        let x = &x[..dim];
        let back = a.apply_inverse(&b.apply_inverse(x));
        prop_assert_eq!(moved.indicator(x), d.indicator(&back));
        prop_assert!((moved.volume() - d.volume()).abs() < 1e-10);
    }

    #[test]
    fn surface_normals_are_unit(p in 0.05..3.09f64, q in 0.0..6.28f64, seed in any::<u64>()) {
        let sigma = random_motion(seed, 1.0, 3).unwrap();
        let e = SurfaceParametrization::ellipsoid([0.1, 0.0, -0.3], [1.0, 0.6, 1.7], None).transformed(&sigma).unwrap();
        let n = surface_normal(&e, p, q).unwrap();
        prop_assert!((n.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry(kind in 0u8..3, dim in 2usize..4, xi in xi_strategy(3)) {
        let d = domain(kind, dim);
        let xi = &xi[..dim];
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        let tol = 1e-12 * d.volume();
        let (a, b) = (chi_ft(&d, xi).unwrap().value, chi_ft(&d, &neg).unwrap().value);
        prop_assert!((a - b.conj()).norm() < tol);
        let budget = QuadratureBudget::grid(16);
        let (a, b) = (chi_ft_numeric(&d, xi, &budget).unwrap().value, chi_ft_numeric(&d, &neg, &budget).unwrap().value);
        prop_assert!((a - b.conj()).norm() < tol);
    }

    #[test]
    fn motion_covariance(kind in 0u8..3, dim in 2usize..4, seed in any::<u64>(), xi in xi_strategy(3)) {
        let d = domain(kind, dim);
        let xi = &xi[..dim];
        let sigma = random_motion(seed, 2.0, dim).unwrap();
        let moved = d.apply_motion(&sigma).unwrap();
        // chi_{sigma D}(xi) = e^{i xi.t} chi_D(R^T xi)
        let pulled = sigma.rotate_inverse(xi);
        let base = chi_ft_analytic(&d, &pulled).unwrap().unwrap();
        let analytic = chi_ft_analytic(&moved, xi).unwrap().unwrap();
        let tol = 1e-11 * d.volume();
        prop_assert!((analytic.norm() - base.norm()).abs() < tol);
        let t: f64 = xi.iter().zip(sigma.translation().iter()).map(|(a, b)| a * b).sum();
        prop_assert!((analytic - Complex64::from_polar(1.0, t) * base).norm() < tol);
        let numeric = chi_ft_numeric(&moved, xi, &QuadratureBudget::grid(48)).unwrap();
        prop_assert!((numeric.value - analytic).norm() <= numeric.error + tol, "{:?} vs {}", numeric, analytic);
    }

    #[test]
    fn radial_field_is_rotation_invariant(b in 0.5..5.0f64, dim in 2usize..4, seed in any::<u64>(),
                                          x in prop::collection::vec(-1.7..1.7f64, 3)) {
        let f = CounterexampleField::radial(b, dim).unwrap();
        let x = &x[..dim];
        let r = random_motion(seed, 0.0, dim).unwrap();
        prop_assert!((f.eval(x) - f.eval(&r.rotate(x))).norm() < 1e-14);
    }

    #[test]
    fn two_radii_symmetric(r1 in 0.1..20.0f64, r2 in 0.1..20.0f64) {
        let a = two_radii_test(r1, r2, 60, 1e-6).unwrap();
        let b = two_radii_test(r2, r1, 60, 1e-6).unwrap();
        prop_assert_eq!(std::mem::discriminant(&a.verdict), std::mem::discriminant(&b.verdict));
        prop_assert_eq!(a.min_gap, b.min_gap);
    }

    #[test]
    fn no_solution_away_from_zeros(n in 2usize..4, ka in 0.5..10.0f64) {
        let zeros: Vec<f64> = bessel_zeros(BesselOrder::for_dimension(n).unwrap(), 5).unwrap().iter().map(|z| z.value).collect();
        prop_assume!(zeros.iter().all(|z| (z - ka).abs() > 0.1));
        prop_assert!(boundary_defect(1.0, ka, n).unwrap() > 1e-3);
    }

    #[test]
    fn overdetermined_scaling(n in 2usize..4, j in 1usize..5, a in 0.3..3.0f64, t in 0.0..1.0f64) {
        let (unit, big) = (solve_ball(1.0, j, n).unwrap(), solve_ball(a, j, n).unwrap());
        prop_assert!((big.k * a - unit.k).abs() < 1e-12 * unit.k);
        let want = a * a * unit.u(t);
        prop_assert!((big.u(a * t) - want).abs() < 1e-12 * (1.0 + want.abs()));
        let c5 = to_conjecture5(&big);
        for ((r, u), (r2, u2)) in big.profile.iter().zip(c5.to_solution_profile()) {
            prop_assert_eq!(*r, r2);
            prop_assert!((u - u2).abs() <= 4.0 * f64::EPSILON * c5.shift);
        }
    }

    #[test]
    fn cross_residual_equivariance(seed in any::<u64>(), c in prop::collection::vec(-0.3..0.3f64, 3)) {
        let surf = SurfaceParametrization::ellipsoid([0.0; 3], [1.0, 1.2, 0.8], None).with_nodes(17, 33);
        let sigma = random_motion(seed, 3.0, 3).unwrap();
        let base = cross_residual(&surf, &c).unwrap();
        let moved = cross_residual(&surf.transformed(&sigma).unwrap(), &sigma.apply(&c)).unwrap();
        prop_assert!((base - moved).abs() < 1e-12);
        let shift = RigidMotion::translation_by(sigma.translation().as_slice());
        let shifted = cross_residual(&surf.transformed(&shift).unwrap(), &shift.apply(&c)).unwrap();
        prop_assert!((base - shifted).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn scan_finds_scaled_ball_shells(a in 0.6..2.0f64) {
        let zeros: Vec<f64> = bessel_zeros(BesselOrder::THREE_HALVES, 3).unwrap().iter().map(|z| z.value).collect();
        let ball = Domain::ball(&[0.0; 3], a).unwrap();
        let scan = spherical_zero_scan(&ball, &ScanParams::new((zeros[2] + 0.5) / a, 800, 512, 1e-8)).unwrap();
        prop_assert_eq!(scan.candidate_shells.len(), 3);
        for (s, z) in scan.candidate_shells.iter().zip(&zeros) {
            prop_assert!((s.k - z / a).abs() < 1e-6);
        }
    }

    #[test]
    fn grid_matches_radial_reduction(b in 1.0..5.0f64, dim in 2usize..4,
                                     y in prop::collection::vec(-3.0..3.0f64, 3), a in 0.4..1.5f64) {
        let f = CounterexampleField::radial(b, dim).unwrap();
        let y = &y[..dim];
        let d = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let fine = ball_radial_integral(|r| f.radial_profile(r), dim, d, a, b, 32);
        let coarse = ball_radial_integral(|r| f.radial_profile(r), dim, d, a, b, 16);
        let grid = integrate_over_domain(&Domain::ball(y, a).unwrap(), |x: &[f64]| f.eval(x), &QuadratureBudget::grid(48)).unwrap();
        prop_assert!((grid.value.re - fine).abs() <= grid.error + (fine - coarse).abs() + 1e-12);
    }

    #[test]
    fn green_identity(seed in any::<u64>(), r in 0.3..0.8f64) {
        // f = |z|^2 has dbar f = z
        let f = |x: f64, y: f64| Complex64::new(x * x + y * y, 0.0);
        let disc = Domain::ball(&[0.0; 2], r).unwrap();
        let sigma = random_motion(seed, 0.5, 2).unwrap();
        let moved = disc.apply_motion(&sigma).unwrap();
        let h = 1e-3;
        let grid = PlanarGrid::covering(f, [-1.5, -1.5], [1.5, 1.5], h).unwrap();
        let contour = morera_contour(&f, &disc, &sigma, 512).unwrap();
        let area = dbar_integral(&grid, &moved);
        // staircase boundary: error ~ 2 h perimeter sup |dbar f|
        let sup = 0.5 + r;
        prop_assert!((contour - area).norm() < 2.0 * h * 2.0 * PI * r * sup * 2.0);
    }

    #[test]
    fn sphericity_chain_bounds(amp in 1e-4..1e-2f64, m in 1i64..3) {
        let mut c = vec![0.0; 9];
        c[0] = 2.0 * PI.sqrt();
        c[pompeiu_core::specfun::harmonic_index(2, m)] = amp;
        let dom = Domain::star(&[0.0; 3], RadialFunction::Harmonics { coefficients: c }).unwrap();
        let surf = SurfaceParametrization::from_domain(&dom).unwrap().with_nodes(33, 65);
        let rep = sphere_decision(&surf, 1e-6).unwrap();
        let (mut sp, mut sq) = (0.0_f64, 0.0_f64);
        for (p, q) in surf.nodes() {
            let (a, b) = surf.partials(p, q);
            sp = sp.max(a.iter().map(|v| v * v).sum::<f64>().sqrt());
            sq = sq.max(b.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        // |(s - c) . s_p| <= |(s - c) x N| |s_p| since s_p is tangent
        let eps = rep.sup_cross_residual;
        prop_assert!(rep.max_dss_dp <= 2.0 * eps * sp * (1.0 + 1e-9) + 1e-12);
        prop_assert!(rep.max_dss_dq <= 2.0 * eps * sq * (1.0 + 1e-9) + 1e-12);
        let rmin = rep.mean_radius - rep.radius_variation;
        prop_assert!(rep.radius_variation <= eps / rmin * PI * (sp + sq) + 1e-12);
    }
}

#[test]
fn j32_zero_residuals() {
    for z in bessel_zeros(BesselOrder::THREE_HALVES, 50).unwrap() {
        let s = z.value;
        assert!((s * s.cos() - s.sin()).abs() < 1e-10, "zero {} at {s}", z.index);
    }
}

#[test]
fn zeros_interlace() {
    for (lo, hi) in [(BesselOrder::HALF, BesselOrder::THREE_HALVES), (BesselOrder::ONE, BesselOrder::TWO)] {
        let a = bessel_zeros(lo, 51).unwrap();
        let b = bessel_zeros(hi, 50).unwrap();
        for j in 0..50 {
            assert!(a[j].value < b[j].value && b[j].value < a[j + 1].value, "interlacing breaks at {}", j + 1);
        }
    }
}

#[test]
fn planar_grid_round_trips() {
    let g = PlanarGrid::covering(|x, y| Complex64::new(x.sin(), y * x), [-0.3, 0.1], [0.4, 0.5], 0.05).unwrap();
    assert_eq!(PlanarGrid::from_bytes(&g.to_bytes()).unwrap(), g);
    let back = PlanarGrid::from_csv(&g.to_csv()).unwrap();
    assert!((back.at(3, 2) - g.at(3, 2)).norm() < 1e-15);
}

#[test]
fn motion_json_round_trip() {
    let m = random_motion(5, 2.0, 3).unwrap();
    let back: RigidMotion = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back, m);
}
