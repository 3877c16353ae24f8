//! The acceptance suite: twelve pinned numerical checks of the whole
//! laboratory, each reduced to a list of measured quantities and limits.
//!
//! Reference zeros come from bisection on the defining elementary functions
//! (or frozen high-precision values for `J_1`), never from [`crate::specfun`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chi_transform::{
    chi_ft_ball, conjecture6_integral, ellipsoid_formula_check, factorization_check, spherical_zero_scan,
    ComplexDirection, FactorVerdict, QuadratureBudget, ScanParams,
};
use crate::error::Result;
use crate::geometry::{Domain, RadialFunction, RigidMotion, SurfaceParametrization};
use crate::overdetermined::{derive_spherical_zero, residual_check, solve_ball, solve_with_wavenumber, to_conjecture5};
use crate::pompeiu_fields::{
    morera_contour, two_radii_test, verify_pompeiu, wirtinger_residual, CounterexampleField, PlanarGrid,
    TwoRadiiVerdict, Verdict,
};
use crate::specfun::harmonic_index;
use crate::symmetry::{sphere_decision, SphereVerdict, SymmetryReport};

/// First two positive zeros of `J_1` (mpmath, 30 digits).
pub const J1_ZEROS: [f64; 2] = [3.831_705_970_207_512_315_6, 7.015_586_669_815_618_753_5];

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

pub const CRITERION_COUNT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Below,
    Above,
    Holds,
}

/// One measured quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn below(label: &str, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            relation: Relation::Below,
            limit,
            passed: value < limit,
        }
    }

    pub fn above(label: &str, value: f64, limit: f64) -> Self {
        Self {
            label: label.into(),
            value,
            relation: Relation::Above,
            limit,
            passed: value > limit,
        }
    }

    /// A boolean fact, recorded as 1 or 0.
    pub fn holds(label: &str, ok: bool) -> Self {
        Self {
            label: label.into(),
            value: if ok { 1.0 } else { 0.0 },
            relation: Relation::Holds,
            limit: 1.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Set when the computation itself failed.
    pub error: Option<String>,
}

impl CriterionOutcome {
    fn new(id: usize, checks: Vec<Check>) -> Self {
        Self {
            id,
            name: criterion_name(id).into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            error: None,
        }
    }

    fn failed(id: usize, err: String) -> Self {
        Self {
            id,
            name: criterion_name(id).into(),
            passed: false,
            checks: Vec::new(),
            error: Some(err),
        }
    }

    /// `criterion  7 PASS  sphericity detector`.
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:>2} {}  {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub criteria: Vec<CriterionOutcome>,
    pub passed: usize,
    pub all_passed: bool,
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "ball transform normalisation",
        2 => "spherical zero shells of ball and disk",
        3 => "counterexample field over 100 motions",
        4 => "overdetermined ball problem",
        5 => "ellipsoids have no zero shell",
        6 => "ellipsoid transform against Monte Carlo",
        7 => "sphericity detector",
        8 => "Morera contour and Wirtinger residual",
        9 => "two-radii criterion",
        10 => "complex-direction integral",
        11 => "factorisation across a shell",
        12 => "seeded determinism",
        _ => "unknown",
    }
}

/// Positive zeros of `x cos x - sin x` (the `J_{3/2}` zeros), by bisection
/// on `(j pi, j pi + pi / 2)`.
pub fn tan_fixed_points(count: usize) -> Vec<f64> {
    let f = |x: f64| x * x.cos() - x.sin();
    (1..=count)
        .map(|j| {
            let (mut lo, mut hi) = (j as f64 * PI, j as f64 * PI + PI / 2.0);
            let flo = f(lo);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (f(mid) > 0.0) == (flo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn criterion_1() -> Result<CriterionOutcome> {
    let v3 = chi_ft_ball(1.0, 3, 1e-8)?;
    let v2 = chi_ft_ball(1.0, 2, 1e-8)?;
    Ok(CriterionOutcome::new(
        1,
        vec![
            Check::below("|chi(1e-8) - 4pi/3|, n = 3", (v3 - 4.0 * PI / 3.0).norm(), 1e-9),
            Check::below("|chi(1e-8) - pi|, n = 2", (v2 - PI).norm(), 1e-9),
        ],
    ))
}

pub fn criterion_2() -> Result<CriterionOutcome> {
    let zeros = tan_fixed_points(2);
    let ball = spherical_zero_scan(&Domain::ball(&[0.0; 3], 1.0)?, &ScanParams::new(10.0, 1000, 512, 1e-8))?;
    let disk = spherical_zero_scan(&Domain::ball(&[0.0; 2], 1.0)?, &ScanParams::new(5.0, 500, 512, 1e-8))?;
    let shells: Vec<f64> = ball.candidate_shells.iter().map(|c| c.k).collect();
    let mut checks = vec![Check::holds("ball reports exactly two shells", shells.len() == 2)];
    for (i, z) in zeros.iter().enumerate() {
        let err = shells.get(i).map_or(f64::INFINITY, |k| (k - z).abs());
        checks.push(Check::below(&format!("ball shell {} error", i + 1), err, 1e-6));
    }
    let first = disk.candidate_shells.first().map_or(f64::INFINITY, |c| (c.k - J1_ZEROS[0]).abs());
    checks.push(Check::below("disk first shell error", first, 1e-6));
    Ok(CriterionOutcome::new(2, checks))
}

pub fn criterion_3(seed: u64) -> Result<CriterionOutcome> {
    let ball = Domain::ball(&[0.0; 3], 1.0)?;
    let budget = QuadratureBudget::default();
    let b = tan_fixed_points(1)[0];
    let on = verify_pompeiu(&CounterexampleField::radial(b, 3)?, &ball, 100, 5.0, seed, &budget)?;
    let off = verify_pompeiu(&CounterexampleField::radial(4.0, 3)?, &ball, 100, 5.0, seed, &budget)?;
    Ok(CriterionOutcome::new(
        3,
        vec![
            Check::holds("on-shell verdict is pass", on.verdict == Verdict::Pass),
            Check::below("on-shell max_abs / normalisation", on.max_abs / on.normalization, 1e-6),
            Check::holds("b = 4 verdict is fail", off.verdict == Verdict::Fail),
            Check::above("b = 4 max_abs / pass threshold", off.max_abs / off.tolerance, 1e3),
        ],
    ))
}

pub fn criterion_4() -> Result<CriterionOutcome> {
    let sol = solve_ball(1.0, 1, 3)?;
    let res = residual_check(&sol, 2001)?;
    let derived = derive_spherical_zero(&sol, 64)?;
    let detuned = solve_with_wavenumber(1.0, sol.k + 1e-3, 3)?;
    let c5 = to_conjecture5(&sol);
    Ok(CriterionOutcome::new(
        4,
        vec![
            Check::below("pde residual", res.pde_residual, 1e-11),
            Check::below("|u(a)|", res.dirichlet, 1e-12),
            Check::below("|u'(a)|", res.neumann, 1e-10),
            Check::below("max |chi_B(k alpha)|", derived.max_abs, 1e-10),
            Check::above("|u'(a)| with k + 1e-3", detuned.du(1.0).abs(), 1e-5),
            Check::below("round trip through v = u - 1/k^2", c5.round_trip_error, 1e-15),
        ],
    ))
}

pub fn criterion_5() -> Result<CriterionOutcome> {
    let mut checks = Vec::new();
    for (label, axes, steps) in [("ellipse (1, 1.5)", vec![1.0, 1.5], 1200), ("ellipsoid (1, 1, 1.4)", vec![1.0, 1.0, 1.4], 1200)] {
        let dom = Domain::ellipsoid(&axes)?;
        let mut mins = Vec::new();
        for mesh in [512, 2048] {
            let scan = spherical_zero_scan(&dom, &ScanParams::new(12.0, steps, mesh, 1e-8))?;
            checks.push(Check::holds(&format!("{label}, {mesh} directions: no candidate shell"), scan.candidate_shells.is_empty()));
            let m = scan.min_relative_sup();
            checks.push(Check::above(&format!("{label}, {mesh} directions: min_k sup / volume"), m, 1e-3));
            mins.push(m);
        }
        checks.push(Check::below(&format!("{label}: relative change between meshes"), (mins[0] - mins[1]).abs() / mins[1], 0.1));
    }
    Ok(CriterionOutcome::new(5, checks))
}

/// Twenty frequencies with components uniform in `[-4, 4]`.
pub fn random_frequencies(seed: u64, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(6);
    (0..count)
        .map(|_| (0..dim).map(|_| 8.0 * rng.random::<f64>() - 4.0).collect())
        .collect()
}

fn ellipsoid_agreement(seed: u64, samples: u64) -> Result<Vec<Check>> {
    let axes = [1.0, 1.0, 1.4];
    let mut worst = 0.0_f64;
    let mut flagged = 0;
    let mut factor = 0.0_f64;
    for (i, xi) in random_frequencies(seed, 20, 3).iter().enumerate() {
        let c = ellipsoid_formula_check(&axes, xi, samples, seed.wrapping_add(i as u64))?;
        worst = worst.max(c.z_score);
        if !c.displayed_consistent {
            flagged += 1;
        }
        if c.discrepancy_factor.is_finite() {
            factor = factor.max((c.discrepancy_factor - 1.4).abs());
        }
    }
    Ok(vec![
        Check::below("max |analytic - MC| / standard error", worst, 3.0),
        Check::holds("displayed formula flagged inconsistent", flagged > 0),
        Check::below("|analytic / displayed - prod a_j|", factor, 1e-12),
    ])
}

pub fn criterion_6(seed: u64) -> Result<CriterionOutcome> {
    Ok(CriterionOutcome::new(6, ellipsoid_agreement(seed, 10_000_000)?))
}

/// Unit sphere with a `Y_21` ripple of the given amplitude.
pub fn rippled_sphere(amplitude: f64) -> Result<SurfaceParametrization> {
    let mut c = vec![0.0; 9];
    c[0] = 2.0 * PI.sqrt();
    c[harmonic_index(2, 1)] = amplitude;
    SurfaceParametrization::from_domain(&Domain::star(&[0.0; 3], RadialFunction::Harmonics { coefficients: c })?)
}

pub fn criterion_7() -> Result<CriterionOutcome> {
    let center = [0.3, -0.2, 0.5];
    let sphere = sphere_decision(&SurfaceParametrization::sphere(center, 1.5), 1e-6)?;
    let center_err = sphere
        .best_center
        .iter()
        .zip(center)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let ell = sphere_decision(&SurfaceParametrization::ellipsoid([0.0; 3], [1.0, 1.0, 1.05], None), 1e-3)?;
    let amps = [1e-2, 1e-3, 1e-4];
    let reports: Vec<SymmetryReport> = amps
        .iter()
        .map(|&a| sphere_decision(&rippled_sphere(a)?, 1e-6))
        .collect::<Result<_>>()?;
    let slope = |f: fn(&SymmetryReport) -> f64| loglog_slope(&amps, &reports.iter().map(f).collect::<Vec<_>>());
    let mut checks = vec![
        Check::holds("off-centre sphere verdict is sphere", sphere.verdict == SphereVerdict::Sphere),
        Check::below("recovered centre error", center_err, 1e-6),
        Check::holds("axis ratio 1.05 verdict is non-sphere", ell.verdict == SphereVerdict::NonSphere),
    ];
    for (label, s) in [
        ("ripple slope of sup cross residual", slope(|r| r.sup_cross_residual)),
        ("ripple slope of max |d(s.s)/dp|", slope(|r| r.max_dss_dp)),
        ("ripple slope of max |d(s.s)/dq|", slope(|r| r.max_dss_dq)),
    ] {
        checks.push(Check::below(label, (s - 1.0).abs(), 0.1));
    }
    Ok(CriterionOutcome::new(7, checks))
}

pub fn criterion_8() -> Result<CriterionOutcome> {
    let disc = Domain::ball(&[0.0; 2], 1.0)?;
    let conj = |x: f64, y: f64| Complex64::new(x, -y);
    let contour = morera_contour(&conj, &disc, &RigidMotion::identity(2), 256)?;
    let region = Domain::polygon(&[[0.0, 0.0], [0.05, 0.0], [0.05, 0.05], [0.0, 0.05]])?;
    let steps = [1e-2, 1e-3, 1e-4];
    let residuals: Vec<f64> = steps
        .iter()
        .map(|&h| Ok(wirtinger_residual(&PlanarGrid::covering(|x, y| Complex64::new(x, y).exp(), [0.0, 0.0], [0.05, 0.05], h)?, &region)))
        .collect::<Result<_>>()?;
    let slope = loglog_slope(&steps, &residuals);
    Ok(CriterionOutcome::new(
        8,
        vec![
            Check::below("|oint conj(z) dz - 2 pi i|", (contour - Complex64::new(0.0, 2.0 * PI)).norm(), 1e-8),
            Check::below("|Wirtinger slope - 2| for exp(z)", (slope - 2.0).abs(), 0.1),
        ],
    ))
}

pub fn criterion_9() -> Result<CriterionOutcome> {
    let [s1, s2] = J1_ZEROS;
    let res = two_radii_test(s1, s2, 200, 1e-9)?;
    let near = two_radii_test(1.001, 1.0, 200, 1e-9)?;
    let gap = match res.verdict {
        TwoRadiiVerdict::Resonant { gap, .. } => gap,
        _ => f64::INFINITY,
    };
    Ok(CriterionOutcome::new(
        9,
        vec![
            Check::below("gap of s_1 / s_2", gap, 1e-9),
            Check::holds("ratio 1.001 admissible", near.verdict == TwoRadiiVerdict::Admissible),
        ],
    ))
}

pub fn criterion_10() -> Result<CriterionOutcome> {
    let k = tan_fixed_points(1)[0];
    let budget = QuadratureBudget::default();
    let ball = Domain::ball(&[0.0; 3], 1.0)?;
    let mut worst = 0.0_f64;
    for lambda in [0.0, 0.5, 1.0, 2.0] {
        for theta in [0.0, PI / 3.0] {
            let est = conjecture6_integral(&ball, &ComplexDirection::new(lambda, theta, k), &budget)?;
            worst = worst.max(est.relative_value);
        }
    }
    let ell = conjecture6_integral(&Domain::ellipsoid(&[1.0, 1.0, 1.4])?, &ComplexDirection::new(1.0, 0.0, k), &budget)?;
    Ok(CriterionOutcome::new(
        10,
        vec![
            Check::below("ball: max relative |integral|", worst, 1e-6),
            Check::above("ellipsoid: |integral| / error", ell.value.norm() / ell.error.max(f64::MIN_POSITIVE), 1e3),
        ],
    ))
}

pub fn criterion_11() -> Result<CriterionOutcome> {
    let ball = Domain::ball(&[0.0; 3], 1.0)?;
    let shell = factorization_check(&ball, tan_fixed_points(1)[0], 16)?;
    let off = factorization_check(&ball, 5.0, 16)?;
    let worst = off.rays.iter().map(|r| (r.slope + 1.0).abs()).fold(0.0, f64::max);
    Ok(CriterionOutcome::new(
        11,
        vec![
            Check::holds("shell verdict is finite", shell.verdict == FactorVerdict::Finite),
            Check::below("ray-to-ray spread of the limit", shell.spread, 1e-2),
            Check::below("k = 5: max |slope + 1| over rays", worst, 0.1),
        ],
    ))
}

/// Replays the seeded, parallel computations twice and compares the JSON
/// bytes. The end-to-end comparison of two `--check` runs is done by the
/// command-line tests.
pub fn criterion_12(seed: u64) -> Result<CriterionOutcome> {
    let replay = || -> Result<String> {
        let ball = Domain::ball(&[0.0; 3], 1.0)?;
        let disk = Domain::ball(&[0.0; 2], 1.0)?;
        let mut c = vec![0.0; 5];
        c[0] = 1.0;
        c[3] = 0.5;
        let field = CounterexampleField::harmonics(J1_ZEROS[0], 2, c)?;
        let a = verify_pompeiu(&field, &disk, 8, 3.0, seed, &QuadratureBudget::monte_carlo(200_000, seed))?;
        let b = verify_pompeiu(&CounterexampleField::radial(4.0, 3)?, &ball, 8, 5.0, seed, &QuadratureBudget::default())?;
        let c = ellipsoid_agreement(seed, 200_000)?;
        serde_json::to_string(&(a, b, c)).map_err(|e| crate::LabError::Internal(e.to_string()))
    };
    let (first, second) = (replay()?, replay()?);
    Ok(CriterionOutcome::new(
        12,
        vec![Check::holds("two seeded replays are byte-identical", first == second)],
    ))
}

/// Run criterion `id`; computation errors become a failed outcome.
pub fn run_criterion(id: usize, seed: u64) -> CriterionOutcome {
    let out = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(seed),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(seed),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(seed),
        _ => Err(crate::LabError::Domain(format!("no criterion {id}"))),
    };
    out.unwrap_or_else(|e| CriterionOutcome::failed(id, e.to_string()))
}

pub fn run_suite(seed: u64) -> SuiteReport {
    let criteria: Vec<CriterionOutcome> = (1..=CRITERION_COUNT).map(|id| run_criterion(id, seed)).collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    SuiteReport {
        seed,
        all_passed: passed == criteria.len(),
        passed,
        criteria,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_zeros() {
        let z = tan_fixed_points(2);
        assert!((z[0] - 4.493_409_457_909_064).abs() < 1e-13);
        assert!((z[1] - 7.725_251_836_937_707).abs() < 1e-13);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1e-2, 1e-3, 1e-4];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        assert!((loglog_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn failed_outcome_line() {
        let o = CriterionOutcome::failed(3, "boom".into());
        assert_eq!(o.summary_line(), "criterion  3 FAIL  counterexample field over 100 motions");
    }
}
