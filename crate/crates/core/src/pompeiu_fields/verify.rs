use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CounterexampleField;
use crate::chi_transform::{integrate_over_domain, Estimate, Method, QuadratureBudget};
use crate::error::{LabError, Result};
use crate::geometry::{random_motion, Domain, RigidMotion, Shape};
use crate::quadrature::GaussLegendre;

/// Verdict tolerance relative to `volume(D) * sup |f|`.
pub const VERIFY_REL_TOL: f64 = 1e-6;

const SUP_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Quadrature error too large to decide.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionVerification {
    pub seeds: Vec<u64>,
    pub motions: Vec<RigidMotion>,
    pub integrals: Vec<Estimate>,
    pub max_abs: f64,
    pub max_error: f64,
    /// Sampled `sup |f|` over all moved domains.
    pub sup_field: f64,
    /// `volume(D) * sup |f|`.
    pub normalization: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Exact radial reduction was used for every motion.
    pub radial_reduction: bool,
}

/// Per-motion seed: a fixed odd-multiplier stream off the base seed.
fn motion_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `int_{B(y, a)} g(|x|) dx` for a radial profile `g`, reduced to one
/// dimension by integrating over spheres `|x| = rho` intersected with the
/// ball. `nodes` Gauss points per panel; panels are shorter than half a
/// period of `cos(omega rho)`.
pub fn ball_radial_integral<G: Fn(f64) -> f64>(g: G, dim: usize, center_dist: f64, radius: f64, omega: f64, nodes: usize) -> f64 {
    let (d, a) = (center_dist, radius);
    let gl = GaussLegendre::new(nodes);
    let panels = |len: f64| ((omega * len / PI).ceil() as usize).max(1) + 1;
    let full_surface = |rho: f64| if dim == 3 { 4.0 * PI * rho * rho } else { 2.0 * PI * rho };
    let mut total = 0.0;

    // spheres entirely inside the ball
    let inner = (a - d).max(0.0);
    if inner > 0.0 {
        let np = panels(inner);
        let h = inner / np as f64;
        for p in 0..np {
            total += gl.integrate(p as f64 * h, (p + 1) as f64 * h, |rho| full_surface(rho) * g(rho));
        }
    }
    if d <= 1e-14 * a {
        return total;
    }
    // partially covered spheres, rho in [|a - d|, a + d]
    let (lo, hi) = ((a - d).abs(), a + d);
    let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    let np = panels(hi - lo);
    let h = PI / np as f64;
    for p in 0..np {
        if dim == 3 {
            // cap area pi rho (a^2 - (rho - d)^2) / d is polynomial in rho
            let (r0, r1) = (lo + (hi - lo) * p as f64 / np as f64, lo + (hi - lo) * (p + 1) as f64 / np as f64);
            total += gl.integrate(r0, r1, |rho| PI * rho * (a * a - (rho - d) * (rho - d)) / d * g(rho));
        } else {
            // arc length has square-root ends; rho = mid - half cos t smooths them
            total += gl.integrate(p as f64 * h, (p + 1) as f64 * h, |t| {
                let rho = mid - half * t.cos();
                let c = ((rho * rho + d * d - a * a) / (2.0 * rho * d)).clamp(-1.0, 1.0);
                2.0 * rho * c.acos() * g(rho) * half * t.sin()
            });
        }
    }
    total
}

fn sample_sup(field: &CounterexampleField, dom: &Domain, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let (lo, hi) = dom.bounding_box();
    let n = dom.dim();
    let mut sup = field.eval(&dom.center()).norm();
    let mut accepted = 0;
    let mut x = vec![0.0; n];
    // bounded attempts; thin domains simply get fewer samples
    for _ in 0..SUP_SAMPLES * 64 {
        for k in 0..n {
            x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
        }
        if dom.contains(&x) {
            sup = sup.max(field.eval(&x).norm());
            accepted += 1;
            if accepted == SUP_SAMPLES {
                break;
            }
        }
    }
    sup
}

/// Integrate `field` over `sigma_i(D)` for `motion_count` seeded motions
/// with translations up to `translation_bound`.
pub fn verify_pompeiu(
    field: &CounterexampleField,
    dom: &Domain,
    motion_count: usize,
    translation_bound: f64,
    seed: u64,
    budget: &QuadratureBudget,
) -> Result<MotionVerification> {
    field.validate()?;
    if field.dim != dom.dim() {
        return Err(LabError::DimensionMismatch {
            expected: dom.dim(),
            got: field.dim,
            context: "field vs domain dimension".into(),
        });
    }
    let seeds: Vec<u64> = (0..motion_count).map(|i| motion_seed(seed, i)).collect();
    let motions: Vec<RigidMotion> = seeds
        .iter()
        .map(|&s| random_motion(s, translation_bound, dom.dim()))
        .collect::<Result<_>>()?;
    let radial_reduction = field.is_radial() && matches!(dom.shape(), Shape::Ball { .. });

    let rows: Vec<(Estimate, f64)> = motions
        .par_iter()
        .zip(&seeds)
        .map(|(sigma, &s)| -> Result<(Estimate, f64)> {
            let moved = dom.apply_motion(sigma)?;
            let sup = sample_sup(field, &moved, s);
            let est = match moved.shape() {
                Shape::Ball { center, radius } if radial_reduction => {
                    let d = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let g = |rho: f64| field.radial_profile(rho);
                    let fine = ball_radial_integral(g, dom.dim(), d, *radius, field.b, 32);
                    let coarse = ball_radial_integral(g, dom.dim(), d, *radius, field.b, 16);
                    Estimate {
                        value: Complex64::new(fine, 0.0),
                        error: (fine - coarse).abs(),
                        method: Method::Grid,
                        partial: false,
                    }
                }
                _ => integrate_over_domain(&moved, |x: &[f64]| field.eval(x), budget)?,
            };
            Ok((est, sup))
        })
        .collect::<Result<_>>()?;

    let sup_field = if rows.is_empty() {
        sample_sup(field, dom, seed)
    } else {
        rows.iter().map(|r| r.1).fold(0.0, f64::max)
    };
    let integrals: Vec<Estimate> = rows.into_iter().map(|r| r.0).collect();
    let max_abs = integrals.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
    let max_error = integrals.iter().map(|e| e.error).fold(0.0, f64::max);
    let normalization = dom.volume() * sup_field;
    let tolerance = VERIFY_REL_TOL * normalization;
    let verdict = if integrals.iter().any(|e| e.value.norm() - e.error >= tolerance) {
        Verdict::Fail
    } else if max_abs < tolerance && max_error < tolerance {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(MotionVerification {
        seeds,
        motions,
        integrals,
        max_abs,
        max_error,
        sup_field,
        normalization,
        tolerance,
        verdict,
        radial_reduction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chi_transform::chi_ft_ball;
    use crate::specfun::{bessel_zero, BesselOrder};

    #[test]
    fn radial_reduction_matches_mean_value_identity() {
        // int_{B(y, a)} f = f(y) chi_B(b) for the radial field
        for dim in [2, 3] {
            let b = 2.7;
            let f = CounterexampleField::radial(b, dim).unwrap();
            let a = 0.8;
            let chi = chi_ft_ball(a, dim, b).unwrap().re;
            for d in [0.0, 0.3, 0.8, 1.9, 4.5] {
                let got = ball_radial_integral(|r| f.radial_profile(r), dim, d, a, b, 32);
                let want = f.radial_profile(d) * chi;
                assert!((got - want).abs() < 1e-12, "dim {dim}, d {d}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_shell_passes_and_off_shell_fails() {
        let s = bessel_zero(BesselOrder::THREE_HALVES, 1).unwrap();
        let ball = Domain::ball(&[0.0; 3], 1.0).unwrap();
        let on = CounterexampleField::radial(s, 3).unwrap();
        let v = verify_pompeiu(&on, &ball, 20, 5.0, 7, &QuadratureBudget::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Pass);
        assert!(v.radial_reduction);

        let off = CounterexampleField::radial(4.0, 3).unwrap();
        let v = verify_pompeiu(&off, &ball, 1, 0.0, 7, &QuadratureBudget::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Fail);
        let want = off.radial_profile(0.0) * chi_ft_ball(1.0, 3, 4.0).unwrap().re;
        assert!((v.integrals[0].value.re - want).abs() < 1e-12);
    }

    #[test]
    fn grid_path_agrees_with_reduction() {
        let s = bessel_zero(BesselOrder::ONE, 1).unwrap();
        let disk = Domain::ball(&[0.0; 2], 1.0).unwrap();
        let mut c = vec![0.0; 5];
        c[0] = 1.0;
        c[3] = 0.5;
        let f = CounterexampleField::harmonics(s, 2, c).unwrap();
        let v = verify_pompeiu(&f, &disk, 6, 3.0, 1, &QuadratureBudget::grid(48)).unwrap();
        assert!(!v.radial_reduction);
        assert_eq!(v.verdict, Verdict::Pass, "{v:?}");
    }

    #[test]
    fn empty_motion_list_is_vacuous() {
        let f = CounterexampleField::radial(4.0, 3).unwrap();
        let ball = Domain::ball(&[0.0; 3], 1.0).unwrap();
        let v = verify_pompeiu(&f, &ball, 0, 1.0, 0, &QuadratureBudget::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Pass);
        assert_eq!(v.max_abs, 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let f = CounterexampleField::radial(4.0, 2).unwrap();
        let ball = Domain::ball(&[0.0; 3], 1.0).unwrap();
        assert!(verify_pompeiu(&f, &ball, 1, 1.0, 0, &QuadratureBudget::default()).is_err());
    }
}
