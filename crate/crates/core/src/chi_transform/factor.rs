use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::numeric::{chi_ft_numeric, QuadratureBudget};
use super::scan::direction_mesh;
use super::chi_ft_analytic;
use crate::error::{LabError, Result};
use crate::geometry::{Domain, Shape};
use crate::specfun::{bessel_j, BesselOrder};

/// Offsets from the shell, largest first.
pub const FACTOR_EPSILONS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayProbe {
    pub direction: Vec<f64>,
    /// `g(xi)` at `|xi| = k* + eps` for each eps in [`FACTOR_EPSILONS`].
    pub outer: Vec<Complex64>,
    pub inner: Vec<Complex64>,
    /// Least-squares slope of `log |g(k* + eps)|` against `log eps`.
    pub slope: f64,
    /// Mean of the inner and outer values at the smallest offset.
    pub limit: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorVerdict {
    /// `g` stays bounded: the quotient extends across the shell.
    Finite,
    /// `g` grows like `1/eps`: `chi` does not vanish on the shell.
    Divergent,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub k_star: f64,
    pub epsilons: Vec<f64>,
    pub rays: Vec<RayProbe>,
    pub verdict: FactorVerdict,
    pub mean_slope: f64,
    /// `max |limit - mean| / |mean|` across rays.
    pub spread: f64,
    pub mean_limit: Complex64,
    /// `chi'(k*) / (2 k*)` for centred balls, where the limit is radial.
    pub radial_limit: Option<f64>,
}

fn chi_at(dom: &Domain, xi: &[f64], budget: &QuadratureBudget) -> Result<Complex64> {
    match chi_ft_analytic(dom, xi)? {
        Some(v) => Ok(v),
        None => Ok(chi_ft_numeric(dom, xi, budget)?.value),
    }
}

/// Derivative of the ball transform in `|xi|`:
/// `d/dk [ (2 pi a)^{n/2} J_{n/2}(a k) / k^{n/2} ] = -(2 pi a)^{n/2} a J_{n/2+1}(a k) / k^{n/2}`.
fn ball_radial_derivative(radius: f64, n: usize, k: f64) -> Result<f64> {
    let order = BesselOrder::for_dimension(n)?;
    let next = order.succ().ok_or(LabError::UnsupportedOrder { two_nu: order.two_nu() + 2 })?;
    let half = n as f64 / 2.0;
    Ok(-(2.0 * std::f64::consts::PI * radius).powf(half) * radius * bessel_j(next, radius * k)? / k.powf(half))
}

/// Probe `g(xi) = chi_D(xi) / (xi . xi - k*^2)` along `probe_count` rays
/// on both sides of the shell `|xi| = k*`.
pub fn factorization_check(dom: &Domain, k_star: f64, probe_count: usize) -> Result<FactorizationReport> {
    factorization_check_with(dom, k_star, probe_count, &QuadratureBudget::grid(64))
}

pub fn factorization_check_with(
    dom: &Domain,
    k_star: f64,
    probe_count: usize,
    budget: &QuadratureBudget,
) -> Result<FactorizationReport> {
    if !(k_star > FACTOR_EPSILONS[0]) {
        return Err(LabError::Domain(format!("k* must exceed {}, got {k_star}", FACTOR_EPSILONS[0])));
    }
    if probe_count == 0 {
        return Err(LabError::Domain("need at least one probe ray".into()));
    }
    let dirs = direction_mesh(dom.dim(), probe_count);
    let mut rays = Vec::with_capacity(dirs.len());
    for d in dirs {
        let g = |k: f64| -> Result<Complex64> {
            let xi: Vec<f64> = d.iter().map(|v| k * v).collect();
            Ok(chi_at(dom, &xi, budget)? / (k * k - k_star * k_star))
        };
        let outer = FACTOR_EPSILONS.iter().map(|e| g(k_star + e)).collect::<Result<Vec<_>>>()?;
        let inner = FACTOR_EPSILONS.iter().map(|e| g(k_star - e)).collect::<Result<Vec<_>>>()?;
        let xs: Vec<f64> = FACTOR_EPSILONS.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = outer.iter().map(|v| v.norm().max(f64::MIN_POSITIVE).ln()).collect();
        let last = FACTOR_EPSILONS.len() - 1;
        rays.push(RayProbe {
            direction: d,
            slope: fit_slope(&xs, &ys),
            limit: (outer[last] + inner[last]) / 2.0,
            outer,
            inner,
        });
    }
    let m = rays.len() as f64;
    let mean_slope = rays.iter().map(|r| r.slope).sum::<f64>() / m;
    let mean_limit = rays.iter().map(|r| r.limit).sum::<Complex64>() / m;
    let spread = rays.iter().map(|r| (r.limit - mean_limit).norm()).fold(0.0, f64::max) / mean_limit.norm();
    let max_abs_slope = rays.iter().map(|r| r.slope.abs()).fold(0.0, f64::max);
    let verdict = if max_abs_slope < 0.25 {
        FactorVerdict::Finite
    } else if rays.iter().all(|r| (r.slope + 1.0).abs() < 0.25) {
        FactorVerdict::Divergent
    } else {
        FactorVerdict::Indeterminate
    };
    let radial_limit = match dom.shape() {
        Shape::Ball { radius, .. } if dom.center().iter().all(|c| *c == 0.0) => {
            Some(ball_radial_derivative(*radius, dom.dim(), k_star)? / (2.0 * k_star))
        }
        _ => None,
    };
    Ok(FactorizationReport {
        k_star,
        epsilons: FACTOR_EPSILONS.to_vec(),
        rays,
        verdict,
        mean_slope,
        spread,
        mean_limit,
        radial_limit,
    })
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_shell_is_removable() {
        let d = Domain::ball(&[0.0; 3], 1.0).unwrap();
        let k = 4.4934094579;
        let r = factorization_check(&d, k, 16).unwrap();
        assert_eq!(r.verdict, FactorVerdict::Finite);
        assert!(r.spread < 1e-10);
        // chi'(k)/(2k) with chi = 4 pi (sin k - k cos k)/k^3 reduces to 2 pi sin k / k^3 at a zero
        let oracle = 2.0 * PI * k.sin() / k.powi(3);
        assert!((r.radial_limit.unwrap() - oracle).abs() < 1e-9);
        assert!((r.mean_limit.re - oracle).abs() < 1e-6 * oracle.abs());
    }

    #[test]
    fn off_shell_diverges() {
        let d = Domain::ball(&[0.0; 3], 1.0).unwrap();
        let r = factorization_check(&d, 5.0, 8).unwrap();
        assert_eq!(r.verdict, FactorVerdict::Divergent);
        assert!((r.mean_slope + 1.0).abs() < 0.1);
    }

    #[test]
    fn disk_shell_is_removable() {
        let d = Domain::ball(&[0.0; 2], 1.0).unwrap();
        let r = factorization_check(&d, 3.8317059702, 12).unwrap();
        assert_eq!(r.verdict, FactorVerdict::Finite);
    }

    #[test]
    fn slope_fit_is_exact_on_power_law() {
        let xs: Vec<f64> = FACTOR_EPSILONS.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = FACTOR_EPSILONS.iter().map(|e| (3.0 / e).ln()).collect();
        assert!((fit_slope(&xs, &ys) + 1.0).abs() < 1e-12);
    }
}
