//! Sphericity test for a parametrised closed surface or curve.
//!
//! A surface with `(s - c) x N = 0` everywhere has normals through `c`, so
//! `s . s` is stationary along the chart and `|s - c|` is constant. The
//! unknown centre is found by minimising the cross residual.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::SurfaceParametrization;
use crate::optimize::nelder_mead;

/// Nelder-Mead iteration budget for the centre search.
pub const CENTER_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereVerdict {
    Sphere,
    NonSphere,
    /// The centre search did not converge.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub sup_cross_residual: f64,
    /// `max |s - c| - min |s - c|` over the nodes.
    pub radius_variation: f64,
    pub mean_radius: f64,
    pub best_center: Vec<f64>,
    /// Scale used for tolerances: twice the largest node distance from the
    /// node centroid.
    pub diameter: f64,
    /// `max |d(s.s)/dp|` and `max |d(s.s)/dq|` with `s` measured from the
    /// best centre.
    pub max_dss_dp: f64,
    pub max_dss_dq: f64,
    pub tol: f64,
    pub verdict: SphereVerdict,
    pub iterations: usize,
    pub converged: bool,
    pub nodes: usize,
}

struct Samples {
    dim: usize,
    points: Vec<Vec<f64>>,
    normals: Vec<Vec<f64>>,
}

impl Samples {
    fn take(surf: &SurfaceParametrization) -> Result<Self> {
        let (points, normals) = surf.sample()?.into_iter().unzip();
        Ok(Self {
            dim: surf.dim(),
            points,
            normals,
        })
    }

    fn cross_sup(&self, center: &[f64]) -> f64 {
        self.points
            .par_iter()
            .zip(&self.normals)
            .map(|(s, n)| cross_norm(self.dim, s, n, center))
            .reduce(|| 0.0, f64::max)
    }
}

fn cross_norm(dim: usize, s: &[f64], n: &[f64], c: &[f64]) -> f64 {
    if dim == 2 {
        ((s[0] - c[0]) * n[1] - (s[1] - c[1]) * n[0]).abs()
    } else {
        let d = [s[0] - c[0], s[1] - c[1], s[2] - c[2]];
        let x = [d[1] * n[2] - d[2] * n[1], d[2] * n[0] - d[0] * n[2], d[0] * n[1] - d[1] * n[0]];
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }
}

/// `sup |(s - center) x N|` over the chart nodes; the scalar
/// `(s1 - c1) N2 - (s2 - c2) N1` for curves.
pub fn cross_residual(surf: &SurfaceParametrization, center: &[f64]) -> Result<f64> {
    if center.len() != surf.dim() {
        return Err(LabError::DimensionMismatch {
            expected: surf.dim(),
            got: center.len(),
            context: "cross residual centre".into(),
        });
    }
    Ok(Samples::take(surf)?.cross_sup(center))
}

/// Search for the centre minimising the cross residual and decide whether
/// the surface is a sphere at relative tolerance `tol`.
pub fn sphere_decision(surf: &SurfaceParametrization, tol: f64) -> Result<SymmetryReport> {
    if !(tol > 0.0) {
        return Err(LabError::Domain(format!("tol must be > 0, got {tol}")));
    }
    let samples = Samples::take(surf)?;
    let dim = samples.dim;
    let count = samples.points.len() as f64;
    let mut centroid = vec![0.0; dim];
    for p in &samples.points {
        for k in 0..dim {
            centroid[k] += p[k] / count;
        }
    }
    let diameter = 2.0 * samples.points.iter().map(|p| dist(p, &centroid)).fold(0.0, f64::max);
    if !(diameter > 0.0) {
        return Err(LabError::InvalidGeometry("chart collapses to a point".into()));
    }
    let fit = nelder_mead(
        |c| samples.cross_sup(c),
        &centroid,
        1e-2 * diameter,
        CENTER_ITERATIONS,
        1e-12 * diameter,
    );
    let center = fit.x;
    let sup_cross_residual = samples.cross_sup(&center);
    let radii: Vec<f64> = samples.points.iter().map(|p| dist(p, &center)).collect();
    let rmax = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rmin = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean_radius = radii.iter().sum::<f64>() / count;

    // d(s.s)/dp = 2 (s - c) . s_p
    let (max_dss_dp, max_dss_dq) = surf
        .nodes()
        .par_iter()
        .map(|&(p, q)| {
            let s = surf.point(p, q);
            let (sp, sq) = surf.partials(p, q);
            let (mut dp, mut dq) = (0.0, 0.0);
            for k in 0..dim {
                dp += 2.0 * (s[k] - center[k]) * sp[k];
                dq += 2.0 * (s[k] - center[k]) * sq[k];
            }
            (dp.abs(), dq.abs())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));

    let threshold = tol * diameter;
    let verdict = if !fit.converged {
        SphereVerdict::Inconclusive
    } else if sup_cross_residual < threshold && rmax - rmin < threshold {
        SphereVerdict::Sphere
    } else {
        SphereVerdict::NonSphere
    };
    Ok(SymmetryReport {
        sup_cross_residual,
        radius_variation: rmax - rmin,
        mean_radius,
        best_center: center,
        diameter,
        max_dss_dp,
        max_dss_dq,
        tol,
        verdict,
        iterations: fit.iterations,
        converged: fit.converged,
        nodes: samples.points.len(),
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RigidMotion;

    #[test]
    fn sphere_residuals() {
        let s = SurfaceParametrization::sphere([0.0; 3], 1.0);
        assert!(cross_residual(&s, &[0.0; 3]).unwrap() < 1e-8);
        let t = SurfaceParametrization::sphere([1.0, 0.0, 0.0], 1.0);
        assert!(cross_residual(&t, &[0.0; 3]).unwrap() > 0.1);
        assert!(cross_residual(&t, &[1.0, 0.0, 0.0]).unwrap() < 1e-8);
    }

    #[test]
    fn ellipsoid_is_not_a_sphere() {
        let e = SurfaceParametrization::ellipsoid([0.0; 3], [1.0, 2.0, 3.0], None);
        let r = sphere_decision(&e, 1e-3).unwrap();
        assert!(r.sup_cross_residual > 0.1);
        assert_eq!(r.verdict, SphereVerdict::NonSphere);
    }

    #[test]
    fn off_centre_sphere_is_found() {
        let c = [0.3, -0.1, 0.5];
        let s = SurfaceParametrization::sphere(c, 2.0);
        let r = sphere_decision(&s, 1e-6).unwrap();
        assert_eq!(r.verdict, SphereVerdict::Sphere, "{r:?}");
        for k in 0..3 {
            assert!((r.best_center[k] - c[k]).abs() < 1e-6);
        }
        assert!((r.mean_radius - 2.0).abs() < 1e-10);
    }

    #[test]
    fn planar_curves() {
        let circle = SurfaceParametrization::circle([0.4, -1.0], 0.5);
        let r = sphere_decision(&circle, 1e-6).unwrap();
        assert_eq!(r.verdict, SphereVerdict::Sphere);
        let ellipse = SurfaceParametrization::curve(|t: f64| [1.05 * t.cos(), t.sin()]);
        let r = sphere_decision(&ellipse, 1e-3).unwrap();
        assert_eq!(r.verdict, SphereVerdict::NonSphere);
    }

    #[test]
    fn motion_invariance() {
        let e = SurfaceParametrization::ellipsoid([0.0; 3], [1.0, 1.3, 0.8], None).with_nodes(33, 65);
        let c = [0.1, 0.05, -0.2];
        let base = cross_residual(&e, &c).unwrap();
        let sigma = RigidMotion::translation_by(&[2.0, -1.0, 0.5]).compose(&RigidMotion::axis_rotation([1.0, 2.0, 0.5], 0.7));
        let moved = e.transformed(&sigma).unwrap();
        let moved_center = sigma.apply(&c);
        let other = cross_residual(&moved, &moved_center).unwrap();
        assert!((base - other).abs() < 1e-12, "{base} vs {other}");
    }
}
