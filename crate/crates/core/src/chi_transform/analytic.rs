use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::numeric::{chi_ft_numeric, QuadratureBudget, QuadratureMethod};
use crate::error::{LabError, Result};
use crate::geometry::{dot, norm, unit_ball_volume, Domain, Shape};
use crate::quadrature::GaussLegendre;
use crate::specfun::{bessel_j_scaled, BesselOrder};

/// `(2 pi a)^{n/2} J_{n/2}(a |xi|) / |xi|^{n/2}`, the transform of the ball
/// of radius `a` centred at the origin; the volume at `xi = 0`.
pub fn chi_ft_ball(radius: f64, n: usize, xi_norm: f64) -> Result<Complex64> {
    if !(radius > 0.0) {
        return Err(LabError::Domain(format!("ball radius must be > 0, got {radius}")));
    }
    if !(1..=5).contains(&n) {
        return Err(LabError::Domain(format!("ball transform supports n = 1..=5, got {n}")));
    }
    if !(xi_norm >= 0.0) {
        return Err(LabError::Domain(format!("|xi| must be >= 0, got {xi_norm}")));
    }
    if xi_norm == 0.0 {
        return Ok(Complex64::new(unit_ball_volume(n) * radius.powi(n as i32), 0.0));
    }
    let order = BesselOrder::for_dimension(n)?;
    let x = radius * xi_norm;
    // (2 pi a)^{n/2} a^{n/2} J(x) / x^{n/2}
    let v = (2.0 * PI).powf(n as f64 / 2.0) * radius.powi(n as i32) * bessel_j_scaled(order, x);
    Ok(Complex64::new(v, 0.0))
}

/// Axis-aligned ellipsoid centred at the origin: substituting
/// `x_j = a_j x'_j` gives `prod(a_j) * chi_ball(1, n, |eta|)` with
/// `eta_j = a_j xi_j`.
pub fn chi_ft_ellipsoid(semi_axes: &[f64], xi: &[f64]) -> Result<Complex64> {
    if semi_axes.len() != xi.len() {
        return Err(LabError::DimensionMismatch {
            expected: semi_axes.len(),
            got: xi.len(),
            context: "ellipsoid transform frequency".into(),
        });
    }
    if semi_axes.iter().any(|a| !(*a > 0.0)) {
        return Err(LabError::Domain("semi-axes must be > 0".into()));
    }
    let eta: f64 = semi_axes.iter().zip(xi).map(|(a, x)| (a * x) * (a * x)).sum::<f64>().sqrt();
    let jac: f64 = semi_axes.iter().product();
    Ok(chi_ft_ball(1.0, semi_axes.len(), eta)? * jac)
}

/// The ellipsoid formula exactly as it is usually displayed,
/// `(2 pi)^{n/2} |eta|^{-n/2} J_{n/2}(|eta|)`, i.e. without the Jacobian
/// `prod(a_j)`. Kept only to quantify the discrepancy.
pub fn displayed_ellipsoid_formula(semi_axes: &[f64], xi: &[f64]) -> Result<f64> {
    let eta: f64 = semi_axes.iter().zip(xi).map(|(a, x)| (a * x) * (a * x)).sum::<f64>().sqrt();
    Ok(chi_ft_ball(1.0, semi_axes.len(), eta)?.re)
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Exact transform of a simple polygon by the divergence theorem,
/// `sum_e (xi . n_e) / (i |xi|^2) int_e exp(i xi . x) ds`.
pub fn chi_ft_polygon(vertices: &[[f64; 2]], xi: &[f64]) -> Complex64 {
    let k2 = xi[0] * xi[0] + xi[1] * xi[1];
    let (mut cx, mut cy) = (0.0, 0.0);
    for v in vertices {
        cx += v[0] / vertices.len() as f64;
        cy += v[1] / vertices.len() as f64;
    }
    let reach = vertices
        .iter()
        .map(|v| ((v[0] - cx).powi(2) + (v[1] - cy).powi(2)).sqrt())
        .fold(0.0, f64::max);
    if k2.sqrt() * reach < 1e-2 {
        return polygon_fan_quadrature(vertices, xi);
    }
    let n = vertices.len();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let m = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        // outward normal times edge length
        let flux = xi[0] * d[1] - xi[1] * d[0];
        let phase = Complex64::from_polar(1.0, xi[0] * m[0] + xi[1] * m[1]);
        sum += phase * (flux * sinc((xi[0] * d[0] + xi[1] * d[1]) / 2.0));
    }
    sum / Complex64::new(0.0, k2)
}

/// Signed fan of triangles from vertex 0, each integrated with a collapsed
/// Gauss-Legendre rule. Used near `xi = 0` where the edge sum cancels.
fn polygon_fan_quadrature(vertices: &[[f64; 2]], xi: &[f64]) -> Complex64 {
    let gl = GaussLegendre::new(10);
    let o = vertices[0];
    let mut sum = Complex64::new(0.0, 0.0);
    for w in vertices[1..].windows(2) {
        let (p, q) = (w[0], w[1]);
        let e1 = [p[0] - o[0], p[1] - o[1]];
        let e2 = [q[0] - o[0], q[1] - o[1]];
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        for (u, wu) in gl.mapped(0.0, 1.0) {
            for (v, wv) in gl.mapped(0.0, 1.0) {
                // Duffy: (s, t) = (u, u v), Jacobian u
                let (s, t) = (u * (1.0 - v), u * v);
                let x = o[0] + s * e1[0] + t * e2[0];
                let y = o[1] + s * e1[1] + t * e2[1];
                sum += Complex64::from_polar(wu * wv * u * det, xi[0] * x + xi[1] * y);
            }
        }
    }
    sum
}

/// Closed-form transform for balls, ellipsoids and polygons (any position
/// and orientation); `None` for star-shaped domains.
pub fn chi_ft_analytic(dom: &Domain, xi: &[f64]) -> Result<Option<Complex64>> {
    if xi.len() != dom.dim() {
        return Err(LabError::DimensionMismatch {
            expected: dom.dim(),
            got: xi.len(),
            context: "frequency vs domain".into(),
        });
    }
    let shift = |center: &[f64]| Complex64::from_polar(1.0, dot(xi, center));
    Ok(match dom.shape() {
        Shape::Ball { center, radius } => Some(chi_ft_ball(*radius, center.len(), norm(xi))? * shift(center)),
        Shape::Ellipsoid {
            center,
            semi_axes,
            orientation,
        } => {
            // chi_{OE}(xi) = chi_E(O^T xi)
            let body: Vec<f64> = match orientation {
                None => xi.to_vec(),
                Some(o) => (0..xi.len())
                    .map(|i| (0..xi.len()).map(|j| o[(j, i)] * xi[j]).sum())
                    .collect(),
            };
            Some(chi_ft_ellipsoid(semi_axes, &body)? * shift(center))
        }
        Shape::Polygon2D { vertices } => Some(chi_ft_polygon(vertices, xi)),
        Shape::StarShaped { .. } => None,
    })
}

/// Comparison of the change-of-variables ellipsoid transform against Monte
/// Carlo and against the formula displayed without the Jacobian factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipsoidFormulaCheck {
    pub semi_axes: Vec<f64>,
    pub xi: Vec<f64>,
    pub analytic: f64,
    pub displayed: f64,
    pub monte_carlo: Complex64,
    pub standard_error: f64,
    /// `|analytic - MC| / standard_error`.
    pub z_score: f64,
    /// `analytic / displayed`; equals `prod(a_j)` whenever `displayed != 0`.
    pub discrepancy_factor: f64,
    /// Whether the displayed formula agrees with Monte Carlo at 3 standard errors.
    pub displayed_consistent: bool,
}

pub fn ellipsoid_formula_check(
    semi_axes: &[f64],
    xi: &[f64],
    samples: u64,
    seed: u64,
) -> Result<EllipsoidFormulaCheck> {
    let analytic = chi_ft_ellipsoid(semi_axes, xi)?.re;
    let displayed = displayed_ellipsoid_formula(semi_axes, xi)?;
    let dom = Domain::ellipsoid(semi_axes)?;
    let mc = chi_ft_numeric(
        &dom,
        xi,
        &QuadratureBudget {
            method: QuadratureMethod::MonteCarlo { samples, seed },
            tolerance: None,
        },
    )?;
    let se = mc.error.max(f64::MIN_POSITIVE);
    Ok(EllipsoidFormulaCheck {
        semi_axes: semi_axes.to_vec(),
        xi: xi.to_vec(),
        analytic,
        displayed,
        monte_carlo: mc.value,
        standard_error: mc.error,
        z_score: (mc.value - Complex64::new(analytic, 0.0)).norm() / se,
        discrepancy_factor: if displayed != 0.0 { analytic / displayed } else { f64::NAN },
        displayed_consistent: (mc.value - Complex64::new(displayed, 0.0)).norm() <= 3.0 * se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_limits_match_volume() {
        let v = chi_ft_ball(1.0, 3, 1e-8).unwrap();
        assert!((v.re - 4.0 * PI / 3.0).abs() < 1e-10);
        assert_eq!(v.im, 0.0);
        assert!((chi_ft_ball(1.0, 2, 1e-8).unwrap().re - PI).abs() < 1e-10);
        assert!((chi_ft_ball(2.0, 3, 0.0).unwrap().re - 32.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ball_zero_shells() {
        assert!(chi_ft_ball(1.0, 3, 4.493409457909).unwrap().norm() < 1e-10);
        assert!(chi_ft_ball(2.0, 2, 3.831705970 / 2.0).unwrap().norm() < 1e-8);
        // one dimension: 2 sin(a xi) / xi
        let v = chi_ft_ball(1.5, 1, 0.7).unwrap().re;
        assert!((v - 2.0 * (1.05f64).sin() / 0.7).abs() < 1e-14);
    }

    #[test]
    fn ellipsoid_special_cases() {
        let xi = [0.3, -1.7, 2.2];
        let e = chi_ft_ellipsoid(&[1.0, 1.0, 1.0], &xi).unwrap();
        let b = chi_ft_ball(1.0, 3, norm(&xi)).unwrap();
        assert_eq!(e, b);
        let v = chi_ft_ellipsoid(&[1.0, 2.0, 3.0], &[0.0; 3]).unwrap();
        assert!((v.re - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn polygon_square_closed_form() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(chi_ft_polygon(&sq, &[2.0 * PI, 0.0]).norm() < 1e-12);
        // product of 1D transforms: (e^{i a} - 1)/(i a) (e^{i b} - 1)/(i b)
        let (a, b) = (1.3, -0.4);
        let one_d = |t: f64| {
            if t.abs() > 1e-2 {
                return (Complex64::from_polar(1.0, t) - 1.0) / Complex64::new(0.0, t);
            }
            // sum_j (i t)^j / (j + 1)!, free of the cancellation above
            let (mut term, mut sum) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
            for j in 1..12 {
                term *= Complex64::new(0.0, t) / f64::from(j + 1);
                sum += term;
            }
            sum
        };
        let want = one_d(a) * one_d(b);
        assert!((chi_ft_polygon(&sq, &[a, b]) - want).norm() < 1e-14);
        // tiny frequency goes through the fan rule
        let small = [1e-5, 2e-5];
        assert!((chi_ft_polygon(&sq, &small) - one_d(small[0]) * one_d(small[1])).norm() < 1e-14);
        assert!((chi_ft_polygon(&sq, &[0.0, 0.0]).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn displayed_formula_misses_the_jacobian() {
        let a = [1.0, 1.5];
        let xi = [2.0, 0.5];
        let ratio = chi_ft_ellipsoid(&a, &xi).unwrap().re / displayed_ellipsoid_formula(&a, &xi).unwrap();
        assert!((ratio - 1.5).abs() < 1e-12);
    }
}
