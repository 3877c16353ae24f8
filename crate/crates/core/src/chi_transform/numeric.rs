use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Estimate, Method};
use crate::error::{LabError, Result};
use crate::geometry::{Domain, Shape};
use crate::quadrature::{circle_rule, GaussLegendre, SphereRule};

/// Quadrature method.
///
/// - `MonteCarlo`: rejection sampling from the bounding box; error is one
///   standard error.
/// - `Grid`: tensor Gauss-Legendre grid adapted to the shape (polar about the
///   centre for balls, ellipsoids and star-shaped domains; collapsed
///   triangles for polygons). `resolution` nodes per coordinate; the error is
///   the difference to the half-resolution grid.
/// - `BoxGrid`: midpoint rule on the indicator-clipped bounding box, error
///   again by halving. First order in the mesh width; kept as an
///   independent cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum QuadratureMethod {
    MonteCarlo { samples: u64, seed: u64 },
    Grid { resolution: usize },
    BoxGrid { resolution: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureBudget {
    pub method: QuadratureMethod,
    /// Requested absolute error; results above it are flagged `partial`.
    pub tolerance: Option<f64>,
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::Grid { resolution: 48 },
            tolerance: None,
        }
    }
}

impl QuadratureBudget {
    pub fn grid(resolution: usize) -> Self {
        Self {
            method: QuadratureMethod::Grid { resolution },
            tolerance: None,
        }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Self {
            method: QuadratureMethod::MonteCarlo { samples, seed },
            tolerance: None,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    fn finish(&self, value: Complex64, error: f64, method: Method) -> Estimate {
        Estimate {
            value,
            error,
            method,
            partial: self.tolerance.is_some_and(|t| !(error <= t)),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.method {
            QuadratureMethod::MonteCarlo { samples, .. } if samples < 2 => {
                Err(LabError::Domain("Monte Carlo needs at least 2 samples".into()))
            }
            QuadratureMethod::Grid { resolution } | QuadratureMethod::BoxGrid { resolution } if resolution < 4 => {
                Err(LabError::Domain("grid resolution must be >= 4".into()))
            }
            _ => Ok(()),
        }
    }
}

const MC_CHUNK: u64 = 1 << 16;

fn monte_carlo<F>(dom: &Domain, f: &F, samples: u64, seed: u64) -> (Complex64, f64)
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let (lo, hi) = dom.bounding_box();
    let n = dom.dim();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials: Vec<(Complex64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = [0.0; 3];
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sum_sq = 0.0;
            for _ in 0..count {
                for k in 0..n {
                    x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                }
                if dom.contains(&x[..n]) {
                    let v = f(&x[..n]);
                    sum += v;
                    sum_sq += v.norm_sqr();
                }
            }
            (sum, sum_sq)
        })
        .collect();
    // fixed-order reduction keeps the result independent of scheduling
    let (sum, sum_sq) = partials
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = samples as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean.norm_sqr()).max(0.0);
    (mean * box_volume, box_volume * (var / nf).sqrt())
}

/// Polar tensor rule about the centre: `resolution` radial Gauss nodes and a
/// `resolution x 2 resolution` sphere rule (or `4 resolution` circle nodes).
fn polar_grid<F>(dom: &Domain, f: &F, resolution: usize) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let center = dom.center();
    let n = dom.dim();
    let radial = GaussLegendre::new(resolution);
    let dirs: Vec<(Vec<f64>, f64)> = if n == 3 {
        let rule = SphereRule::new(resolution, 2 * resolution);
        rule.points.iter().map(|p| p.to_vec()).zip(rule.weights.iter().copied()).collect()
    } else {
        circle_rule(4 * resolution).map(|(d, w)| (d.to_vec(), w)).collect()
    };
    let partials: Vec<Complex64> = dirs
        .par_iter()
        .map(|(d, w)| {
            let r = dom.boundary_radius(d).expect("polar grid needs a star-shaped domain");
            let mut x = [0.0; 3];
            let mut acc = Complex64::new(0.0, 0.0);
            for (rho, wr) in radial.mapped(0.0, r) {
                for k in 0..n {
                    x[k] = center[k] + rho * d[k];
                }
                acc += f(&x[..n]) * (wr * rho.powi(n as i32 - 1));
            }
            acc * *w
        })
        .collect();
    partials.iter().sum()
}

fn polygon_grid<F>(vertices: &[[f64; 2]], f: &F, resolution: usize) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let gl = GaussLegendre::new(resolution);
    let o = vertices[0];
    let mut sum = Complex64::new(0.0, 0.0);
    for w in vertices[1..].windows(2) {
        let e1 = [w[0][0] - o[0], w[0][1] - o[1]];
        let e2 = [w[1][0] - o[0], w[1][1] - o[1]];
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        for (u, wu) in gl.mapped(0.0, 1.0) {
            for (v, wv) in gl.mapped(0.0, 1.0) {
                let (s, t) = (u * (1.0 - v), u * v);
                let x = [o[0] + s * e1[0] + t * e2[0], o[1] + s * e1[1] + t * e2[1]];
                sum += f(&x) * (wu * wv * u * det);
            }
        }
    }
    sum
}

fn box_grid<F>(dom: &Domain, f: &F, resolution: usize) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let (lo, hi) = dom.bounding_box();
    let n = dom.dim();
    let h: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / resolution as f64).collect();
    let cell: f64 = h.iter().product();
    let planes: Vec<Complex64> = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut x = [0.0; 3];
            x[0] = lo[0] + (i as f64 + 0.5) * h[0];
            let inner = if n == 3 { resolution } else { 1 };
            for j in 0..resolution {
                x[1] = lo[1] + (j as f64 + 0.5) * h[1];
                for k in 0..inner {
                    if n == 3 {
                        x[2] = lo[2] + (k as f64 + 0.5) * h[2];
                    }
                    if dom.contains(&x[..n]) {
                        acc += f(&x[..n]);
                    }
                }
            }
            acc
        })
        .collect();
    planes.iter().sum::<Complex64>() * cell
}

fn grid_at<F>(dom: &Domain, f: &F, resolution: usize) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    match dom.shape() {
        Shape::Polygon2D { vertices } => polygon_grid(vertices, f, resolution),
        _ => polar_grid(dom, f, resolution),
    }
}

/// `int_D f(x) dx` with an error estimate.
pub fn integrate_over_domain<F>(dom: &Domain, f: F, budget: &QuadratureBudget) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    budget.validate()?;
    Ok(match budget.method {
        QuadratureMethod::MonteCarlo { samples, seed } => {
            let (v, se) = monte_carlo(dom, &f, samples, seed);
            budget.finish(v, se, Method::MonteCarlo)
        }
        QuadratureMethod::Grid { resolution } => {
            let fine = grid_at(dom, &f, resolution);
            let coarse = grid_at(dom, &f, resolution / 2);
            budget.finish(fine, (fine - coarse).norm(), Method::Grid)
        }
        QuadratureMethod::BoxGrid { resolution } => {
            let fine = box_grid(dom, &f, resolution);
            let coarse = box_grid(dom, &f, resolution / 2);
            budget.finish(fine, (fine - coarse).norm(), Method::Grid)
        }
    })
}

/// `int_0^R exp(i c rho) rho^p d rho` for `p` in `{1, 2}` and complex `c`.
pub(crate) fn radial_moment(c: Complex64, r: f64, p: i32) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let z = c * r;
    if z.norm() < 2.0 {
        // sum_j (i c R)^j R^{p+1} / (j! (j + p + 1))
        let mut term = Complex64::new(r.powi(p + 1), 0.0);
        let mut sum = term / f64::from(p + 1);
        for j in 1..60 {
            term *= i * z / f64::from(j);
            let add = term / f64::from(j + p + 1);
            sum += add;
            if add.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        return sum;
    }
    let e = (i * z).exp();
    match p {
        1 => e * (r / (i * c) + 1.0 / (c * c)) - 1.0 / (c * c),
        2 => {
            let c3 = c * c * c;
            e * (r * r / (i * c) + 2.0 * r / (c * c) + 2.0 * i / c3) - 2.0 * i / c3
        }
        _ => unreachable!("radial moment power must be 1 or 2"),
    }
}

fn exp_polar(dom: &Domain, wave: &[Complex64], resolution: usize) -> Complex64 {
    let center = dom.center();
    let n = dom.dim();
    let dirs: Vec<(Vec<f64>, f64)> = if n == 3 {
        let rule = SphereRule::new(resolution, 2 * resolution);
        rule.points.iter().map(|p| p.to_vec()).zip(rule.weights.iter().copied()).collect()
    } else {
        circle_rule(4 * resolution).map(|(d, w)| (d.to_vec(), w)).collect()
    };
    let phase: Complex64 = wave.iter().zip(&center).map(|(c, x)| c * x).sum();
    let i = Complex64::new(0.0, 1.0);
    let sum: Complex64 = dirs
        .par_iter()
        .map(|(d, w)| {
            let r = dom.boundary_radius(d).expect("polar grid needs a star-shaped domain");
            let c: Complex64 = wave.iter().zip(d).map(|(c, x)| c * x).sum();
            radial_moment(c, r, n as i32 - 1) * *w
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    (i * phase).exp() * sum
}

/// `int_D exp(i c . x) dx` for a possibly complex wave vector `c`.
///
/// On star-shaped domains (`Grid`) the radial integral is done in closed
/// form and only the directions are sampled.
pub fn exp_integral(dom: &Domain, wave: &[Complex64], budget: &QuadratureBudget) -> Result<Estimate> {
    if wave.len() != dom.dim() {
        return Err(LabError::DimensionMismatch {
            expected: dom.dim(),
            got: wave.len(),
            context: "wave vector vs domain".into(),
        });
    }
    let integrand = |x: &[f64]| {
        let s: Complex64 = wave.iter().zip(x).map(|(c, v)| c * v).sum();
        (Complex64::new(0.0, 1.0) * s).exp()
    };
    match (budget.method, dom.shape()) {
        (QuadratureMethod::Grid { resolution }, Shape::Polygon2D { .. }) => {
            integrate_over_domain(dom, integrand, &QuadratureBudget::grid(resolution)).map(|e| budget.finish(e.value, e.error, Method::Grid))
        }
        (QuadratureMethod::Grid { resolution }, _) => {
            budget.validate()?;
            let fine = exp_polar(dom, wave, resolution);
            let coarse = exp_polar(dom, wave, resolution / 2);
            Ok(budget.finish(fine, (fine - coarse).norm(), Method::PolarGrid))
        }
        _ => integrate_over_domain(dom, integrand, budget),
    }
}

/// Numerical `chi_D(xi)`.
pub fn chi_ft_numeric(dom: &Domain, xi: &[f64], budget: &QuadratureBudget) -> Result<Estimate> {
    let wave: Vec<Complex64> = xi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    exp_integral(dom, &wave, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chi_transform::chi_ft_ball;
    use crate::geometry::RadialFunction;
    use std::f64::consts::PI;

    #[test]
    fn radial_moment_matches_quadrature() {
        let gl = GaussLegendre::new(40);
        for &(c, r) in &[
            (Complex64::new(0.3, 0.0), 1.0),
            (Complex64::new(5.0, 0.0), 1.3),
            (Complex64::new(1.0, -2.0), 1.0),
            (Complex64::new(0.0, 3.0), 0.8),
        ] {
            for p in [1, 2] {
                let re = gl.integrate(0.0, r, |x| ((Complex64::new(0.0, 1.0) * c * x).exp() * x.powi(p)).re);
                let im = gl.integrate(0.0, r, |x| ((Complex64::new(0.0, 1.0) * c * x).exp() * x.powi(p)).im);
                let got = radial_moment(c, r, p);
                assert!((got - Complex64::new(re, im)).norm() < 1e-13, "{c} {r} {p}: {got}");
            }
        }
    }

    #[test]
    fn zero_frequency_gives_volume() {
        let doms = [
            Domain::ball(&[0.3, 0.0, -0.2], 1.2).unwrap(),
            Domain::ellipsoid(&[1.0, 1.5]).unwrap(),
            Domain::polygon(&[[0.0, 0.0], [2.0, 0.0], [1.0, 1.0], [0.0, 1.5]]).unwrap(),
            Domain::star(&[0.0; 3], RadialFunction::constant(3, 0.7)).unwrap(),
        ];
        for d in &doms {
            let zero = vec![0.0; d.dim()];
            let g = chi_ft_numeric(d, &zero, &QuadratureBudget::grid(32)).unwrap();
            assert!((g.value.re - d.volume()).abs() < 1e-10, "{d:?}");
            let mc = chi_ft_numeric(d, &zero, &QuadratureBudget::monte_carlo(200_000, 1)).unwrap();
            assert!((mc.value.re - d.volume()).abs() < 4.0 * mc.error + 1e-12);
        }
    }

    #[test]
    fn grid_matches_ball_closed_form() {
        let d = Domain::ball(&[0.0; 3], 1.0).unwrap();
        let xi = [0.5, -2.0, 1.0];
        let g = chi_ft_numeric(&d, &xi, &QuadratureBudget::grid(32)).unwrap();
        let want = chi_ft_ball(1.0, 3, (0.25f64 + 4.0 + 1.0).sqrt()).unwrap();
        assert!((g.value - want).norm() < 1e-12);
        assert!(g.error < 1e-10);
    }

    #[test]
    fn box_grid_is_first_order_but_consistent() {
        let d = Domain::ball(&[0.0, 0.0], 1.0).unwrap();
        let e = integrate_over_domain(
            &d,
            |_x| Complex64::new(1.0, 0.0),
            &QuadratureBudget {
                method: QuadratureMethod::BoxGrid { resolution: 400 },
                tolerance: None,
            },
        )
        .unwrap();
        assert!((e.value.re - PI).abs() < 1e-3);
    }

    #[test]
    fn partial_flag_when_budget_too_small() {
        let d = Domain::ball(&[0.0; 3], 1.0).unwrap();
        let e = chi_ft_numeric(&d, &[1.0, 0.0, 0.0], &QuadratureBudget::monte_carlo(1000, 3).with_tolerance(1e-6)).unwrap();
        assert!(e.partial);
    }
}
