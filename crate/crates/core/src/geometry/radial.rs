use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::quadrature::fibonacci_sphere;
use crate::specfun::{harmonic_series, harmonic_table_len};

/// Boundary radius as a function of direction for star-shaped domains.
///
/// In 3D, `Harmonics` holds real orthonormal spherical-harmonic coefficients
/// in the flat `(l, m)` layout of [`crate::specfun::harmonic_index`]. In 2D
/// it holds a Fourier series `[a0, a1, b1, a2, b2, ...]` with
/// `r(t) = a0 + sum a_k cos(kt) + b_k sin(kt)`.
///
/// `Table` samples `r` on `theta_i = pi i / (n_theta - 1)` and
/// `phi_j = 2 pi j / n_phi` (3D), or on `t_j = 2 pi j / n_phi` with
/// `n_theta = 1` (2D), interpolated (bi)linearly.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFunction {
    Harmonics { coefficients: Vec<f64> },
    Table { values: Vec<f64>, n_theta: usize, n_phi: usize },
}

impl RadialFunction {
    /// Constant radius `r` in dimension `dim`.
    pub fn constant(dim: usize, r: f64) -> Self {
        let c0 = if dim == 3 { r * 2.0 * PI.sqrt() } else { r };
        RadialFunction::Harmonics {
            coefficients: vec![c0],
        }
    }

    pub(crate) fn validate(&self, dim: usize) -> Result<()> {
        match self {
            RadialFunction::Harmonics { coefficients } => {
                if coefficients.is_empty() {
                    return Err(LabError::InvalidGeometry("empty radial coefficient table".into()));
                }
                if dim == 3 {
                    let mut degree = 0;
                    while harmonic_table_len(degree) < coefficients.len() {
                        degree += 1;
                    }
                    if harmonic_table_len(degree) != coefficients.len() {
                        return Err(LabError::InvalidGeometry(format!(
                            "harmonic table length {} is not a square",
                            coefficients.len()
                        )));
                    }
                } else if coefficients.len() % 2 == 0 {
                    return Err(LabError::InvalidGeometry(
                        "planar Fourier table must have odd length [a0, a1, b1, ...]".into(),
                    ));
                }
            }
            RadialFunction::Table {
                values,
                n_theta,
                n_phi,
            } => {
                let ok = if dim == 3 {
                    *n_theta >= 2 && *n_phi >= 3
                } else {
                    *n_theta == 1 && *n_phi >= 3
                };
                if !ok || values.len() != n_theta * n_phi {
                    return Err(LabError::InvalidGeometry(format!(
                        "radial table shape {n_theta}x{n_phi} does not match {} values",
                        values.len()
                    )));
                }
            }
        }
        if coefficients_nonfinite(self) {
            return Err(LabError::InvalidGeometry("non-finite radial data".into()));
        }
        let min = self.min_radius_estimate(dim);
        if !(min > 0.0) {
            return Err(LabError::InvalidGeometry(format!(
                "radial function must stay positive (min sampled {min})"
            )));
        }
        Ok(())
    }

    /// Radius along a unit direction given in the body frame.
    pub fn radius(&self, dir: &[f64]) -> f64 {
        match (self, dir.len()) {
            (RadialFunction::Harmonics { coefficients }, 3) => {
                harmonic_series(coefficients, [dir[0], dir[1], dir[2]])
            }
            (RadialFunction::Harmonics { coefficients }, _) => {
                let t = dir[1].atan2(dir[0]);
                let mut r = coefficients[0];
                for (k, pair) in coefficients[1..].chunks_exact(2).enumerate() {
                    let kt = (k + 1) as f64 * t;
                    r += pair[0] * kt.cos() + pair[1] * kt.sin();
                }
                r
            }
            (
                RadialFunction::Table {
                    values,
                    n_theta,
                    n_phi,
                },
                3,
            ) => {
                let theta = dir[2].clamp(-1.0, 1.0).acos();
                let phi = dir[1].atan2(dir[0]).rem_euclid(2.0 * PI);
                let ti = theta / PI * (*n_theta - 1) as f64;
                let pj = phi / (2.0 * PI) * *n_phi as f64;
                let i0 = (ti.floor() as usize).min(n_theta - 2);
                let j0 = (pj.floor() as usize) % n_phi;
                let j1 = (j0 + 1) % n_phi;
                let (ft, fp) = (ti - i0 as f64, pj - pj.floor());
                let at = |i: usize, j: usize| values[i * n_phi + j];
                let lo = at(i0, j0) * (1.0 - fp) + at(i0, j1) * fp;
                let hi = at(i0 + 1, j0) * (1.0 - fp) + at(i0 + 1, j1) * fp;
                lo * (1.0 - ft) + hi * ft
            }
            (RadialFunction::Table { values, n_phi, .. }, _) => {
                let t = dir[1].atan2(dir[0]).rem_euclid(2.0 * PI);
                let pj = t / (2.0 * PI) * *n_phi as f64;
                let j0 = (pj.floor() as usize) % n_phi;
                let j1 = (j0 + 1) % n_phi;
                let f = pj - pj.floor();
                values[j0] * (1.0 - f) + values[j1] * f
            }
        }
    }

    /// Rigorous upper bound on the radius over all directions.
    pub fn max_radius_bound(&self, dim: usize) -> f64 {
        match self {
            RadialFunction::Harmonics { coefficients } if dim == 3 => {
                // |Y_lm| <= sqrt((2l+1)/4pi) for the real orthonormal basis
                let mut bound = 0.0;
                let mut idx = 0;
                let mut ell = 0usize;
                while idx < coefficients.len() {
                    let cap = ((2 * ell + 1) as f64 / (4.0 * PI)).sqrt();
                    for _ in 0..(2 * ell + 1) {
                        bound += coefficients[idx].abs() * cap;
                        idx += 1;
                    }
                    ell += 1;
                }
                bound
            }
            RadialFunction::Harmonics { coefficients } => coefficients.iter().map(|c| c.abs()).sum(),
            RadialFunction::Table { values, .. } => values.iter().cloned().fold(0.0, f64::max),
        }
    }

    pub(crate) fn min_radius_estimate(&self, dim: usize) -> f64 {
        match self {
            RadialFunction::Table { values, .. } => values.iter().cloned().fold(f64::INFINITY, f64::min),
            RadialFunction::Harmonics { .. } if dim == 3 => fibonacci_sphere(4096)
                .iter()
                .map(|d| self.radius(d))
                .fold(f64::INFINITY, f64::min),
            RadialFunction::Harmonics { .. } => (0..4096)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / 4096.0;
                    self.radius(&[t.cos(), t.sin()])
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

fn coefficients_nonfinite(r: &RadialFunction) -> bool {
    match r {
        RadialFunction::Harmonics { coefficients } => coefficients.iter().any(|c| !c.is_finite()),
        RadialFunction::Table { values, .. } => values.iter().any(|c| !c.is_finite()),
    }
}
