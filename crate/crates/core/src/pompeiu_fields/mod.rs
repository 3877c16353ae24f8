//! Nonzero fields whose integrals vanish over every moved copy of a ball,
//! their verification by quadrature, and planar Morera-type checks.
//!
//! A field is the inverse Fourier transform of a density carried by the
//! sphere `|xi| = b`:
//! `f(x) = (2 pi)^{-n} int_{|xi| = b} A(xi) exp(-i xi . x) dS(xi)`.
//! Its integral over `sigma(B)` pairs `A` with `chi_B` on that sphere, so it
//! vanishes for all motions exactly when `b a` is a zero of `J_{n/2}`.

mod planar;
mod two_radii;
mod verify;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature::SphereRule;
use crate::specfun::{
    bessel_j_integer, bessel_j_scaled, harmonic_index, legendre_p, real_spherical_harmonic, spherical_j,
    BesselOrder,
};

pub use planar::{
    dbar_integral, morera_adaptive, morera_contour, wirtinger_residual, MoreraResult, PlanarField, PlanarGrid,
};
pub use two_radii::{two_radii_test, TwoRadiiReport, TwoRadiiVerdict};
pub use verify::{ball_radial_integral, verify_pompeiu, MotionVerification, Verdict, VERIFY_REL_TOL};

/// Largest harmonic degree accepted in a 3D density table.
pub const MAX_DENSITY_DEGREE: usize = 16;

/// Density on the sphere `|xi| = b`.
///
/// `Harmonics` uses the real spherical-harmonic layout of
/// [`crate::specfun::harmonic_index`] in 3D and Fourier coefficients
/// `[a0, a1, b1, a2, b2, ...]` in the angle in 2D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    Radial,
    Harmonics { coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleField {
    pub b: f64,
    pub dim: usize,
    pub density: Density,
}

impl CounterexampleField {
    pub fn radial(b: f64, dim: usize) -> Result<Self> {
        Self::new(b, dim, Density::Radial)
    }

    pub fn harmonics(b: f64, dim: usize, coefficients: Vec<f64>) -> Result<Self> {
        Self::new(b, dim, Density::Harmonics { coefficients })
    }

    pub fn new(b: f64, dim: usize, density: Density) -> Result<Self> {
        let f = Self { b, dim, density };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(LabError::Domain(format!("b must be a positive number, got {}", self.b)));
        }
        if !(2..=3).contains(&self.dim) {
            return Err(LabError::Domain(format!("field dimension must be 2 or 3, got {}", self.dim)));
        }
        if let Density::Harmonics { coefficients } = &self.density {
            if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
                return Err(LabError::Domain("density coefficients must be finite and non-empty".into()));
            }
            let len = coefficients.len();
            if self.dim == 3 {
                let degree = (len as f64).sqrt().round() as usize;
                if degree * degree != len || degree == 0 {
                    return Err(LabError::Domain(format!(
                        "3D density needs (L+1)^2 coefficients, got {len}"
                    )));
                }
                if degree - 1 > MAX_DENSITY_DEGREE {
                    return Err(LabError::UnsupportedDegree {
                        ell: degree - 1,
                        max: MAX_DENSITY_DEGREE,
                    });
                }
            } else if len % 2 == 0 {
                return Err(LabError::Domain(format!(
                    "2D density needs 2M+1 Fourier coefficients, got {len}"
                )));
            }
        }
        Ok(())
    }

    /// Whether the density is constant on the sphere.
    pub fn is_radial(&self) -> bool {
        matches!(self.density, Density::Radial)
    }

    /// Radial profile `f(r)` of a radial field.
    pub fn radial_profile(&self, r: f64) -> f64 {
        let t = self.b * r;
        if self.dim == 3 {
            (2.0 * PI).powf(-1.5) * self.b * self.b * bessel_j_scaled(BesselOrder::HALF, t)
        } else {
            self.b * bessel_j_integer(0, t) / (2.0 * PI)
        }
    }

    /// `A(dir)` for a unit vector `dir`.
    pub fn density_at(&self, dir: &[f64]) -> f64 {
        match &self.density {
            Density::Radial => 1.0,
            Density::Harmonics { coefficients } => {
                if self.dim == 3 {
                    crate::specfun::harmonic_series(coefficients, [dir[0], dir[1], dir[2]])
                } else {
                    let phi = dir[1].atan2(dir[0]);
                    fourier_series(coefficients, phi)
                }
            }
        }
    }

    /// `f(x)` in closed form.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let coefficients = match &self.density {
            Density::Radial => return Complex64::new(self.radial_profile(r), 0.0),
            Density::Harmonics { coefficients } => coefficients,
        };
        let t = self.b * r;
        if self.dim == 3 {
            // int_{S^2} Y_lm(w) exp(-i t w . xhat) dw = 4 pi (-i)^l j_l(t) Y_lm(xhat)
            let dir = if r > 0.0 { [x[0] / r, x[1] / r, x[2] / r] } else { [0.0, 0.0, 1.0] };
            let degree = (coefficients.len() as f64).sqrt().round() as usize - 1;
            let mut sum = Complex64::new(0.0, 0.0);
            for ell in 0..=degree {
                let radial = spherical_j(ell, t).expect("degree validated");
                if radial == 0.0 {
                    continue;
                }
                let mut angular = 0.0;
                for m in -(ell as i64)..=(ell as i64) {
                    let c = coefficients[harmonic_index(ell, m)];
                    if c != 0.0 {
                        angular += c * real_spherical_harmonic(ell, m, dir);
                    }
                }
                sum += minus_i_pow(ell) * (radial * angular);
            }
            sum * (4.0 * PI * self.b * self.b / (2.0 * PI).powi(3))
        } else {
            // int_0^{2 pi} e^{i m theta} exp(-i t cos(theta - phi)) = 2 pi (-i)^m J_m(t) e^{i m phi}
            let phi = x[1].atan2(x[0]);
            let mut sum = Complex64::new(coefficients[0] * bessel_j_integer(0, t), 0.0);
            for m in 1..=coefficients.len() / 2 {
                let (a, b) = (coefficients[2 * m - 1], coefficients[2 * m]);
                let mf = m as f64;
                let angular = a * (mf * phi).cos() + b * (mf * phi).sin();
                sum += minus_i_pow(m) * (bessel_j_integer(m, t) * angular);
            }
            sum * (self.b / (2.0 * PI))
        }
    }

    /// `f(x)` by direct quadrature of the defining sphere integral; an
    /// independent check on [`CounterexampleField::eval`].
    pub fn eval_by_quadrature(&self, x: &[f64], nodes: usize) -> Complex64 {
        let b = self.b;
        if self.dim == 3 {
            let rule = SphereRule::new(nodes, 2 * nodes);
            let mut sum = Complex64::new(0.0, 0.0);
            for (w, wt) in rule.points.iter().zip(&rule.weights) {
                let phase = -b * (w[0] * x[0] + w[1] * x[1] + w[2] * x[2]);
                sum += Complex64::from_polar(wt * self.density_at(w), phase);
            }
            sum * (b * b / (2.0 * PI).powi(3))
        } else {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..nodes {
                let th = 2.0 * PI * j as f64 / nodes as f64;
                let w = [th.cos(), th.sin()];
                let phase = -b * (w[0] * x[0] + w[1] * x[1]);
                sum += Complex64::from_polar(self.density_at(&w), phase);
            }
            sum * (2.0 * PI / nodes as f64) * (b / (2.0 * PI).powi(2))
        }
    }
}

fn fourier_series(c: &[f64], phi: f64) -> f64 {
    let mut s = c[0];
    for m in 1..=c.len() / 2 {
        let mf = m as f64;
        s += c[2 * m - 1] * (mf * phi).cos() + c[2 * m] * (mf * phi).sin();
    }
    s
}

fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn i_pow(n: usize) -> Complex64 {
    minus_i_pow(n).conj()
}

/// `f(x)`, checking dimensions.
pub fn eval_field(field: &CounterexampleField, x: &[f64]) -> Result<Complex64> {
    if x.len() != field.dim {
        return Err(LabError::DimensionMismatch {
            expected: field.dim,
            got: x.len(),
            context: "field evaluation point".into(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Domain("evaluation point must be finite".into()));
    }
    Ok(field.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWaveCheck {
    /// `exp(i k alpha . x)`.
    pub lhs: Complex64,
    /// `sum_{l <= L} 4 pi i^l j_l(k|x|) sum_m Y_lm(alpha) Y_lm(x0)`.
    pub rhs: Complex64,
    /// Largest `|sum_m Y_lm(alpha) Y_lm(x0) - (2l+1) P_l(alpha . x0) / (4 pi)|`.
    pub addition_residual: f64,
}

impl PlaneWaveCheck {
    pub fn difference(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// Truncated plane-wave expansion with the harmonic sum done term by term.
pub fn plane_wave_expansion_check(k: f64, alpha: [f64; 3], x: [f64; 3], l_max: usize) -> Result<PlaneWaveCheck> {
    if l_max > 12 {
        return Err(LabError::UnsupportedDegree { ell: l_max, max: 12 });
    }
    let a_norm = alpha.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (a_norm - 1.0).abs() > 1e-12 {
        return Err(LabError::Domain(format!("alpha must be a unit vector, |alpha| = {a_norm}")));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(k > 0.0) || k * r > l_max as f64 {
        return Err(LabError::Domain(format!(
            "need k > 0 and k|x| <= L_max for the truncation; k|x| = {}",
            k * r
        )));
    }
    let x0 = if r > 0.0 { [x[0] / r, x[1] / r, x[2] / r] } else { [0.0, 0.0, 1.0] };
    let cos = (alpha[0] * x0[0] + alpha[1] * x0[1] + alpha[2] * x0[2]).clamp(-1.0, 1.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut addition_residual: f64 = 0.0;
    for ell in 0..=l_max {
        let mut harmonic_sum = 0.0;
        for m in -(ell as i64)..=(ell as i64) {
            harmonic_sum += real_spherical_harmonic(ell, m, alpha) * real_spherical_harmonic(ell, m, x0);
        }
        let closed = (2 * ell + 1) as f64 / (4.0 * PI) * legendre_p(ell, cos);
        addition_residual = addition_residual.max((harmonic_sum - closed).abs());
        rhs += i_pow(ell) * (4.0 * PI * spherical_j(ell, k * r)? * harmonic_sum);
    }
    let phase = k * (alpha[0] * x[0] + alpha[1] * x[1] + alpha[2] * x[2]);
    Ok(PlaneWaveCheck {
        lhs: Complex64::from_polar(1.0, phase),
        rhs,
        addition_residual,
    })
}
