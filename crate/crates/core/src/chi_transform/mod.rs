//! Fourier transforms `chi_D(xi) = int_D exp(i xi . x) dx` of domain
//! indicators: closed forms, quadrature, spherical-zero scans, the
//! complex-direction integral and the factorisation probe.

mod analytic;
mod conj6;
mod factor;
mod numeric;
mod scan;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use analytic::{
    chi_ft_analytic, chi_ft_ball, chi_ft_ellipsoid, chi_ft_polygon, displayed_ellipsoid_formula,
    ellipsoid_formula_check, EllipsoidFormulaCheck,
};
pub use conj6::{conjecture6_integral, ComplexDirection, Conj6Estimate, GROWTH_LIMIT};
pub use factor::{factorization_check, factorization_check_with, FactorVerdict, FactorizationReport, RayProbe, FACTOR_EPSILONS};
pub use numeric::{chi_ft_numeric, exp_integral, integrate_over_domain, QuadratureBudget, QuadratureMethod};
pub use scan::{direction_mesh, spherical_zero_scan, ScanParams, ShellCandidate, SpectralScan};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    MonteCarlo,
    Grid,
    PolarGrid,
}

/// A quadrature or closed-form value with its error estimate.
///
/// `error` is one standard error for Monte Carlo and the difference between
/// two resolutions for grids. `partial` marks results whose error exceeds
/// the requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub method: Method,
    pub partial: bool,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            error: 0.0,
            method: Method::Analytic,
            partial: false,
        }
    }
}

/// `chi_D` at a real frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierValue {
    pub xi: Vec<f64>,
    pub value: Complex64,
}

/// `chi_D(xi)`: closed form when the shape has one, otherwise the default
/// polar or Cartesian grid.
pub fn chi_ft(dom: &crate::Domain, xi: &[f64]) -> crate::Result<Estimate> {
    if let Some(v) = chi_ft_analytic(dom, xi)? {
        return Ok(Estimate::exact(v));
    }
    chi_ft_numeric(dom, xi, &QuadratureBudget::default())
}
