use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::numeric::{exp_integral, integrate_over_domain, QuadratureBudget};
use crate::error::{LabError, Result};
use crate::geometry::Domain;

/// Largest allowed `|lambda| k (x3 extent)`; keeps `e^40` well inside f64 range.
pub const GROWTH_LIMIT: f64 = 40.0;

/// Complex direction `z = s1 a + i s2 b` with
/// `a = sqrt(lambda^2 + 1) (cos theta, sin theta, 0)` and `b = lambda e3`,
/// so that `z . z = 1`. The integrand is `exp(i k z . x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDirection {
    pub lambda: f64,
    pub theta: f64,
    pub k: f64,
    pub signs: (i8, i8),
}

impl ComplexDirection {
    pub fn new(lambda: f64, theta: f64, k: f64) -> Self {
        Self { lambda, theta, k, signs: (1, 1) }
    }

    pub fn with_signs(mut self, s1: i8, s2: i8) -> Self {
        self.signs = (s1, s2);
        self
    }

    pub fn real_part(&self) -> [f64; 3] {
        let r = (self.lambda * self.lambda + 1.0).sqrt();
        [r * self.theta.cos(), r * self.theta.sin(), 0.0]
    }

    pub fn imag_part(&self) -> [f64; 3] {
        [0.0, 0.0, self.lambda]
    }

    /// `k z`, the complex wave vector.
    pub fn wave(&self) -> [Complex64; 3] {
        let (a, b) = (self.real_part(), self.imag_part());
        let (s1, s2) = (f64::from(self.signs.0), f64::from(self.signs.1));
        std::array::from_fn(|j| Complex64::new(s1 * a[j], s2 * b[j]) * self.k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.lambda.is_finite() || !self.theta.is_finite() {
            return Err(LabError::Domain("complex direction needs k > 0 and finite lambda, theta".into()));
        }
        for s in [self.signs.0, self.signs.1] {
            if s != 1 && s != -1 {
                return Err(LabError::Domain(format!("sign must be +1 or -1, got {s}")));
            }
        }
        let (a, b) = (self.real_part(), self.imag_part());
        let ab: f64 = (0..3).map(|j| a[j] * b[j]).sum();
        let aa: f64 = a.iter().map(|v| v * v).sum();
        let bb: f64 = b.iter().map(|v| v * v).sum();
        // a.a is computed from a rounded sqrt, so scale the check by its size
        let defect = (aa - bb - 1.0).abs() / (1.0 + bb);
        if ab.abs() > 1e-14 || defect > 1e-14 {
            return Err(LabError::Internal(format!(
                "complex direction is not null-normalised: a.b = {ab:e}, a.a - b.b - 1 = {defect:e}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conj6Estimate {
    pub direction: ComplexDirection,
    pub value: Complex64,
    pub error: f64,
    /// `int_D |integrand| dx`, the scale for relative statements.
    pub abs_integral: f64,
    pub relative_value: f64,
    pub relative_error: f64,
    /// `|lambda| k (x3 extent)` actually encountered.
    pub growth: f64,
    pub partial: bool,
}

/// `int_D exp(i k z . x) dx` for the complex direction `cd`.
pub fn conjecture6_integral(dom: &Domain, cd: &ComplexDirection, budget: &QuadratureBudget) -> Result<Conj6Estimate> {
    if dom.dim() != 3 {
        return Err(LabError::DimensionMismatch {
            expected: 3,
            got: dom.dim(),
            context: "complex-direction integral".into(),
        });
    }
    cd.validate()?;
    let (lo, hi) = dom.bounding_box();
    let growth = cd.lambda.abs() * cd.k * (hi[2] - lo[2]);
    if growth > GROWTH_LIMIT {
        return Err(LabError::GrowthGuard { value: growth, limit: GROWTH_LIMIT });
    }
    let wave = cd.wave();
    let est = exp_integral(dom, &wave, budget)?;
    // |exp(i c.x)| = exp(-Im(c).x), itself an exponential integral
    let decay: Vec<Complex64> = wave.iter().map(|c| Complex64::new(0.0, -c.im)).collect();
    let abs = match exp_integral(dom, &decay, budget) {
        Ok(e) => e.value.re,
        Err(_) => integrate_over_domain(
            dom,
            |x: &[f64]| {
                let s: f64 = wave.iter().zip(x).map(|(c, v)| c.im * v).sum();
                Complex64::new((-s).exp(), 0.0)
            },
            budget,
        )?
        .value
        .re,
    };
    Ok(Conj6Estimate {
        direction: *cd,
        value: est.value,
        error: est.error,
        abs_integral: abs,
        relative_value: est.value.norm() / abs,
        relative_error: est.error / abs,
        growth,
        partial: est.partial,
    })
}
