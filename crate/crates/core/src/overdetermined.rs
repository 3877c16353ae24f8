//! The overdetermined problem `(lap + k^2) u = 1` in `D`, `u = u_N = 0` on
//! the boundary, solved in closed form on balls.
//!
//! On the ball of radius `a` the radial solution is
//! `u(r) = 1/k^2 + C phi(k r)` with `phi = j_0` in space and `J_0` in the
//! plane. `u(a) = 0` fixes `C = -1 / (k^2 phi(k a))`; `u'(a) = 0` then holds
//! exactly when `phi'(k a)`, which is proportional to `J_{n/2}(k a)`,
//! vanishes.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chi_transform::{chi_ft_ball, integrate_over_domain, QuadratureBudget};
use crate::error::{LabError, Result};
use crate::geometry::Domain;
use crate::quadrature::{fibonacci_sphere, SphereRule};
use crate::specfun::{bessel_j_integer, bessel_zero, BesselOrder};

/// Radial samples stored with a solution.
pub const PROFILE_POINTS: usize = 2048;

/// Largest zero index accepted by [`solve_ball`].
pub const MAX_ZERO_INDEX: usize = 50;

/// `phi(t)` and its first two derivatives in `t`.
fn phi(n: usize, t: f64) -> (f64, f64, f64) {
    if n == 3 {
        if t.abs() < 1e-2 {
            // sin t / t and derivatives from the even series
            let t2 = t * t;
            let v = 1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0;
            let d1 = t * (-1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0);
            let d2 = -1.0 / 3.0 + t2 / 10.0 - t2 * t2 / 168.0;
            return (v, d1, d2);
        }
        let (s, c) = t.sin_cos();
        let v = s / t;
        let d1 = (t * c - s) / (t * t);
        let d2 = ((2.0 - t * t) * s - 2.0 * t * c) / (t * t * t);
        (v, d1, d2)
    } else {
        let j0 = bessel_j_integer(0, t);
        let j1 = bessel_j_integer(1, t);
        // J0' = -J1, J0'' = -(J0 - J1/t), with J1/t -> 1/2 at 0
        let j1_over_t = if t.abs() < 1e-8 { 0.5 } else { j1 / t };
        (j0, -j1, -(j0 - j1_over_t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverdeterminedSolution {
    pub a: f64,
    pub k: f64,
    /// Coefficient of `phi(k r)`.
    pub c: f64,
    pub n: usize,
    /// Index of the `J_{n/2}` zero used, `None` for an arbitrary `k`.
    pub zero_index: Option<usize>,
    /// `(r, u(r))` on a uniform grid over `[0, a]`.
    pub profile: Vec<(f64, f64)>,
}

impl OverdeterminedSolution {
    pub fn u(&self, r: f64) -> f64 {
        1.0 / (self.k * self.k) + self.c * phi(self.n, self.k * r).0
    }

    pub fn du(&self, r: f64) -> f64 {
        self.c * self.k * phi(self.n, self.k * r).1
    }

    pub fn d2u(&self, r: f64) -> f64 {
        self.c * self.k * self.k * phi(self.n, self.k * r).2
    }

    /// `u'' + (n-1)/r u' + k^2 u - 1` from the closed-form derivatives; the
    /// `1/r` term takes its limit `(n-1) u''(0)` at the centre.
    pub fn pde_residual_at(&self, r: f64) -> f64 {
        let nm1 = (self.n - 1) as f64;
        let radial = if r == 0.0 { nm1 * self.d2u(0.0) } else { nm1 / r * self.du(r) };
        self.d2u(r) + radial + self.k * self.k * self.u(r) - 1.0
    }

    /// `(ka)` is within 1e-10 of a positive zero of `J_{n/2}`.
    pub fn on_shell(&self) -> bool {
        let order = BesselOrder::for_dimension(self.n).expect("n validated");
        let t = self.k * self.a;
        (1..=MAX_ZERO_INDEX + 1).any(|j| bessel_zero(order, j).is_ok_and(|z| (z - t).abs() < 1e-10))
    }

    /// CSV `r,u` of the stored profile.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u\n");
        for (r, u) in &self.profile {
            let _ = writeln!(out, "{r:.17e},{u:.17e}");
        }
        out
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(LabError::Domain(format!("overdetermined solver supports n = 2, 3; got {n}")))
    }
}

/// Closed-form solution for an arbitrary `k`; both boundary conditions
/// hold only on a zero shell. Used for perturbation studies.
pub fn solve_with_wavenumber(a: f64, k: f64, n: usize) -> Result<OverdeterminedSolution> {
    check_dim(n)?;
    if !(a > 0.0 && k > 0.0) || !a.is_finite() || !k.is_finite() {
        return Err(LabError::Domain(format!("need a > 0 and k > 0, got a = {a}, k = {k}")));
    }
    let p = phi(n, k * a).0;
    if p.abs() < 1e-300 {
        return Err(LabError::Internal(format!("phi(ka) vanishes at ka = {}", k * a)));
    }
    let c = -1.0 / (k * k * p);
    let mut sol = OverdeterminedSolution {
        a,
        k,
        c,
        n,
        zero_index: None,
        profile: Vec::new(),
    };
    sol.profile = (0..PROFILE_POINTS)
        .map(|i| {
            let r = a * i as f64 / (PROFILE_POINTS - 1) as f64;
            (r, sol.u(r))
        })
        .collect();
    Ok(sol)
}

/// Solve on the ball of radius `a` with `k = s_{j, n/2} / a`.
pub fn solve_ball(a: f64, zero_index: usize, n: usize) -> Result<OverdeterminedSolution> {
    check_dim(n)?;
    if zero_index == 0 || zero_index > MAX_ZERO_INDEX {
        return Err(LabError::Domain(format!(
            "zero index must be in 1..={MAX_ZERO_INDEX}, got {zero_index}"
        )));
    }
    if !(a > 0.0) {
        return Err(LabError::Domain(format!("radius must be > 0, got {a}")));
    }
    let s = bessel_zero(BesselOrder::for_dimension(n)?, zero_index)?;
    let mut sol = solve_with_wavenumber(a, s / a, n)?;
    sol.zero_index = Some(zero_index);
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Sup of the closed-form PDE residual over the grid.
    pub pde_residual: f64,
    /// Same with central differences of `u`.
    pub pde_residual_fd: f64,
    pub fd_step: f64,
    /// `|u(a)|`.
    pub dirichlet: f64,
    /// `|u'(a)|`.
    pub neumann: f64,
}

/// Relative step for the finite-difference cross-check. At 1e-5 the
/// rounding term `4 eps |u| / h^2` alone reaches 2e-6.
pub const FD_STEP: f64 = 1e-4;

/// Residuals of the PDE and both boundary conditions on `grid_points`
/// radii in `[0, a]`.
pub fn residual_check(sol: &OverdeterminedSolution, grid_points: usize) -> Result<ResidualReport> {
    if grid_points < 2 {
        return Err(LabError::Domain("residual grid needs at least 2 points".into()));
    }
    let h = FD_STEP * sol.a;
    let nm1 = (sol.n - 1) as f64;
    let (mut pde, mut pde_fd) = (0.0_f64, 0.0_f64);
    for i in 0..grid_points {
        let r = sol.a * i as f64 / (grid_points - 1) as f64;
        pde = pde.max(sol.pde_residual_at(r).abs());
        // u is even in r, so u(r - h) = u(|r - h|) near the centre
        let (um, u0, up) = (sol.u((r - h).abs()), sol.u(r), sol.u(r + h));
        let d2 = (up - 2.0 * u0 + um) / (h * h);
        let radial = if r == 0.0 { nm1 * d2 } else { nm1 / r * (up - um) / (2.0 * h) };
        pde_fd = pde_fd.max((d2 + radial + sol.k * sol.k * u0 - 1.0).abs());
    }
    Ok(ResidualReport {
        pde_residual: pde,
        pde_residual_fd: pde_fd,
        fd_step: h,
        dirichlet: sol.u(sol.a).abs(),
        neumann: sol.du(sol.a).abs(),
    })
}

/// `v = u - 1/k^2`, which solves `(lap + k^2) v = 0` with `v_N = 0` and
/// `v = -1/k^2` on the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conjecture5Profile {
    pub a: f64,
    pub k: f64,
    pub n: usize,
    /// The constant `1/k^2` that was subtracted.
    pub shift: f64,
    pub profile: Vec<(f64, f64)>,
    pub v_at_boundary: f64,
    /// Sup over the profile radii of `|v'' + (n-1)/r v' + k^2 v|`.
    pub helmholtz_residual: f64,
    pub neumann: f64,
    /// `max |(v + 1/k^2) - u|` over the profile.
    pub round_trip_error: f64,
}

impl Conjecture5Profile {
    /// `u = v + 1/k^2` at the stored radii.
    pub fn to_solution_profile(&self) -> Vec<(f64, f64)> {
        self.profile.iter().map(|&(r, v)| (r, v + self.shift)).collect()
    }
}

pub fn to_conjecture5(sol: &OverdeterminedSolution) -> Conjecture5Profile {
    let shift = 1.0 / (sol.k * sol.k);
    let profile: Vec<(f64, f64)> = sol.profile.iter().map(|&(r, u)| (r, u - shift)).collect();
    let nm1 = (sol.n - 1) as f64;
    let helmholtz_residual = sol
        .profile
        .iter()
        .map(|&(r, _)| {
            let v = sol.c * phi(sol.n, sol.k * r).0;
            let radial = if r == 0.0 { nm1 * sol.d2u(0.0) } else { nm1 / r * sol.du(r) };
            (sol.d2u(r) + radial + sol.k * sol.k * v).abs()
        })
        .fold(0.0, f64::max);
    let mut out = Conjecture5Profile {
        a: sol.a,
        k: sol.k,
        n: sol.n,
        shift,
        v_at_boundary: sol.u(sol.a) - shift,
        helmholtz_residual,
        neumann: sol.du(sol.a).abs(),
        round_trip_error: 0.0,
        profile,
    };
    out.round_trip_error = out
        .to_solution_profile()
        .iter()
        .zip(&sol.profile)
        .map(|(x, y)| (x.1 - y.1).abs())
        .fold(0.0, f64::max);
    out
}

/// `chi_B(k alpha)` obtained three ways for each sampled direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalZeroDerivation {
    pub k: f64,
    pub directions: usize,
    /// `max_alpha |chi_B(k alpha)|` from the closed form.
    pub max_abs: f64,
    /// `max_alpha |int_B e^{ik alpha.x} (lap + k^2) u dx|` by quadrature.
    pub max_abs_pairing: f64,
    /// `max_alpha |oint (e u_N - u d_N e) dS|`, the pairing after Green's
    /// identity; only the boundary values of `u` enter.
    pub max_abs_boundary: f64,
    /// Largest disagreement between the three routes.
    pub route_spread: f64,
}

/// Multiply the equation by `exp(i k alpha . x)` and integrate over the
/// ball; the result is `chi_B(k alpha)`, which must vanish on a zero shell.
pub fn derive_spherical_zero(sol: &OverdeterminedSolution, dir_samples: usize) -> Result<SphericalZeroDerivation> {
    if sol.n != 3 {
        return Err(LabError::DimensionMismatch {
            expected: 3,
            got: sol.n,
            context: "spherical-zero derivation".into(),
        });
    }
    if dir_samples == 0 {
        return Err(LabError::Domain("need at least one direction".into()));
    }
    let ball = Domain::ball(&[0.0; 3], sol.a)?;
    let closed = chi_ft_ball(sol.a, 3, sol.k)?;
    let budget = QuadratureBudget::grid(48);
    let sphere = SphereRule::new(48, 96);
    let (ua, dua) = (sol.u(sol.a), sol.du(sol.a));
    let i = Complex64::new(0.0, 1.0);
    let (mut max_abs, mut max_pair, mut max_bdry, mut spread) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let dirs = if dir_samples == 1 { vec![[0.0, 0.0, 1.0]] } else { fibonacci_sphere(dir_samples) };
    for alpha in dirs {
        let wave = |x: &[f64]| sol.k * (alpha[0] * x[0] + alpha[1] * x[1] + alpha[2] * x[2]);
        let pairing = integrate_over_domain(
            &ball,
            |x: &[f64]| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                Complex64::from_polar(sol.pde_residual_at(r) + 1.0, wave(x))
            },
            &budget,
        )?
        .value;
        let mut boundary = Complex64::new(0.0, 0.0);
        for (w, wt) in sphere.points.iter().zip(&sphere.weights) {
            let x = [sol.a * w[0], sol.a * w[1], sol.a * w[2]];
            let e = Complex64::from_polar(1.0, wave(&x));
            let de = i * sol.k * (alpha[0] * w[0] + alpha[1] * w[1] + alpha[2] * w[2]) * e;
            boundary += (e * dua - de * ua) * (wt * sol.a * sol.a);
        }
        max_abs = max_abs.max(closed.norm());
        max_pair = max_pair.max(pairing.norm());
        max_bdry = max_bdry.max(boundary.norm());
        spread = spread.max((pairing - closed).norm()).max((boundary - closed).norm());
    }
    Ok(SphericalZeroDerivation {
        k: sol.k,
        directions: dir_samples,
        max_abs,
        max_abs_pairing: max_pair,
        max_abs_boundary: max_bdry,
        route_spread: spread,
    })
}

/// `min_C max(|u(a)|, |u'(a)|)` over the family `u = 1/k^2 + C phi(k r)`.
/// Zero exactly when `k a` is a zero of `J_{n/2}`.
pub fn boundary_defect(a: f64, k: f64, n: usize) -> Result<f64> {
    check_dim(n)?;
    let (p, dp, _) = phi(n, k * a);
    let inv = 1.0 / (k * k);
    let slope = k * dp;
    let mut candidates = vec![0.0];
    if p != 0.0 {
        candidates.push(-inv / p);
    }
    for s in [1.0, -1.0] {
        let d = p + s * slope;
        if d != 0.0 {
            candidates.push(-inv / d);
        }
    }
    Ok(candidates
        .into_iter()
        .map(|c| (inv + c * p).abs().max((c * slope).abs()))
        .fold(f64::INFINITY, f64::min))
}
