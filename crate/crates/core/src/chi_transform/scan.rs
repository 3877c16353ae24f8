use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::numeric::{chi_ft_numeric, QuadratureBudget, QuadratureMethod};
use super::chi_ft_analytic;
use crate::error::{LabError, Result};
use crate::geometry::Domain;
use crate::optimize::{golden_section_min, nelder_mead};
use crate::quadrature::{circle_directions, fibonacci_sphere};

/// Scan parameters; `tol` is relative to the domain volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub k_max: f64,
    pub k_steps: usize,
    pub dir_mesh: usize,
    pub tol: f64,
    /// Used only for shapes without a closed-form transform.
    pub budget: QuadratureBudget,
    pub golden_iterations: usize,
}

impl ScanParams {
    pub fn new(k_max: f64, k_steps: usize, dir_mesh: usize, tol: f64) -> Self {
        Self {
            k_max,
            k_steps,
            dir_mesh,
            tol,
            budget: QuadratureBudget::grid(32),
            golden_iterations: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellCandidate {
    pub k: f64,
    /// `sup_alpha |chi_D(k alpha)|` at the refined `k`.
    pub residual: f64,
    /// `residual / volume`, compared against the scan tolerance.
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralScan {
    pub k_grid: Vec<f64>,
    pub sup_abs: Vec<f64>,
    /// Numeric path only: error estimate above `tol * volume` at this `k`.
    pub inconclusive: Vec<bool>,
    pub candidate_shells: Vec<ShellCandidate>,
    pub tol: f64,
    pub volume: f64,
    pub dir_mesh: usize,
    pub analytic: bool,
}

impl SpectralScan {
    /// `min_k sup_alpha |chi_D(k alpha)| / volume` over the grid.
    pub fn min_relative_sup(&self) -> f64 {
        self.sup_abs.iter().cloned().fold(f64::INFINITY, f64::min) / self.volume
    }

    /// `k, sup_abs, inconclusive` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sup_abs,inconclusive\n");
        for ((k, s), flag) in self.k_grid.iter().zip(&self.sup_abs).zip(&self.inconclusive) {
            out.push_str(&format!("{k:.12e},{s:.12e},{}\n", u8::from(*flag)));
        }
        out
    }
}

/// Uniform angles in 2D, Fibonacci sphere in 3D.
pub fn direction_mesh(dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 2 {
        circle_directions(count).into_iter().map(|d| d.to_vec()).collect()
    } else {
        fibonacci_sphere(count).into_iter().map(|d| d.to_vec()).collect()
    }
}

fn spherical_to_dir(dim: usize, angles: &[f64]) -> Vec<f64> {
    if dim == 2 {
        vec![angles[0].cos(), angles[0].sin()]
    } else {
        let (st, ct) = angles[0].sin_cos();
        vec![st * angles[1].cos(), st * angles[1].sin(), ct]
    }
}

fn dir_to_spherical(d: &[f64]) -> Vec<f64> {
    if d.len() == 2 {
        vec![d[1].atan2(d[0])]
    } else {
        vec![d[2].clamp(-1.0, 1.0).acos(), d[1].atan2(d[0])]
    }
}

struct Evaluator<'a> {
    dom: &'a Domain,
    budget: QuadratureBudget,
    analytic: bool,
}

impl Evaluator<'_> {
    /// `(|chi(xi)|, error)`.
    fn abs_at(&self, xi: &[f64], stream: u64) -> Result<(f64, f64)> {
        if self.analytic {
            let v = chi_ft_analytic(self.dom, xi)?.expect("analytic path checked");
            return Ok((v.norm(), 0.0));
        }
        let budget = match self.budget.method {
            QuadratureMethod::MonteCarlo { samples, seed } => QuadratureBudget {
                method: QuadratureMethod::MonteCarlo {
                    samples,
                    seed: seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15),
                },
                tolerance: self.budget.tolerance,
            },
            _ => self.budget,
        };
        let e = chi_ft_numeric(self.dom, xi, &budget)?;
        Ok((e.value.norm(), e.error))
    }

    /// Mesh sup over directions at wavenumber `k`, with Nelder-Mead polishing
    /// of the argmax when the sup is within a decade of `threshold`.
    fn sup_at(&self, k: f64, mesh: &[Vec<f64>], threshold: f64, stream: u64) -> Result<(f64, f64)> {
        let mut best = (f64::NEG_INFINITY, 0.0, 0usize);
        for (i, d) in mesh.iter().enumerate() {
            let xi: Vec<f64> = d.iter().map(|v| k * v).collect();
            let (a, err) = self.abs_at(&xi, stream)?;
            if a > best.0 {
                best = (a, err.max(best.1), i);
            } else {
                best.1 = best.1.max(err);
            }
        }
        let (mut sup, err, arg) = best;
        if sup < 10.0 * threshold && self.analytic {
            let dim = self.dom.dim();
            let start = dir_to_spherical(&mesh[arg]);
            let spacing = if dim == 2 {
                2.0 * PI / mesh.len() as f64
            } else {
                (4.0 * PI / mesh.len() as f64).sqrt()
            };
            let polished = nelder_mead(
                |a| {
                    let d = spherical_to_dir(dim, a);
                    let xi: Vec<f64> = d.iter().map(|v| k * v).collect();
                    -self.abs_at(&xi, stream).map(|r| r.0).unwrap_or(0.0)
                },
                &start,
                spacing,
                30,
                1e-12,
            );
            sup = sup.max(-polished.value);
        }
        Ok((sup, err))
    }
}

/// Scan `k` in `(0, k_max]` for spheres `|xi| = k` on which `chi_D` vanishes.
pub fn spherical_zero_scan(dom: &Domain, params: &ScanParams) -> Result<SpectralScan> {
    let dim = dom.dim();
    let min_mesh = if dim == 2 { 64 } else { 512 };
    if !(params.k_max > 0.0) || !(params.tol > 0.0) {
        return Err(LabError::Domain("k_max and tol must be > 0".into()));
    }
    if params.dir_mesh < min_mesh {
        return Err(LabError::Domain(format!(
            "direction mesh must have at least {min_mesh} points in {dim}D, got {}",
            params.dir_mesh
        )));
    }
    if params.k_steps < 3 {
        return Err(LabError::Domain("k_steps must be >= 3".into()));
    }
    let zero = vec![0.0; dim];
    let eval = Evaluator {
        dom,
        budget: params.budget,
        analytic: chi_ft_analytic(dom, &zero)?.is_some(),
    };
    let volume = dom.volume();
    let threshold = params.tol * volume;
    let mesh = direction_mesh(dim, params.dir_mesh);
    let k_grid: Vec<f64> = (1..=params.k_steps)
        .map(|i| params.k_max * i as f64 / params.k_steps as f64)
        .collect();
    let rows: Vec<(f64, f64)> = k_grid
        .par_iter()
        .enumerate()
        .map(|(i, &k)| eval.sup_at(k, &mesh, threshold, i as u64))
        .collect::<Result<_>>()?;
    let sup_abs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let inconclusive: Vec<bool> = rows.iter().map(|r| r.1 > threshold).collect();

    let minima: Vec<usize> = (1..k_grid.len() - 1)
        .filter(|&i| sup_abs[i] <= sup_abs[i - 1] && sup_abs[i] <= sup_abs[i + 1])
        .collect();
    let refined: Vec<Option<ShellCandidate>> = minima
        .par_iter()
        .map(|&i| {
            let stream = (k_grid.len() + i) as u64;
            let (k, residual) = golden_section_min(
                |k| eval.sup_at(k, &mesh, threshold, stream).map(|r| r.0).unwrap_or(f64::INFINITY),
                k_grid[i - 1],
                k_grid[i + 1],
                params.golden_iterations,
            );
            (residual < threshold).then_some(ShellCandidate {
                k,
                residual,
                relative_residual: residual / volume,
            })
        })
        .collect();
    let mut candidate_shells: Vec<ShellCandidate> = refined.into_iter().flatten().collect();
    // neighbouring minima may refine onto the same shell
    candidate_shells.dedup_by(|a, b| (a.k - b.k).abs() < 1e-6 * b.k.max(1.0));

    Ok(SpectralScan {
        k_grid,
        sup_abs,
        inconclusive,
        candidate_shells,
        tol: params.tol,
        volume,
        dir_mesh: params.dir_mesh,
        analytic: eval.analytic,
    })
}
