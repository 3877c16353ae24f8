use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{cross, Domain, RigidMotion, Shape};
use crate::error::{LabError, Result};

type SurfaceFn = dyn Fn(f64, f64) -> [f64; 3] + Send + Sync;
type CurveFn = dyn Fn(f64) -> [f64; 2] + Send + Sync;

/// A boundary chart: `(p, q) in [0, pi] x [0, 2 pi) -> s(p, q)` in space or
/// `t in [0, 2 pi) -> s(t)` in the plane.
#[derive(Clone)]
pub enum Chart {
    Surface(Arc<SurfaceFn>),
    Curve(Arc<CurveFn>),
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Chart::Surface(_) => f.write_str("Chart::Surface(..)"),
            Chart::Curve(_) => f.write_str("Chart::Curve(..)"),
        }
    }
}

/// A chart plus the sample grid used by node-wise sups.
///
/// Rigid motions are kept apart from the chart and applied after
/// differencing, so moving a surface far away does not cost accuracy in
/// its partials.
#[derive(Debug, Clone)]
pub struct SurfaceParametrization {
    chart: Chart,
    frame: Option<RigidMotion>,
    p_nodes: usize,
    q_nodes: usize,
}

const POLE_TOL: f64 = 1e-9;
const DEGENERATE: f64 = 1e-10;

fn rotate3(o: &Option<DMatrix<f64>>, v: [f64; 3]) -> [f64; 3] {
    match o {
        None => v,
        Some(m) => {
            let mut w = [0.0; 3];
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = (0..3).map(|j| m[(i, j)] * v[j]).sum();
            }
            w
        }
    }
}

fn rotate2(o: &Option<DMatrix<f64>>, v: [f64; 2]) -> [f64; 2] {
    match o {
        None => v,
        Some(m) => [
            m[(0, 0)] * v[0] + m[(0, 1)] * v[1],
            m[(1, 0)] * v[0] + m[(1, 1)] * v[1],
        ],
    }
}

fn unit_sphere_dir(p: f64, q: f64) -> [f64; 3] {
    let (sp, cp) = p.sin_cos();
    let (sq, cq) = q.sin_cos();
    [sp * cq, sp * sq, cp]
}

impl SurfaceParametrization {
    pub const DEFAULT_SURFACE_NODES: (usize, usize) = (129, 257);
    pub const DEFAULT_CURVE_NODES: usize = 4097;

    pub fn surface<F>(chart: F) -> Self
    where
        F: Fn(f64, f64) -> [f64; 3] + Send + Sync + 'static,
    {
        let (p_nodes, q_nodes) = Self::DEFAULT_SURFACE_NODES;
        Self {
            chart: Chart::Surface(Arc::new(chart)),
            frame: None,
            p_nodes,
            q_nodes,
        }
    }

    pub fn curve<F>(chart: F) -> Self
    where
        F: Fn(f64) -> [f64; 2] + Send + Sync + 'static,
    {
        Self {
            chart: Chart::Curve(Arc::new(chart)),
            frame: None,
            p_nodes: Self::DEFAULT_CURVE_NODES,
            q_nodes: 1,
        }
    }

    /// Override the sample grid (`q_nodes` is ignored for curves).
    pub fn with_nodes(mut self, p_nodes: usize, q_nodes: usize) -> Self {
        self.p_nodes = p_nodes.max(3);
        self.q_nodes = match self.chart {
            Chart::Surface(_) => q_nodes.max(3),
            Chart::Curve(_) => 1,
        };
        self
    }

    pub fn sphere(center: [f64; 3], radius: f64) -> Self {
        Self::surface(move |p, q| {
            let d = unit_sphere_dir(p, q);
            [center[0] + radius * d[0], center[1] + radius * d[1], center[2] + radius * d[2]]
        })
    }

    pub fn ellipsoid(center: [f64; 3], semi_axes: [f64; 3], orientation: Option<DMatrix<f64>>) -> Self {
        Self::surface(move |p, q| {
            let d = unit_sphere_dir(p, q);
            let u = rotate3(&orientation, [semi_axes[0] * d[0], semi_axes[1] * d[1], semi_axes[2] * d[2]]);
            [center[0] + u[0], center[1] + u[1], center[2] + u[2]]
        })
    }

    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Self::curve(move |t| [center[0] + radius * t.cos(), center[1] + radius * t.sin()])
    }

    /// Boundary chart of a smooth domain (polygons have none).
    pub fn from_domain(dom: &Domain) -> Result<Self> {
        let unsupported = || LabError::InvalidGeometry("polygon boundaries have no smooth chart".into());
        Ok(match dom.shape().clone() {
            Shape::Ball { center, radius } if center.len() == 3 => {
                Self::sphere([center[0], center[1], center[2]], radius)
            }
            Shape::Ball { center, radius } => Self::circle([center[0], center[1]], radius),
            Shape::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } if center.len() == 3 => Self::ellipsoid(
                [center[0], center[1], center[2]],
                [semi_axes[0], semi_axes[1], semi_axes[2]],
                orientation,
            ),
            Shape::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => Self::curve(move |t| {
                let u = rotate2(&orientation, [semi_axes[0] * t.cos(), semi_axes[1] * t.sin()]);
                [center[0] + u[0], center[1] + u[1]]
            }),
            Shape::StarShaped {
                center,
                radial,
                orientation,
            } if center.len() == 3 => Self::surface(move |p, q| {
                let d = unit_sphere_dir(p, q);
                let r = radial.radius(&d);
                let u = rotate3(&orientation, [r * d[0], r * d[1], r * d[2]]);
                [center[0] + u[0], center[1] + u[1], center[2] + u[2]]
            }),
            Shape::StarShaped {
                center,
                radial,
                orientation,
            } => Self::curve(move |t| {
                let d = [t.cos(), t.sin()];
                let r = radial.radius(&d);
                let u = rotate2(&orientation, [r * d[0], r * d[1]]);
                [center[0] + u[0], center[1] + u[1]]
            }),
            Shape::Polygon2D { .. } => return Err(unsupported()),
        })
    }

    /// The same surface moved by `sigma`.
    pub fn transformed(&self, sigma: &RigidMotion) -> Result<Self> {
        if sigma.dim() != self.dim() {
            return Err(LabError::DimensionMismatch {
                expected: self.dim(),
                got: sigma.dim(),
                context: "motion vs chart".into(),
            });
        }
        let frame = match &self.frame {
            Some(f) => sigma.compose(f),
            None => sigma.clone(),
        };
        Ok(Self {
            chart: self.chart.clone(),
            frame: Some(frame),
            p_nodes: self.p_nodes,
            q_nodes: self.q_nodes,
        })
    }

    pub fn dim(&self) -> usize {
        match self.chart {
            Chart::Surface(_) => 3,
            Chart::Curve(_) => 2,
        }
    }

    /// The body-frame chart, before any motion from [`Self::transformed`].
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Chart point; `q` is ignored for curves.
    pub fn point(&self, p: f64, q: f64) -> Vec<f64> {
        let x = match &self.chart {
            Chart::Surface(f) => f(p, q).to_vec(),
            Chart::Curve(f) => f(p).to_vec(),
        };
        match &self.frame {
            Some(m) => m.apply(&x),
            None => x,
        }
    }

    /// Sample nodes `(p, q)`: `p` spans `[0, pi]` inclusive and `q` spans
    /// `[0, 2 pi)`; for curves `t` spans `[0, 2 pi)` with `q = 0`.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        match self.chart {
            Chart::Surface(_) => {
                let mut out = Vec::with_capacity(self.p_nodes * self.q_nodes);
                for i in 0..self.p_nodes {
                    let p = PI * i as f64 / (self.p_nodes - 1) as f64;
                    for j in 0..self.q_nodes {
                        out.push((p, 2.0 * PI * j as f64 / self.q_nodes as f64));
                    }
                }
                out
            }
            Chart::Curve(_) => (0..self.p_nodes)
                .map(|i| (2.0 * PI * i as f64 / self.p_nodes as f64, 0.0))
                .collect(),
        }
    }

    /// Central-difference partials `(s_p, s_q)` with `h = 1e-5 * period`.
    pub fn partials(&self, p: f64, q: f64) -> ([f64; 3], [f64; 3]) {
        let (sp, sq) = self.chart_partials(p, q);
        match &self.frame {
            None => (sp, sq),
            Some(m) => {
                let d = self.dim();
                let turn = |v: [f64; 3]| {
                    let w = m.rotate(&v[..d]);
                    let mut out = [0.0; 3];
                    out[..d].copy_from_slice(&w);
                    out
                };
                (turn(sp), turn(sq))
            }
        }
    }

    fn chart_partials(&self, p: f64, q: f64) -> ([f64; 3], [f64; 3]) {
        match &self.chart {
            Chart::Surface(f) => {
                let hp = 1e-5 * PI;
                let hq = 1e-5 * 2.0 * PI;
                let (a, b) = (f(p + hp, q), f(p - hp, q));
                let (c, d) = (f(p, q + hq), f(p, q - hq));
                let mut sp = [0.0; 3];
                let mut sq = [0.0; 3];
                for k in 0..3 {
                    sp[k] = (a[k] - b[k]) / (2.0 * hp);
                    sq[k] = (c[k] - d[k]) / (2.0 * hq);
                }
                (sp, sq)
            }
            Chart::Curve(f) => {
                let h = 1e-5 * 2.0 * PI;
                let (a, b) = (f(p + h), f(p - h));
                ([(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h), 0.0], [0.0; 3])
            }
        }
    }

    /// Outward unit normal at `(p, q)`.
    ///
    /// Polar nodes of a spherical chart (`p = 0` or `p = pi`) are handled by
    /// the tangent plane spanned by `s_p` along two orthogonal meridians.
    pub fn normal(&self, p: f64, q: f64) -> Result<Vec<f64>> {
        match self.chart {
            Chart::Surface(_) => {
                let (sp, sq) = self.partials(p, q);
                let mut n = cross(sp, sq);
                let mut len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                if len < DEGENERATE {
                    let north = p.abs() < POLE_TOL;
                    let south = (p - PI).abs() < POLE_TOL;
                    if !(north || south) {
                        return Err(LabError::DegenerateChart { p, q, norm: len });
                    }
                    let (t1, _) = self.partials(p, q);
                    let (t2, _) = self.partials(p, q + PI / 2.0);
                    n = cross(t1, t2);
                    if south {
                        n = [-n[0], -n[1], -n[2]];
                    }
                    len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                    if len < DEGENERATE {
                        return Err(LabError::DegenerateChart { p, q, norm: len });
                    }
                }
                Ok(n.iter().map(|v| v / len).collect())
            }
            Chart::Curve(_) => {
                let (t, _) = self.partials(p, q);
                let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
                if len < DEGENERATE {
                    return Err(LabError::DegenerateChart { p, q, norm: len });
                }
                Ok(vec![t[1] / len, -t[0] / len])
            }
        }
    }

    /// Points and normals at every sample node.
    pub fn sample(&self) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        use rayon::prelude::*;
        self.nodes()
            .par_iter()
            .map(|&(p, q)| Ok((self.point(p, q), self.normal(p, q)?)))
            .collect()
    }
}

/// Outward unit normal of `surf` at chart coordinates `(p, q)`.
pub fn surface_normal(surf: &SurfaceParametrization, p: f64, q: f64) -> Result<Vec<f64>> {
    surf.normal(p, q)
}
