use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{Domain, RigidMotion, Shape};

const BINARY_MAGIC: &[u8; 4] = b"PGRD";
const BINARY_VERSION: u32 = 1;

/// A complex field that can be sampled in the plane. `None` means the
/// point is outside the region where the field is known.
pub trait PlanarField {
    fn sample(&self, x: f64, y: f64) -> Option<Complex64>;
}

impl<F: Fn(f64, f64) -> Complex64> PlanarField for F {
    fn sample(&self, x: f64, y: f64) -> Option<Complex64> {
        Some(self(x, y))
    }
}

/// Complex samples on a uniform rectangular lattice, node `(i, j)` at
/// `(x0 + i hx, y0 + j hy)`, stored row by row (`j` outer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarGrid {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Complex64>,
}

impl PlanarGrid {
    pub fn new(x0: f64, y0: f64, hx: f64, hy: f64, nx: usize, ny: usize, values: Vec<Complex64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(LabError::Domain("planar grid needs at least 2 x 2 nodes".into()));
        }
        if !(hx > 0.0 && hy > 0.0) || !x0.is_finite() || !y0.is_finite() {
            return Err(LabError::Domain("planar grid spacing must be positive".into()));
        }
        if values.len() != nx * ny {
            return Err(LabError::DimensionMismatch {
                expected: nx * ny,
                got: values.len(),
                context: "planar grid values".into(),
            });
        }
        Ok(Self { x0, y0, hx, hy, nx, ny, values })
    }

    /// Sample `f` on `[x_lo, x_hi] x [y_lo, y_hi]` with `nx x ny` nodes.
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(
        f: F,
        x_range: (f64, f64),
        y_range: (f64, f64),
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        if nx < 2 || ny < 2 || !(x_range.1 > x_range.0) || !(y_range.1 > y_range.0) {
            return Err(LabError::Domain("planar grid needs a non-empty box and 2 x 2 nodes".into()));
        }
        let hx = (x_range.1 - x_range.0) / (nx - 1) as f64;
        let hy = (y_range.1 - y_range.0) / (ny - 1) as f64;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(x_range.0 + i as f64 * hx, y_range.0 + j as f64 * hy));
            }
        }
        Self::new(x_range.0, y_range.0, hx, hy, nx, ny, values)
    }

    /// Square lattice of spacing `h` covering the box with one spare cell
    /// on every side.
    pub fn covering<F: Fn(f64, f64) -> Complex64>(f: F, lo: [f64; 2], hi: [f64; 2], h: f64) -> Result<Self> {
        let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 3;
        let ny = ((hi[1] - lo[1]) / h).ceil() as usize + 3;
        let x0 = lo[0] - h;
        let y0 = lo[1] - h;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(x0 + i as f64 * h, y0 + j as f64 * h));
            }
        }
        Self::new(x0, y0, h, h, nx, ny, values)
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.nx + i]
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy]
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + (self.nx - 1) as f64 * self.hx
    }

    pub fn y_max(&self) -> f64 {
        self.y0 + (self.ny - 1) as f64 * self.hy
    }

    /// Bilinear interpolation; `None` outside the lattice.
    pub fn interpolate(&self, x: f64, y: f64) -> Option<Complex64> {
        let u = (x - self.x0) / self.hx;
        let v = (y - self.y0) / self.hy;
        let slack = 1e-9;
        let (umax, vmax) = ((self.nx - 1) as f64, (self.ny - 1) as f64);
        if !(u >= -slack && v >= -slack && u <= umax + slack && v <= vmax + slack) {
            return None;
        }
        let u = u.clamp(0.0, umax);
        let v = v.clamp(0.0, vmax);
        let i = (u.floor() as usize).min(self.nx - 2);
        let j = (v.floor() as usize).min(self.ny - 2);
        let (s, t) = (u - i as f64, v - j as f64);
        Some(
            self.at(i, j) * ((1.0 - s) * (1.0 - t))
                + self.at(i + 1, j) * (s * (1.0 - t))
                + self.at(i, j + 1) * ((1.0 - s) * t)
                + self.at(i + 1, j + 1) * (s * t),
        )
    }

    /// CSV with header `x,y,re,im`, one row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,re,im\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                let [x, y] = self.node(i, j);
                let v = self.at(i, j);
                let _ = writeln!(out, "{x:e},{y:e},{:e},{:e}", v.re, v.im);
            }
        }
        out
    }

    /// Parse `x,y,re,im` rows of a complete rectangular lattice in any order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| LabError::Parse("empty grid file".into()))?;
        let cols: Vec<String> = header.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
        if cols != ["x", "y", "re", "im"] {
            return Err(LabError::Parse(format!("expected header x,y,re,im, got {header:?}")));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let f: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| LabError::Parse(format!("row {}: {e}", n + 2)))?;
            if f.len() != 4 {
                return Err(LabError::Parse(format!("row {} has {} fields, expected 4", n + 2, f.len())));
            }
            rows.push([f[0], f[1], f[2], f[3]]);
        }
        let axis = |k: usize| -> Result<(f64, f64, usize)> {
            let mut v: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            if v.len() < 2 {
                return Err(LabError::Parse("grid needs at least two distinct values per axis".into()));
            }
            let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
            for (i, w) in v.iter().enumerate() {
                if (w - (v[0] + i as f64 * h)).abs() > 1e-9 * h.max(w.abs()) {
                    return Err(LabError::Parse("grid spacing is not uniform".into()));
                }
            }
            Ok((v[0], h, v.len()))
        };
        let (x0, hx, nx) = axis(0)?;
        let (y0, hy, ny) = axis(1)?;
        if rows.len() != nx * ny {
            return Err(LabError::Parse(format!(
                "{} rows do not fill a {nx} x {ny} lattice",
                rows.len()
            )));
        }
        let mut values = vec![None; nx * ny];
        for r in &rows {
            let i = ((r[0] - x0) / hx).round() as usize;
            let j = ((r[1] - y0) / hy).round() as usize;
            if values[j * nx + i].replace(Complex64::new(r[2], r[3])).is_some() {
                return Err(LabError::Parse(format!("duplicate node ({}, {})", r[0], r[1])));
            }
        }
        let values: Vec<Complex64> = values.into_iter().map(|v| v.expect("all nodes filled")).collect();
        Self::new(x0, y0, hx, hy, nx, ny, values)
    }

    /// Binary layout, little endian: magic `PGRD`, `u32` version, `u64 nx`,
    /// `u64 ny`, `f64 x0, y0, hx, hy`, then `nx * ny` pairs `f64 re, im`
    /// row by row.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(56 + 16 * self.values.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.nx as u64).to_le_bytes());
        out.extend_from_slice(&(self.ny as u64).to_le_bytes());
        for v in [self.x0, self.y0, self.hx, self.hy] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| LabError::Parse(format!("binary grid: {m}"));
        if bytes.len() < 56 || &bytes[..4] != BINARY_MAGIC {
            return Err(bad("missing PGRD header"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        if u32_at(4) != BINARY_VERSION {
            return Err(bad(&format!("unsupported version {}", u32_at(4))));
        }
        let (nx, ny) = (u64_at(8) as usize, u64_at(16) as usize);
        let count = nx.checked_mul(ny).ok_or_else(|| bad("size overflow"))?;
        if bytes.len() != 56 + 16 * count {
            return Err(bad("length does not match nx * ny"));
        }
        let values = (0..count)
            .map(|k| Complex64::new(f64_at(56 + 16 * k), f64_at(64 + 16 * k)))
            .collect();
        Self::new(f64_at(24), f64_at(32), f64_at(40), f64_at(48), nx, ny, values)
    }

    /// Central-difference `(f_x + i f_y) / 2` at an interior node.
    pub fn dbar_at(&self, i: usize, j: usize) -> Complex64 {
        let fx = (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * self.hx);
        let fy = (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * self.hy);
        (fx + Complex64::new(0.0, 1.0) * fy) / 2.0
    }

    fn interior_nodes_in<'a>(&'a self, region: &'a Domain) -> impl Iterator<Item = (usize, usize)> + 'a {
        (1..self.ny - 1)
            .flat_map(move |j| (1..self.nx - 1).map(move |i| (i, j)))
            .filter(move |&(i, j)| region.contains(&self.node(i, j)))
    }
}

impl PlanarField for PlanarGrid {
    fn sample(&self, x: f64, y: f64) -> Option<Complex64> {
        self.interpolate(x, y)
    }
}

fn sample_or_coverage<F: PlanarField + ?Sized>(f: &F, x: f64, y: f64) -> Result<Complex64> {
    f.sample(x, y).ok_or(LabError::Coverage { x, y })
}

/// `oint_{d sigma(D)} f dz` by the composite trapezoid rule: `node_count`
/// nodes in total on a circle, per edge on a polygon.
pub fn morera_contour<F: PlanarField + ?Sized>(
    field: &F,
    dom2d: &Domain,
    sigma: &RigidMotion,
    node_count: usize,
) -> Result<Complex64> {
    if dom2d.dim() != 2 {
        return Err(LabError::DimensionMismatch {
            expected: 2,
            got: dom2d.dim(),
            context: "contour domain".into(),
        });
    }
    let moved = dom2d.apply_motion(sigma)?;
    match moved.shape() {
        Shape::Ball { center, radius } => {
            if node_count < 3 {
                return Err(LabError::Domain("circle contour needs at least 3 nodes".into()));
            }
            let dt = 2.0 * PI / node_count as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..node_count {
                let e = Complex64::from_polar(*radius, k as f64 * dt);
                let f = sample_or_coverage(field, center[0] + e.re, center[1] + e.im)?;
                sum += f * Complex64::new(0.0, 1.0) * e;
            }
            Ok(sum * dt)
        }
        Shape::Polygon2D { vertices } => {
            if node_count < 2 {
                return Err(LabError::Domain("polygon edges need at least 2 nodes".into()));
            }
            let mut sum = Complex64::new(0.0, 0.0);
            let n = vertices.len();
            for e in 0..n {
                let (a, b) = (vertices[e], vertices[(e + 1) % n]);
                let dz = Complex64::new(b[0] - a[0], b[1] - a[1]);
                let dt = 1.0 / (node_count - 1) as f64;
                let mut edge = Complex64::new(0.0, 0.0);
                for k in 0..node_count {
                    let t = k as f64 * dt;
                    let w = if k == 0 || k == node_count - 1 { 0.5 } else { 1.0 };
                    edge += sample_or_coverage(field, a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))? * w;
                }
                sum += edge * dt * dz;
            }
            Ok(sum)
        }
        _ => Err(LabError::InvalidGeometry(
            "contour integrals are defined for discs and polygons".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoreraResult {
    pub value: Complex64,
    pub nodes: usize,
    /// `|I(nodes) - I(nodes / 2)|`.
    pub difference: f64,
    pub converged: bool,
}

/// Double the node count from 16 until two successive contour integrals
/// differ by less than `tol`, or `max_nodes` is reached.
pub fn morera_adaptive<F: PlanarField + ?Sized>(
    field: &F,
    dom2d: &Domain,
    sigma: &RigidMotion,
    tol: f64,
    max_nodes: usize,
) -> Result<MoreraResult> {
    let mut nodes = 16;
    let mut prev = morera_contour(field, dom2d, sigma, nodes)?;
    loop {
        let next_nodes = if matches!(dom2d.shape(), Shape::Polygon2D { .. }) { 2 * nodes - 1 } else { 2 * nodes };
        if next_nodes > max_nodes {
            return Ok(MoreraResult { value: prev, nodes, difference: f64::INFINITY, converged: false });
        }
        let cur = morera_contour(field, dom2d, sigma, next_nodes)?;
        let difference = (cur - prev).norm();
        nodes = next_nodes;
        if difference < tol {
            return Ok(MoreraResult { value: cur, nodes, difference, converged: true });
        }
        prev = cur;
    }
}

/// `sup |(f_x + i f_y) / 2|` over interior lattice nodes inside `region`,
/// with central differences.
pub fn wirtinger_residual(grid: &PlanarGrid, region: &Domain) -> f64 {
    grid.interior_nodes_in(region)
        .map(|(i, j)| grid.dbar_at(i, j).norm())
        .fold(0.0, f64::max)
}

/// `2i int_region dbar f`, summed over interior nodes; the area side of the
/// Green identity matching [`morera_contour`]. First order in `h` because
/// of the staircase boundary.
pub fn dbar_integral(grid: &PlanarGrid, region: &Domain) -> Complex64 {
    let cell = grid.hx * grid.hy;
    let s: Complex64 = grid.interior_nodes_in(region).map(|(i, j)| grid.dbar_at(i, j)).sum();
    Complex64::new(0.0, 2.0) * s * cell
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conj_z(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, -y)
    }

    #[test]
    fn cauchy_on_analytic_field() {
        let disc = Domain::ball(&[0.0, 0.0], 1.0).unwrap();
        let z2 = |x: f64, y: f64| Complex64::new(x, y).powi(2);
        let v = morera_contour(&z2, &disc, &RigidMotion::identity(2), 4096).unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn green_identity_for_conjugate() {
        let disc = Domain::ball(&[0.0, 0.0], 1.0).unwrap();
        let grid = PlanarGrid::from_fn(conj_z, (-1.5, 1.5), (-1.5, 1.5), 61, 61).unwrap();
        let v = morera_contour(&grid, &disc, &RigidMotion::identity(2), 512).unwrap();
        assert!((v - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-8);
        let square = Domain::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let v = morera_contour(&grid, &square, &RigidMotion::identity(2), 9).unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-10);
        assert!((wirtinger_residual(&grid, &square) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_field_has_half_residual() {
        let grid = PlanarGrid::from_fn(|x, _| Complex64::new(x, 0.0), (-1.0, 1.0), (-1.0, 1.0), 21, 21).unwrap();
        let square = Domain::polygon(&[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).unwrap();
        assert!((wirtinger_residual(&grid, &square) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn contour_matches_area_side() {
        // f = conj(z)^2, dbar f = 2 conj(z); moved disc of radius 0.7
        let f = |x: f64, y: f64| Complex64::new(x, -y).powi(2);
        let disc = Domain::ball(&[0.0, 0.0], 0.7).unwrap();
        let sigma = RigidMotion::translation_by(&[0.3, 0.2]);
        let contour = morera_contour(&f, &disc, &sigma, 256).unwrap();
        let exact = Complex64::new(0.0, 4.0 * PI * 0.49) * Complex64::new(0.3, -0.2);
        assert!((contour - exact).norm() < 1e-12);
        let moved = disc.apply_motion(&sigma).unwrap();
        let grid = PlanarGrid::covering(f, [-0.5, -0.6], [1.1, 1.0], 2e-3).unwrap();
        let area = dbar_integral(&grid, &moved);
        assert!((area - exact).norm() < 2e-2 * exact.norm(), "{area} vs {exact}");
    }

    #[test]
    fn coverage_error_outside_grid() {
        let grid = PlanarGrid::from_fn(conj_z, (-0.5, 0.5), (-0.5, 0.5), 11, 11).unwrap();
        let disc = Domain::ball(&[0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            morera_contour(&grid, &disc, &RigidMotion::identity(2), 64),
            Err(LabError::Coverage { .. })
        ));
    }

    #[test]
    fn adaptive_doubling_converges() {
        let f = |x: f64, y: f64| Complex64::new(x, -y).exp();
        let disc = Domain::ball(&[0.0, 0.0], 1.0).unwrap();
        let r = morera_adaptive(&f, &disc, &RigidMotion::identity(2), 1e-12, 1 << 16).unwrap();
        assert!(r.converged);
        // dbar exp(conj z) = exp(conj z); int over the unit disc is pi
        assert!((r.value - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-11);
    }

    #[test]
    fn csv_and_binary_round_trip() {
        let grid = PlanarGrid::from_fn(|x, y| Complex64::new(x * y, x - y), (-1.0, 2.0), (0.5, 1.5), 7, 5).unwrap();
        let back = PlanarGrid::from_csv(&grid.to_csv()).unwrap();
        assert_eq!(back.nx, 7);
        assert_eq!(back.ny, 5);
        for (a, b) in grid.values.iter().zip(&back.values) {
            assert_eq!(a, b);
        }
        assert_eq!(PlanarGrid::from_bytes(&grid.to_bytes()).unwrap(), grid);
        assert!(PlanarGrid::from_bytes(b"nope").is_err());
        assert!(PlanarGrid::from_csv("x,y,re,im\n0,0,1,1\n1,0,1,1\n0,1,1,1\n").is_err());
    }
}
