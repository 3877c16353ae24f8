use nalgebra::DMatrix;

use super::{norm, unit_ball_volume, RadialFunction, RigidMotion};
use crate::error::{LabError, Result};
use crate::quadrature::{circle_rule, SphereRule};

/// Geometry of a bounded domain. Construct through [`Domain`], which
/// validates the invariants.
///
/// `orientation` maps body coordinates to world coordinates:
/// `x = center + O u`. `None` means axis-aligned.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
        orientation: Option<DMatrix<f64>>,
    },
    Polygon2D {
        vertices: Vec<[f64; 2]>,
    },
    StarShaped {
        center: Vec<f64>,
        radial: RadialFunction,
        orientation: Option<DMatrix<f64>>,
    },
}

/// A validated bounded domain in the plane or in space.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    shape: Shape,
}

fn check_dim(n: usize) -> Result<()> {
    if (2..=3).contains(&n) {
        Ok(())
    } else {
        Err(LabError::InvalidGeometry(format!("ambient dimension must be 2 or 3, got {n}")))
    }
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LabError::InvalidGeometry(format!("{what} has non-finite entries")))
    }
}

fn check_orientation(o: &Option<DMatrix<f64>>, n: usize) -> Result<()> {
    if let Some(m) = o {
        if m.nrows() != n {
            return Err(LabError::DimensionMismatch {
                expected: n,
                got: m.nrows(),
                context: "orientation matrix".into(),
            });
        }
        RigidMotion::new(m.clone(), nalgebra::DVector::zeros(n))?;
    }
    Ok(())
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

impl Domain {
    pub fn new(shape: Shape) -> Result<Self> {
        match &shape {
            Shape::Ball { center, radius } => {
                check_dim(center.len())?;
                check_finite(center, "center")?;
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(LabError::InvalidGeometry(format!("ball radius must be > 0, got {radius}")));
                }
            }
            Shape::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => {
                check_dim(center.len())?;
                check_finite(center, "center")?;
                if semi_axes.len() != center.len() {
                    return Err(LabError::DimensionMismatch {
                        expected: center.len(),
                        got: semi_axes.len(),
                        context: "ellipsoid semi-axes".into(),
                    });
                }
                if semi_axes.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                    return Err(LabError::InvalidGeometry("semi-axes must all be > 0".into()));
                }
                check_orientation(orientation, center.len())?;
            }
            Shape::Polygon2D { vertices } => {
                if vertices.len() < 3 {
                    return Err(LabError::InvalidGeometry("polygon needs at least 3 vertices".into()));
                }
                for v in vertices {
                    check_finite(v, "vertex")?;
                }
                let n = vertices.len();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        if segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]) {
                            return Err(LabError::InvalidGeometry(format!(
                                "polygon edges {i} and {j} intersect"
                            )));
                        }
                    }
                }
                if shoelace(vertices) <= 0.0 {
                    return Err(LabError::InvalidGeometry(
                        "polygon must be positively (counter-clockwise) oriented".into(),
                    ));
                }
            }
            Shape::StarShaped {
                center,
                radial,
                orientation,
            } => {
                check_dim(center.len())?;
                check_finite(center, "center")?;
                radial.validate(center.len())?;
                check_orientation(orientation, center.len())?;
            }
        }
        Ok(Self { shape })
    }

    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        Self::new(Shape::Ball {
            center: center.to_vec(),
            radius,
        })
    }

    /// Axis-aligned ellipsoid centred at the origin.
    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        Self::new(Shape::Ellipsoid {
            center: vec![0.0; semi_axes.len()],
            semi_axes: semi_axes.to_vec(),
            orientation: None,
        })
    }

    pub fn polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        Self::new(Shape::Polygon2D {
            vertices: vertices.to_vec(),
        })
    }

    pub fn star(center: &[f64], radial: RadialFunction) -> Result<Self> {
        Self::new(Shape::StarShaped {
            center: center.to_vec(),
            radial,
            orientation: None,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ball { center, .. } | Shape::Ellipsoid { center, .. } | Shape::StarShaped { center, .. } => {
                center.len()
            }
            Shape::Polygon2D { .. } => 2,
        }
    }

    /// A reference point inside the domain.
    pub fn center(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { center, .. } | Shape::Ellipsoid { center, .. } | Shape::StarShaped { center, .. } => {
                center.clone()
            }
            Shape::Polygon2D { vertices } => {
                // area centroid
                let n = vertices.len();
                let a = shoelace(vertices);
                let (mut cx, mut cy) = (0.0, 0.0);
                for i in 0..n {
                    let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                    let w = p[0] * q[1] - q[0] * p[1];
                    cx += (p[0] + q[0]) * w;
                    cy += (p[1] + q[1]) * w;
                }
                vec![cx / (6.0 * a), cy / (6.0 * a)]
            }
        }
    }

    /// Body coordinates `O^T (x - c)`, stored in the first `n` slots.
    fn to_body(center: &[f64], orientation: &Option<DMatrix<f64>>, x: &[f64]) -> [f64; 3] {
        let n = center.len();
        let mut d = [0.0; 3];
        for k in 0..n {
            d[k] = x[k] - center[k];
        }
        match orientation {
            None => d,
            Some(o) => {
                let mut u = [0.0; 3];
                for (i, ui) in u.iter_mut().enumerate().take(n) {
                    *ui = (0..n).map(|j| o[(j, i)] * d[j]).sum();
                }
                u
            }
        }
    }

    /// 1 strictly inside, 0 outside; boundary points may go either way.
    pub fn indicator(&self, x: &[f64]) -> u8 {
        u8::from(self.contains(x))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < radius * radius
            }
            Shape::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => {
                let u = Self::to_body(center, orientation, x);
                u.iter().zip(semi_axes).map(|(v, a)| (v / a) * (v / a)).sum::<f64>() < 1.0
            }
            Shape::Polygon2D { vertices } => {
                // even-odd crossing test
                let n = vertices.len();
                let mut inside = false;
                let mut j = n - 1;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[j]);
                    if (a[1] > x[1]) != (b[1] > x[1]) {
                        let xc = (b[0] - a[0]) * (x[1] - a[1]) / (b[1] - a[1]) + a[0];
                        if x[0] < xc {
                            inside = !inside;
                        }
                    }
                    j = i;
                }
                inside
            }
            Shape::StarShaped {
                center,
                radial,
                orientation,
            } => {
                let n = center.len();
                let u = Self::to_body(center, orientation, x);
                let r = norm(&u[..n]);
                if r == 0.0 {
                    return true;
                }
                let dir: Vec<f64> = u[..n].iter().map(|v| v / r).collect();
                r < radial.radius(&dir)
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
            Shape::Ellipsoid { semi_axes, .. } => {
                unit_ball_volume(semi_axes.len()) * semi_axes.iter().product::<f64>()
            }
            Shape::Polygon2D { vertices } => shoelace(vertices),
            Shape::StarShaped { center, radial, .. } => {
                if center.len() == 3 {
                    let rule = SphereRule::new(64, 128);
                    rule.points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(d, w)| w * radial.radius(d).powi(3) / 3.0)
                        .sum()
                } else {
                    circle_rule(1024)
                        .map(|(d, w)| w * radial.radius(&d).powi(2) / 2.0)
                        .sum()
                }
            }
        }
    }

    /// Radius along a world-frame unit direction from [`Domain::center`],
    /// for domains that are star-shaped about their centre.
    pub fn boundary_radius(&self, world_dir: &[f64]) -> Option<f64> {
        match &self.shape {
            Shape::Ball { radius, .. } => Some(*radius),
            Shape::Ellipsoid {
                semi_axes,
                orientation,
                ..
            } => {
                let zero = vec![0.0; semi_axes.len()];
                let u = Self::to_body(&zero, orientation, world_dir);
                let s: f64 = u.iter().zip(semi_axes).map(|(v, a)| (v / a) * (v / a)).sum();
                Some(1.0 / s.sqrt())
            }
            Shape::StarShaped {
                radial, orientation, ..
            } => {
                let n = world_dir.len();
                let zero = vec![0.0; n];
                let u = Self::to_body(&zero, orientation, world_dir);
                Some(radial.radius(&u[..n]))
            }
            Shape::Polygon2D { .. } => None,
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Shape::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => {
                let half: Vec<f64> = (0..center.len())
                    .map(|i| match orientation {
                        None => semi_axes[i],
                        Some(o) => (0..center.len())
                            .map(|j| (o[(i, j)] * semi_axes[j]).powi(2))
                            .sum::<f64>()
                            .sqrt(),
                    })
                    .collect();
                (
                    center.iter().zip(&half).map(|(c, h)| c - h).collect(),
                    center.iter().zip(&half).map(|(c, h)| c + h).collect(),
                )
            }
            Shape::Polygon2D { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
            Shape::StarShaped { center, radial, .. } => {
                let r = radial.max_radius_bound(center.len());
                (
                    center.iter().map(|c| c - r).collect(),
                    center.iter().map(|c| c + r).collect(),
                )
            }
        }
    }

    pub fn diameter_bound(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        let d: Vec<f64> = hi.iter().zip(&lo).map(|(a, b)| a - b).collect();
        norm(&d)
    }

    /// Image of the domain under `sigma`.
    pub fn apply_motion(&self, sigma: &RigidMotion) -> Result<Domain> {
        if sigma.dim() != self.dim() {
            return Err(LabError::DimensionMismatch {
                expected: self.dim(),
                got: sigma.dim(),
                context: "rigid motion vs domain".into(),
            });
        }
        let compose = |o: &Option<DMatrix<f64>>| -> Option<DMatrix<f64>> {
            let r = sigma.rotation().clone();
            let is_identity = (&r - DMatrix::identity(r.nrows(), r.nrows())).amax() == 0.0;
            match o {
                None if is_identity => None,
                None => Some(r),
                Some(m) => Some(r * m),
            }
        };
        let shape = match &self.shape {
            Shape::Ball { center, radius } => Shape::Ball {
                center: sigma.apply(center),
                radius: *radius,
            },
            Shape::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => Shape::Ellipsoid {
                center: sigma.apply(center),
                semi_axes: semi_axes.clone(),
                orientation: compose(orientation),
            },
            Shape::Polygon2D { vertices } => Shape::Polygon2D {
                vertices: vertices
                    .iter()
                    .map(|v| {
                        let w = sigma.apply(v);
                        [w[0], w[1]]
                    })
                    .collect(),
            },
            Shape::StarShaped {
                center,
                radial,
                orientation,
            } => Shape::StarShaped {
                center: sigma.apply(center),
                radial: radial.clone(),
                orientation: compose(orientation),
            },
        };
        Ok(Domain { shape })
    }

    /// Orientation matrix, if any (identity when `None`).
    pub fn orientation(&self) -> Option<&DMatrix<f64>> {
        match &self.shape {
            Shape::Ellipsoid { orientation, .. } | Shape::StarShaped { orientation, .. } => orientation.as_ref(),
            _ => None,
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_motion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_square() -> Domain {
        Domain::polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn indicator_examples() {
        let b = Domain::ball(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.indicator(&[0.0, 0.0, 0.0]), 1);
        assert_eq!(b.indicator(&[2.0, 0.0, 0.0]), 0);
        assert_eq!(unit_square().indicator(&[0.5, 0.5]), 1);
        assert_eq!(unit_square().indicator(&[1.5, 0.5]), 0);
    }

    #[test]
    fn volume_examples() {
        let b = Domain::ball(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.volume(), 4.0 * PI / 3.0);
        let e = Domain::ellipsoid(&[1.0, 2.0, 3.0]).unwrap();
        assert!((e.volume() - 8.0 * PI).abs() < 1e-14);
        let s = Domain::star(&[0.0, 0.0, 0.0], RadialFunction::constant(3, 1.0)).unwrap();
        assert!((s.volume() - 4.0 * PI / 3.0).abs() < 1e-10);
        let s2 = Domain::star(&[1.0, 1.0], RadialFunction::constant(2, 2.0)).unwrap();
        assert!((s2.volume() - 4.0 * PI).abs() < 1e-12);
        assert_eq!(unit_square().volume(), 1.0);
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(Domain::ball(&[0.0, 0.0], 0.0).is_err());
        assert!(Domain::ball(&[0.0], 1.0).is_err());
        assert!(Domain::ellipsoid(&[1.0, -2.0]).is_err());
        // clockwise square
        assert!(Domain::polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
        // bow-tie
        assert!(Domain::polygon(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Domain::polygon(&[[0.0, 0.0], [1.0, 1.0]]).is_err());
        // radius dips negative
        let r = RadialFunction::Harmonics {
            coefficients: vec![0.1, 0.0, 0.0, 2.0],
        };
        assert!(Domain::star(&[0.0; 3], r).is_err());
    }

    #[test]
    fn translation_moves_ball() {
        let b = Domain::ball(&[0.0, 0.0, 0.0], 1.5).unwrap();
        let m = RigidMotion::translation_by(&[1.0, 2.0, 3.0]);
        assert_eq!(b.apply_motion(&m).unwrap(), Domain::ball(&[1.0, 2.0, 3.0], 1.5).unwrap());
        assert_eq!(b.apply_motion(&RigidMotion::identity(3)).unwrap(), b);
    }

    #[test]
    fn rotated_star_matches_pullback_indicator() {
        let radial = RadialFunction::Harmonics {
            coefficients: vec![2.0 * PI.sqrt(), 0.1, -0.2, 0.15, 0.05, 0.0, 0.1, 0.0, -0.08],
        };
        let star = Domain::star(&[0.2, -0.1, 0.3], radial).unwrap();
        let sigma = random_motion(11, 1.0, 3).unwrap();
        let moved = star.apply_motion(&sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.5..2.5)).collect();
            assert_eq!(moved.indicator(&x), star.indicator(&sigma.apply_inverse(&x)));
        }
        assert!((moved.volume() - star.volume()).abs() < 1e-10);
    }

    #[test]
    fn rotated_polygon_and_ellipsoid_keep_volume() {
        let sigma = RigidMotion::planar_rotation(0.7).compose(&RigidMotion::translation_by(&[1.0, -2.0]));
        let p = unit_square().apply_motion(&sigma).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-14);
        let e = Domain::ellipsoid(&[1.0, 1.5]).unwrap().apply_motion(&sigma).unwrap();
        assert!((e.volume() - 1.5 * PI).abs() < 1e-14);
        let (lo, hi) = e.bounding_box();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            if e.contains(&x) {
                assert!(x[0] >= lo[0] && x[0] <= hi[0] && x[1] >= lo[1] && x[1] <= hi[1]);
            }
        }
    }

    #[test]
    fn motions_compose_on_indicators() {
        let d = Domain::new(Shape::Ellipsoid {
            center: vec![0.5, 0.0, -0.2],
            semi_axes: vec![1.0, 0.6, 1.3],
            orientation: None,
        })
        .unwrap();
        let s1 = random_motion(21, 2.0, 3).unwrap();
        let s2 = random_motion(22, 2.0, 3).unwrap();
        let twice = d.apply_motion(&s1).unwrap().apply_motion(&s2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let pulled = s1.apply_inverse(&s2.apply_inverse(&x));
            assert_eq!(twice.indicator(&x), d.indicator(&pulled));
        }
    }
}
