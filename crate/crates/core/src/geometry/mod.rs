//! Domains, the rigid-motion group acting on them, and parametrised
//! boundary surfaces with normals.

mod domain;
mod motion;
mod radial;
mod schema;
mod surface;

pub use domain::{Domain, Shape};
pub use motion::{random_motion, RigidMotion};
pub use radial::RadialFunction;
pub use schema::{DomainDocument, DomainSpec, RadialSpec, DOMAIN_SCHEMA_VERSION};
pub use surface::{surface_normal, Chart, SurfaceParametrization};

/// Unit-ball volume in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        5 => 8.0 * PI * PI / 15.0,
        _ => panic!("unit_ball_volume: unsupported dimension {n}"),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
