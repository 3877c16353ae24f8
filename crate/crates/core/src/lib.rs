//! Numerical laboratory for the Pompeiu problem.
//!
//! The crate evaluates Fourier transforms of indicator functions, searches
//! them for spherical zero sets, builds the nonzero fields whose integrals
//! vanish over every moved copy of a ball, solves the overdetermined
//! Helmholtz problem on balls, and tests boundary charts for sphericity.

pub mod acceptance;
pub mod chi_transform;
pub mod error;
pub mod geometry;
pub mod optimize;
pub mod overdetermined;
pub mod pompeiu_fields;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod symmetry;

pub use error::{LabError, Result};
pub use report::{Report, REPORT_SCHEMA};
pub use geometry::{random_motion, Domain, RadialFunction, RigidMotion, Shape, SurfaceParametrization};
pub use specfun::{bessel_j, bessel_zeros, spherical_j, BesselOrder, BesselZero};
