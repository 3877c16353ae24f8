//! JSON form of [`Domain`]:
//!
//! ```json
//! {"version": 1, "kind": "ball", "center": [0, 0, 0], "radius": 1}
//! {"version": 1, "kind": "ellipsoid", "center": [0, 0], "semi_axes": [1, 1.5],
//!  "orientation": [[1, 0], [0, 1]]}
//! {"version": 1, "kind": "polygon2d", "vertices": [[0, 0], [1, 0], [1, 1]]}
//! {"version": 1, "kind": "star", "center": [0, 0, 0],
//!  "radial": {"mode": "harmonics", "coefficients": [3.5449]}}
//! ```
//!
//! `version` defaults to 1 and `orientation` (row-major rows) is optional.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Domain, RadialFunction, Shape};
use crate::error::LabError;

pub const DOMAIN_SCHEMA_VERSION: u32 = 1;

fn default_version() -> u32 {
    DOMAIN_SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum RadialSpec {
    Harmonics { coefficients: Vec<f64> },
    Table { values: Vec<f64>, n_theta: usize, n_phi: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        orientation: Option<Vec<Vec<f64>>>,
    },
    Polygon2d {
        vertices: Vec<[f64; 2]>,
    },
    Star {
        center: Vec<f64>,
        radial: RadialSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        orientation: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainDocument {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(flatten)]
    pub spec: DomainSpec,
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, LabError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(LabError::Parse("orientation must be a square matrix".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl TryFrom<DomainDocument> for Domain {
    type Error = LabError;

    fn try_from(doc: DomainDocument) -> Result<Self, LabError> {
        if doc.version != DOMAIN_SCHEMA_VERSION {
            return Err(LabError::Parse(format!(
                "unsupported domain schema version {}",
                doc.version
            )));
        }
        let shape = match doc.spec {
            DomainSpec::Ball { center, radius } => Shape::Ball { center, radius },
            DomainSpec::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => Shape::Ellipsoid {
                center,
                semi_axes,
                orientation: orientation.as_deref().map(matrix_from_rows).transpose()?,
            },
            DomainSpec::Polygon2d { vertices } => Shape::Polygon2D { vertices },
            DomainSpec::Star {
                center,
                radial,
                orientation,
            } => Shape::StarShaped {
                center,
                radial: match radial {
                    RadialSpec::Harmonics { coefficients } => RadialFunction::Harmonics { coefficients },
                    RadialSpec::Table {
                        values,
                        n_theta,
                        n_phi,
                    } => RadialFunction::Table {
                        values,
                        n_theta,
                        n_phi,
                    },
                },
                orientation: orientation.as_deref().map(matrix_from_rows).transpose()?,
            },
        };
        Domain::new(shape)
    }
}

impl From<&Domain> for DomainDocument {
    fn from(d: &Domain) -> Self {
        let spec = match d.shape().clone() {
            Shape::Ball { center, radius } => DomainSpec::Ball { center, radius },
            Shape::Ellipsoid {
                center,
                semi_axes,
                orientation,
            } => DomainSpec::Ellipsoid {
                center,
                semi_axes,
                orientation: orientation.as_ref().map(rows_from_matrix),
            },
            Shape::Polygon2D { vertices } => DomainSpec::Polygon2d { vertices },
            Shape::StarShaped {
                center,
                radial,
                orientation,
            } => DomainSpec::Star {
                center,
                radial: match radial {
                    RadialFunction::Harmonics { coefficients } => RadialSpec::Harmonics { coefficients },
                    RadialFunction::Table {
                        values,
                        n_theta,
                        n_phi,
                    } => RadialSpec::Table {
                        values,
                        n_theta,
                        n_phi,
                    },
                },
                orientation: orientation.as_ref().map(rows_from_matrix),
            },
        };
        DomainDocument {
            version: DOMAIN_SCHEMA_VERSION,
            spec,
        }
    }
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DomainDocument::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = DomainDocument::deserialize(d)?;
        Domain::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl Domain {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain serialisation is infallible")
    }
}
