use nalgebra::{DMatrix, DVector, UnitQuaternion, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

/// A proper rigid motion `x -> R x + t` of the plane or space.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidMotion {
    rotation: DMatrix<f64>,
    translation: DVector<f64>,
}

impl RigidMotion {
    /// Validates orthonormality and `det R = +1` to 1e-12.
    pub fn new(rotation: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = rotation.nrows();
        if !(2..=3).contains(&n) || rotation.ncols() != n {
            return Err(LabError::InvalidGeometry(format!(
                "rotation must be 2x2 or 3x3, got {}x{}",
                rotation.nrows(),
                rotation.ncols()
            )));
        }
        if translation.len() != n {
            return Err(LabError::DimensionMismatch {
                expected: n,
                got: translation.len(),
                context: "motion translation".into(),
            });
        }
        let defect = (rotation.transpose() * &rotation - DMatrix::identity(n, n)).amax();
        if defect > 1e-12 {
            return Err(LabError::InvalidGeometry(format!(
                "rotation is not orthonormal (max |R^T R - I| = {defect:e})"
            )));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidGeometry(format!("rotation has det {det}")));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rotation: DMatrix::identity(n, n),
            translation: DVector::zeros(n),
        }
    }

    pub fn translation_by(t: &[f64]) -> Self {
        Self {
            rotation: DMatrix::identity(t.len(), t.len()),
            translation: DVector::from_column_slice(t),
        }
    }

    /// Planar rotation by `angle` about the origin.
    pub fn planar_rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            rotation: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
            translation: DVector::zeros(2),
        }
    }

    /// Spatial rotation about `axis` by `angle`.
    pub fn axis_rotation(axis: [f64; 3], angle: f64) -> Self {
        let axis = nalgebra::Unit::new_normalize(nalgebra::Vector3::from(axis));
        let q = UnitQuaternion::from_axis_angle(&axis, angle);
        Self::from_quaternion(q, [0.0; 3])
    }

    fn from_quaternion(q: UnitQuaternion<f64>, t: [f64; 3]) -> Self {
        let m = q.to_rotation_matrix();
        Self {
            rotation: DMatrix::from_fn(3, 3, |i, j| m[(i, j)]),
            translation: DVector::from_column_slice(&t),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.rotation[(i, j)] * x[j]).sum::<f64>() + self.translation[i])
            .collect()
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.rotation[(j, i)] * (x[j] - self.translation[j]))
                    .sum::<f64>()
            })
            .collect()
    }

    /// Rotate a free vector (no translation).
    pub fn rotate(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.rotation[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn rotate_inverse(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.rotation[(j, i)] * v[j]).sum())
            .collect()
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        let t = -(&rt * &self.translation);
        Self {
            rotation: rt,
            translation: t,
        }
    }

    /// `self` after `first`: `x -> self(first(x))`.
    pub fn compose(&self, first: &RigidMotion) -> Self {
        Self {
            rotation: &self.rotation * &first.rotation,
            translation: &self.rotation * &first.translation + &self.translation,
        }
    }

    /// Max entry of `|R^T R - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        (self.rotation.transpose() * &self.rotation - DMatrix::identity(n, n)).amax()
    }
}

#[derive(Serialize, Deserialize)]
struct MotionRepr {
    /// Rows of the rotation matrix.
    rotation: Vec<Vec<f64>>,
    translation: Vec<f64>,
}

impl Serialize for RigidMotion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        MotionRepr {
            rotation: (0..n).map(|i| (0..n).map(|j| self.rotation[(i, j)]).collect()).collect(),
            translation: self.translation.iter().copied().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RigidMotion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MotionRepr::deserialize(d)?;
        let n = r.rotation.len();
        if r.rotation.iter().any(|row| row.len() != n) {
            return Err(serde::de::Error::custom("rotation must be square"));
        }
        let rotation = DMatrix::from_row_iterator(n, n, r.rotation.into_iter().flatten());
        RigidMotion::new(rotation, DVector::from_vec(r.translation)).map_err(serde::de::Error::custom)
    }
}

/// Haar-uniform rotation and a translation uniform in the ball of radius
/// `translation_bound`. Deterministic per `seed`.
pub fn random_motion(seed: u64, translation_bound: f64, dim: usize) -> Result<RigidMotion> {
    if !(translation_bound >= 0.0) {
        return Err(LabError::Domain(format!(
            "translation bound must be >= 0, got {translation_bound}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.sample(StandardNormal)).collect() };
    let rotation = match dim {
        2 => {
            let g = gaussian(2);
            let angle = g[1].atan2(g[0]);
            RigidMotion::planar_rotation(angle).rotation
        }
        3 => {
            // normalised Gaussian 4-vector is uniform on S^3
            let g = gaussian(4);
            let q = UnitQuaternion::from_quaternion(Quaternion::new(g[0], g[1], g[2], g[3]));
            RigidMotion::from_quaternion(q, [0.0; 3]).rotation
        }
        _ => {
            return Err(LabError::Domain(format!("random_motion supports n = 2, 3; got {dim}")));
        }
    };
    let translation = if translation_bound == 0.0 {
        DVector::zeros(dim)
    } else {
        let dir = gaussian(dim);
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: f64 = rng.random();
        let radius = translation_bound * u.powf(1.0 / dim as f64);
        DVector::from_iterator(dim, dir.iter().map(|v| v / len * radius))
    };
    Ok(RigidMotion {
        rotation,
        translation,
    })
}
