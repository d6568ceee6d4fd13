/*
  Copyright 2026 The reachgrasp Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

use nalgebra::{Matrix3, Matrix4, Quaternion, Unit, UnitQuaternion, Vector3, Vector6};
use serde::{Deserialize, Serialize};

/// Millimeters per meter; converts the translation term of [`pose_distance`].
const MM_PER_M: f64 = 1000.0;

/// Rigid SE(3) transform stored as a unit quaternion plus a translation in meters.
///
/// `a.compose(&b)` applies `b` first, then `a`, so frames chain left to right
/// the same way homogeneous matrices do: `world_T_link = world_T_parent ∘ parent_T_link`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl Default for Transform {
    fn default() -> Self {
        Self::identity()
    }
}

impl Transform {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    /// Builds a transform from a raw `(w, x, y, z)` quaternion, normalizing it.
    ///
    /// Returns `None` when the quaternion is (numerically) zero or not finite.
    pub fn from_wxyz(q: [f64; 4], translation: [f64; 3]) -> Option<Self> {
        let raw = Quaternion::new(q[0], q[1], q[2], q[3]);
        let norm = raw.norm();
        if !norm.is_finite() || norm < 1e-12 || translation.iter().any(|t| !t.is_finite()) {
            return None;
        }
        // Already-unit input is kept bit-for-bit so file round trips are exact.
        let rotation = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            UnitQuaternion::new_unchecked(raw)
        } else {
            UnitQuaternion::new_normalize(raw)
        };
        Some(Self::new(rotation, Vector3::from(translation)))
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self::new(UnitQuaternion::identity(), Vector3::new(x, y, z))
    }

    pub fn from_rotation(rotation: UnitQuaternion<f64>) -> Self {
        Self::new(rotation, Vector3::zeros())
    }

    pub fn from_axis_angle(axis: &Unit<Vector3<f64>>, angle: f64) -> Self {
        Self::from_rotation(UnitQuaternion::from_axis_angle(axis, angle))
    }

    pub fn rot_x(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::x_axis(), angle)
    }

    pub fn rot_y(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::y_axis(), angle)
    }

    pub fn rot_z(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::z_axis(), angle)
    }

    /// Builds a transform from an orthonormal, right-handed rotation matrix.
    pub fn from_rotation_matrix(m: &Matrix3<f64>, translation: Vector3<f64>) -> Self {
        let rot = nalgebra::Rotation3::from_matrix_unchecked(*m);
        Self::new(UnitQuaternion::from_rotation_matrix(&rot), translation)
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Transform) -> Transform {
        let mut rotation = self.rotation * other.rotation;
        rotation.renormalize();
        Transform {
            rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Transform {
        let rotation = self.rotation.inverse();
        Transform {
            rotation,
            translation: -(rotation * self.translation),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.rotation.to_rotation_matrix().into_inner()
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&self.rotation_matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Column `i` of the rotation matrix (the frame's x, y or z axis in the parent frame).
    pub fn axis(&self, i: usize) -> Vector3<f64> {
        self.rotation_matrix().column(i).into_owned()
    }

    /// Quaternion as `(w, x, y, z)`.
    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    /// Rotation angle of `self.rotation⁻¹ · other.rotation` in radians, in `[0, π]`.
    pub fn rotation_angle_to(&self, other: &Transform) -> f64 {
        if self.rotation == other.rotation {
            return 0.0;
        }
        rotation_angle(&(self.rotation.inverse() * other.rotation))
    }

    /// Equality up to `tol` on translation (m) and rotation angle (rad).
    pub fn approx_eq(&self, other: &Transform, tol: f64) -> bool {
        (self.translation - other.translation).norm() <= tol
            && self.rotation_angle_to(other) <= tol
    }
}

/// Angle of a unit quaternion in `[0, π]`, via atan2 so it stays accurate near 0 and π.
pub fn rotation_angle(q: &UnitQuaternion<f64>) -> f64 {
    let q = q.quaternion();
    2.0 * q.vector().norm().atan2(q.w.abs())
}

/// Task-space distance between two poses: 1 mm of translation counts the same
/// as 1° of rotation, `1000·‖t_a − t_b‖ + deg(angle(R_aᵀ R_b))`.
pub fn pose_distance(a: &Transform, b: &Transform) -> f64 {
    MM_PER_M * (a.translation - b.translation).norm() + a.rotation_angle_to(b).to_degrees()
}

/// SI task error from `current` to `target`: translation difference (m) stacked
/// over the world-frame rotation vector (axis·angle, rad) of `R_target R_currentᵀ`.
pub fn task_error(current: &Transform, target: &Transform) -> Vector6<f64> {
    let dp = target.translation - current.translation;
    let dr = (target.rotation * current.rotation.inverse()).scaled_axis();
    Vector6::new(dp.x, dp.y, dp.z, dr.x, dr.y, dr.z)
}

/// On-disk form of a transform: position in meters plus `(w, x, y, z)` quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub position: [f64; 3],
    pub quaternion: [f64; 4],
}

impl From<&Transform> for PoseRecord {
    fn from(t: &Transform) -> Self {
        Self {
            position: [t.translation.x, t.translation.y, t.translation.z],
            quaternion: t.wxyz(),
        }
    }
}

impl PoseRecord {
    pub fn to_transform(&self) -> Option<Transform> {
        Transform::from_wxyz(self.quaternion, self.position)
    }
}
