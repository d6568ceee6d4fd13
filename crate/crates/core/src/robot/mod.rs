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

//! Kinematic model of the 9-DoF mobile manipulator.
//!
//! Joints 0 and 1 are prismatic along world x and y (the mobile base), joints
//! 2–8 are the revolute arm joints. Each joint's frame is
//! `frame(i-1) ∘ origin_i ∘ motion(q_i)`; the gripper frame hangs off the last
//! link through a fixed tool transform, with y as the finger-closing axis and
//! z as the approach direction.

mod description;

use std::ops::{Index, IndexMut};

use nalgebra::{SMatrix, SVector, Unit, Vector3};
use rand::Rng;

pub use description::{JointRecord, LinkRecord, RobotDescription, SphereRecord, FORMAT_VERSION};

use crate::error::{GeometryError, RobotError};
use crate::geometry::Transform;

/// Degrees of freedom: two base translations plus seven arm joints.
pub const DOF: usize = 9;

pub type Jacobian = SMatrix<f64, 6, DOF>;

/// Joint vector `(x, y, θ1 … θ7)`; meters for the base, radians for the arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration(pub SVector<f64, DOF>);

impl Configuration {
    pub fn zeros() -> Self {
        Self(SVector::zeros())
    }

    pub fn from_slice(values: &[f64]) -> Option<Self> {
        (values.len() == DOF).then(|| Self(SVector::from_column_slice(values)))
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Unweighted Euclidean distance over the mixed-unit vector.
    pub fn distance(&self, other: &Configuration) -> f64 {
        (self.0 - other.0).norm()
    }

    /// Largest absolute per-joint difference.
    pub fn max_joint_delta(&self, other: &Configuration) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Index<usize> for Configuration {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Configuration {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<[f64; DOF]> for Configuration {
    fn from(v: [f64; DOF]) -> Self {
        Self(SVector::from(v))
    }
}

/// Componentwise blend `q_a + t (q_b − q_a)`, `t ∈ [0, 1]`. Revolute joints are not wrapped.
pub fn interpolate(
    q_a: &Configuration,
    q_b: &Configuration,
    t: f64,
) -> Result<Configuration, GeometryError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GeometryError::InterpolationOutOfRange(t));
    }
    Ok(Configuration(q_a.0 + (q_b.0 - q_a.0) * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointKind {
    Prismatic,
    Revolute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub name: String,
    pub kind: JointKind,
    pub axis: Unit<Vector3<f64>>,
    /// Parent frame → joint frame at `q = 0`.
    pub origin: Transform,
    pub lower: f64,
    pub upper: f64,
}

impl JointSpec {
    fn motion(&self, q: f64) -> Transform {
        match self.kind {
            JointKind::Prismatic => {
                let d = self.axis.into_inner() * q;
                Transform::from_translation(d.x, d.y, d.z)
            }
            JointKind::Revolute => Transform::from_axis_angle(&self.axis, q),
        }
    }
}

/// Collision sphere in a link frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vector3<f64>,
    pub radius: f64,
}

/// Link frames and gripper frame at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FkResult {
    pub links: [Transform; DOF],
    pub gripper: Transform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicChain {
    pub name: String,
    joints: Vec<JointSpec>,
    link_spheres: Vec<Vec<Sphere>>,
    tool: Transform,
}

impl KinematicChain {
    /// Checks the 2-prismatic + 7-revolute layout and the limit/axis invariants.
    pub fn new(
        name: impl Into<String>,
        joints: Vec<JointSpec>,
        link_spheres: Vec<Vec<Sphere>>,
        tool: Transform,
    ) -> Result<Self, RobotError> {
        if joints.len() != DOF {
            return Err(RobotError::JointCount {
                expected: DOF,
                found: joints.len(),
            });
        }
        if link_spheres.len() != DOF {
            return Err(RobotError::LinkCount {
                expected: DOF,
                found: link_spheres.len(),
            });
        }
        for (i, j) in joints.iter().enumerate() {
            let err = |message: &str| RobotError::Joint {
                index: i,
                message: message.to_string(),
            };
            let expected = if i < 2 {
                JointKind::Prismatic
            } else {
                JointKind::Revolute
            };
            if j.kind != expected {
                return Err(err(if i < 2 {
                    "base joints 0 and 1 must be prismatic"
                } else {
                    "arm joints 2-8 must be revolute"
                }));
            }
            if !(j.lower < j.upper) {
                return Err(err("lower limit must be below upper limit"));
            }
            if i < 2 {
                let world = if i == 0 { Vector3::x() } else { Vector3::y() };
                let world_axis = j.origin.transform_vector(&j.axis);
                if (world_axis - world).norm() > 1e-9 {
                    return Err(err("base joints must translate along world x then y"));
                }
            }
        }
        if let Some(s) = link_spheres.iter().flatten().find(|s| !(s.radius > 0.0)) {
            return Err(RobotError::Joint {
                index: 0,
                message: format!("collision sphere radius must be positive, got {}", s.radius),
            });
        }
        Ok(Self {
            name: name.into(),
            joints,
            link_spheres,
            tool,
        })
    }

    /// The bundled mobile Panda-style description.
    pub fn builtin() -> Self {
        RobotDescription::builtin()
            .to_chain()
            .expect("bundled robot description is valid")
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn link_spheres(&self) -> &[Vec<Sphere>] {
        &self.link_spheres
    }

    pub fn tool(&self) -> &Transform {
        &self.tool
    }

    pub fn lower_limits(&self) -> Configuration {
        Configuration(SVector::from_fn(|i, _| self.joints[i].lower))
    }

    pub fn upper_limits(&self) -> Configuration {
        Configuration(SVector::from_fn(|i, _| self.joints[i].upper))
    }

    /// Copy with base travel restricted to the given ranges (meters).
    pub fn with_base_limits(&self, x: [f64; 2], y: [f64; 2]) -> Self {
        let mut chain = self.clone();
        chain.joints[0].lower = x[0];
        chain.joints[0].upper = x[1];
        chain.joints[1].lower = y[0];
        chain.joints[1].upper = y[1];
        chain
    }

    pub fn forward_kinematics(&self, q: &Configuration) -> FkResult {
        let mut links = [Transform::identity(); DOF];
        let mut frame = Transform::identity();
        for (i, joint) in self.joints.iter().enumerate() {
            frame = frame.compose(&joint.origin).compose(&joint.motion(q[i]));
            links[i] = frame;
        }
        FkResult {
            gripper: frame.compose(&self.tool),
            links,
        }
    }

    pub fn gripper_pose(&self, q: &Configuration) -> Transform {
        self.forward_kinematics(q).gripper
    }

    /// Geometric Jacobian of the gripper frame origin, world frame, rows `(v; ω)`.
    pub fn jacobian(&self, q: &Configuration) -> Jacobian {
        let (j, _) = self.jacobian_and_pose(q);
        j
    }

    /// Jacobian together with the gripper pose it was evaluated at.
    pub fn jacobian_and_pose(&self, q: &Configuration) -> (Jacobian, Transform) {
        let mut frame = Transform::identity();
        let mut axes = [Vector3::zeros(); DOF];
        let mut points = [Vector3::zeros(); DOF];
        for (i, joint) in self.joints.iter().enumerate() {
            let pre = frame.compose(&joint.origin);
            axes[i] = pre.transform_vector(&joint.axis);
            points[i] = pre.translation;
            frame = pre.compose(&joint.motion(q[i]));
        }
        let gripper = frame.compose(&self.tool);
        let p_ee = gripper.translation;
        let mut jac = Jacobian::zeros();
        for i in 0..DOF {
            let (lin, ang) = match self.joints[i].kind {
                JointKind::Prismatic => (axes[i], Vector3::zeros()),
                JointKind::Revolute => (axes[i].cross(&(p_ee - points[i])), axes[i]),
            };
            jac.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
            jac.fixed_view_mut::<3, 1>(3, i).copy_from(&ang);
        }
        (jac, gripper)
    }

    /// Closed-interval limit check.
    pub fn within_limits(&self, q: &Configuration) -> bool {
        self.joints
            .iter()
            .enumerate()
            .all(|(i, j)| q[i] >= j.lower && q[i] <= j.upper)
    }

    pub fn clamp_to_limits(&self, q: &Configuration) -> Configuration {
        Configuration(SVector::from_fn(|i, _| {
            q[i].clamp(self.joints[i].lower, self.joints[i].upper)
        }))
    }

    /// Midpoint of every joint range.
    pub fn mid_configuration(&self) -> Configuration {
        Configuration(SVector::from_fn(|i, _| {
            0.5 * (self.joints[i].lower + self.joints[i].upper)
        }))
    }

    /// Uniform sample inside the joint limits.
    pub fn random_configuration<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        Configuration(SVector::from_fn(|i, _| {
            rng.random_range(self.joints[i].lower..=self.joints[i].upper)
        }))
    }

    /// World-frame collision spheres of every link, tagged with the link index.
    pub fn world_spheres(&self, q: &Configuration) -> Vec<(usize, Sphere)> {
        let fk = self.forward_kinematics(q);
        self.spheres_at(&fk)
    }

    pub fn spheres_at(&self, fk: &FkResult) -> Vec<(usize, Sphere)> {
        let mut out = Vec::with_capacity(self.link_spheres.iter().map(Vec::len).sum());
        for (i, spheres) in self.link_spheres.iter().enumerate() {
            for s in spheres {
                out.push((
                    i,
                    Sphere {
                        center: fk.links[i].transform_point(&s.center),
                        radius: s.radius,
                    },
                ));
            }
        }
        out
    }

    /// Copy with every collision sphere radius reduced by `delta` (never below zero).
    pub fn with_sphere_margin(&self, delta: f64) -> Self {
        let mut chain = self.clone();
        for s in chain.link_spheres.iter_mut().flatten() {
            s.radius = (s.radius - delta).max(1e-6);
        }
        chain
    }
}

/// The arm's "ready" posture on a base at the origin, shared by every generated scenario.
pub fn ready_configuration() -> Configuration {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    Configuration::from([
        0.0,
        0.0,
        0.0,
        -FRAC_PI_4,
        0.0,
        -3.0 * FRAC_PI_4,
        0.0,
        FRAC_PI_2,
        FRAC_PI_4,
    ])
}
