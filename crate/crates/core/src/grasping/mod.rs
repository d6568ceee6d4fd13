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

//! Antipodal grasp synthesis for a two-finger parallel gripper.
//!
//! A first contact is drawn uniformly on the object surface, rays are shot into
//! the body inside its friction cone, and each exit point whose own friction
//! cone contains the connecting line forms an antipodal pair. The pair fixes
//! the grasp center and the closing (y) axis; approach (z) directions are
//! spread evenly around it. Grasps are scored by the friction needed for force
//! closure, filtered against the scene with a box gripper model, and thinned by
//! farthest-point sampling in pose space.

mod io;
mod sampler;

use nalgebra::{Matrix3, UnitQuaternion, Vector3};

pub use io::{ContactRecord, GraspFile, GraspRecord, GRASP_FORMAT};
pub use sampler::{farthest_point_subsample, generate_grasp_set, sample_contact_pairs, GraspTarget};

use crate::error::GraspError;
use crate::geometry::{IndexedMesh, Transform, TriangleMesh};

/// Friction coefficient that normalizes the score: `score = 1 − μ_req / MU_REF`.
pub const MU_REF: f64 = 1.0;

const GRIPPER_OBJ: &str = include_str!("../../data/gripper.obj");

/// The bundled three-box gripper (palm plus fingers at 0.08 m opening), gripper frame.
pub fn gripper_mesh() -> IndexedMesh {
    IndexedMesh::new(TriangleMesh::from_obj_str(GRIPPER_OBJ).expect("bundled gripper mesh"))
}

/// Two surface contacts with inward unit normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPair {
    pub p1: Vector3<f64>,
    pub p2: Vector3<f64>,
    pub n1: Vector3<f64>,
    pub n2: Vector3<f64>,
}

impl ContactPair {
    pub fn width(&self) -> f64 {
        (self.p2 - self.p1).norm()
    }

    /// Unit vector from `p1` to `p2`.
    pub fn axis(&self) -> Vector3<f64> {
        (self.p2 - self.p1).normalize()
    }

    /// Angles of each contact normal against the oriented connecting line.
    pub fn cone_angles(&self) -> (f64, f64) {
        let u = self.axis();
        (self.n1.angle(&u), self.n2.angle(&(-u)))
    }

    pub fn transformed(&self, t: &Transform) -> ContactPair {
        ContactPair {
            p1: t.transform_point(&self.p1),
            p2: t.transform_point(&self.p2),
            n1: t.transform_vector(&self.n1),
            n2: t.transform_vector(&self.n2),
        }
    }
}

/// Both contacts see the connecting line inside their friction cone of half-angle `atan(μ)`.
pub fn is_antipodal(c: &ContactPair, mu: f64) -> bool {
    if c.width() <= 0.0 {
        return false;
    }
    let half_angle = mu.atan();
    let (a1, a2) = c.cone_angles();
    a1 <= half_angle && a2 <= half_angle
}

/// Stability score in `[0, 1]`: one minus the friction coefficient required for
/// force closure, relative to [`MU_REF`].
pub fn grasp_score(c: &ContactPair) -> f64 {
    let (a1, a2) = c.cone_angles();
    let required = a1.tan().max(a2.tan());
    let required = if required.is_nan() || required < 0.0 {
        f64::INFINITY
    } else {
        required
    };
    (1.0 - required / MU_REF).clamp(0.0, 1.0)
}

/// Grasp poses for a contact pair with `n_approach` approach directions evenly
/// spaced about the closing axis.
pub fn build_grasp_poses(c: &ContactPair, n_approach: usize) -> Vec<Transform> {
    build_grasp_poses_with_phase(c, n_approach, 0.0)
}

/// As [`build_grasp_poses`], with the first approach direction rotated by `phase` radians.
pub fn build_grasp_poses_with_phase(c: &ContactPair, n_approach: usize, phase: f64) -> Vec<Transform> {
    let y = c.axis();
    let center = (c.p1 + c.p2) * 0.5;
    // Least-aligned world axis as the zero-phase reference for the approach direction.
    let reference = [Vector3::x(), Vector3::y(), Vector3::z()]
        .into_iter()
        .min_by(|a, b| a.dot(&y).abs().total_cmp(&b.dot(&y).abs()))
        .expect("three axes");
    let z0 = (reference - y * reference.dot(&y)).normalize();
    let axis = nalgebra::Unit::new_unchecked(y);
    (0..n_approach)
        .map(|k| {
            let angle = phase + std::f64::consts::TAU * k as f64 / n_approach as f64;
            let z = UnitQuaternion::from_axis_angle(&axis, angle) * z0;
            let x = y.cross(&z);
            Transform::from_rotation_matrix(&Matrix3::from_columns(&[x, y, z]), center)
        })
        .collect()
}

/// Grasp pose plus score; `contacts` are kept for audits.
#[derive(Debug, Clone, PartialEq)]
pub struct Grasp {
    pub pose: Transform,
    pub score: f64,
    pub contacts: Option<ContactPair>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SamplerParams {
    /// Friction coefficient for the antipodal test.
    pub mu: f64,
    pub rays_per_point: usize,
    pub approach_directions: usize,
    /// Maximum finger opening, meters.
    pub max_opening: f64,
    /// Candidate grasp poses generated before collision filtering.
    pub raw_budget: usize,
    pub output_size: usize,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            mu: 1.0,
            rays_per_point: 16,
            approach_directions: 6,
            max_opening: 0.08,
            raw_budget: 20_000,
            output_size: 200,
        }
    }
}

impl SamplerParams {
    pub fn validate(&self) -> Result<(), GraspError> {
        let bad = |m: &str| Err(GraspError::Params(m.to_string()));
        if !(self.mu > 0.0) {
            return bad("mu must be positive");
        }
        if self.rays_per_point == 0 || self.approach_directions == 0 {
            return bad("rays per point and approach directions must be at least 1");
        }
        if !(self.max_opening > 0.0) {
            return bad("max opening must be positive");
        }
        if self.output_size == 0 || self.output_size > self.raw_budget {
            return bad("output size must be in 1..=raw budget");
        }
        Ok(())
    }
}

/// Emitted grasps, world frame, with the settings that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspSet {
    pub object_id: String,
    pub seed: u64,
    pub params: SamplerParams,
    pub grasps: Vec<Grasp>,
    /// Fewer survivors than `params.output_size`.
    pub incomplete: bool,
}

impl GraspSet {
    pub fn len(&self) -> usize {
        self.grasps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grasps.is_empty()
    }

    pub fn poses(&self) -> impl Iterator<Item = &Transform> {
        self.grasps.iter().map(|g| &g.pose)
    }
}
