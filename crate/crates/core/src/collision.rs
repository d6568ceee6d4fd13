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

//! Membership tests for the free configuration space.
//!
//! The robot is a set of spheres per link; obstacles are world-frame triangle
//! meshes. A sphere collides when some triangle is closer than its radius, or
//! when its center lies inside a closed obstacle mesh. Joint-limit violations
//! count as collisions so planners only need one predicate.

use nalgebra::Vector3;

use crate::geometry::{meshes_intersect, IndexedMesh, Transform, TriangleMesh};
use crate::robot::{Configuration, KinematicChain, Sphere};

/// A world-frame mesh in the scene.
#[derive(Debug, Clone)]
pub struct SceneObject {
    pub name: String,
    pub mesh: IndexedMesh,
    /// Closed meshes also reject geometry fully inside them.
    pub closed: bool,
}

impl SceneObject {
    /// Places `mesh` (in its own frame) at `pose`.
    pub fn new(name: impl Into<String>, mesh: &TriangleMesh, pose: &Transform) -> Self {
        let world = mesh.transformed(pose);
        let closed = world.is_closed();
        Self {
            name: name.into(),
            mesh: IndexedMesh::new(world),
            closed,
        }
    }

    fn sphere_collides(&self, center: &Vector3<f64>, radius: f64) -> bool {
        let root = self.mesh.bvh.root_aabb();
        if root.distance_squared(center) >= radius * radius {
            return false;
        }
        self.mesh.bvh.sphere_intersects(&self.mesh.mesh, center, radius)
            || (self.closed && self.mesh.bvh.contains_point(&self.mesh.mesh, center))
    }

    fn gripper_collides(&self, gripper: &IndexedMesh, pose: &Transform) -> bool {
        if !self
            .mesh
            .bvh
            .root_aabb()
            .overlaps(&gripper.bvh.root_aabb().transformed(pose))
        {
            return false;
        }
        meshes_intersect(&self.mesh, gripper, pose)
            || (self.closed
                && gripper.mesh.vertices().first().is_some_and(|v| {
                    self.mesh
                        .bvh
                        .contains_point(&self.mesh.mesh, &pose.transform_point(v))
                }))
    }
}

/// Obstacles, the target object and an optional floor plane at z = 0.
#[derive(Debug, Clone, Default)]
pub struct CollisionScene {
    pub obstacles: Vec<SceneObject>,
    pub target: Option<SceneObject>,
    /// Whether the target object blocks the robot (path checks) or not.
    pub include_target: bool,
    pub floor: bool,
}

impl CollisionScene {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_floor(mut self, floor: bool) -> Self {
        self.floor = floor;
        self
    }

    pub fn add_obstacle(&mut self, name: impl Into<String>, mesh: &TriangleMesh, pose: &Transform) {
        self.obstacles.push(SceneObject::new(name, mesh, pose));
    }

    pub fn set_target(&mut self, mesh: &TriangleMesh, pose: &Transform, include: bool) {
        self.target = Some(SceneObject::new("target", mesh, pose));
        self.include_target = include;
    }

    fn robot_blockers(&self) -> impl Iterator<Item = &SceneObject> {
        self.obstacles
            .iter()
            .chain(self.target.iter().filter(|_| self.include_target))
    }

    /// True when the sphere touches the floor or any blocking mesh.
    pub fn sphere_in_collision(&self, s: &Sphere) -> bool {
        if self.floor && s.center.z < s.radius {
            return true;
        }
        self.robot_blockers()
            .any(|o| o.sphere_collides(&s.center, s.radius))
    }

    pub fn config_in_collision(&self, chain: &KinematicChain, q: &Configuration) -> bool {
        if !q.is_finite() || !chain.within_limits(q) {
            return true;
        }
        chain
            .world_spheres(q)
            .iter()
            .any(|(_, s)| self.sphere_in_collision(s))
    }

    /// Checks every sample of the dyadic discretization of `q_a → q_b`, both endpoints included.
    pub fn edge_collision_free(
        &self,
        chain: &KinematicChain,
        q_a: &Configuration,
        q_b: &Configuration,
        step: f64,
    ) -> bool {
        let n = edge_segments(q_a, q_b, step);
        (0..=n).all(|k| !self.config_in_collision(chain, &edge_sample(q_a, q_b, k, n)))
    }

    /// As [`Self::edge_collision_free`] but skips `q_a`, which the caller already knows is free.
    pub(crate) fn edge_free_from(
        &self,
        chain: &KinematicChain,
        q_a: &Configuration,
        q_b: &Configuration,
        step: f64,
    ) -> bool {
        let n = edge_segments(q_a, q_b, step);
        (1..=n).all(|k| !self.config_in_collision(chain, &edge_sample(q_a, q_b, k, n)))
    }

    /// Collision of the gripper mesh placed at `pose`; the target is skipped when `exclude_target`.
    pub fn gripper_pose_in_collision(
        &self,
        gripper: &IndexedMesh,
        pose: &Transform,
        exclude_target: bool,
    ) -> bool {
        if self.floor
            && gripper
                .mesh
                .vertices()
                .iter()
                .any(|v| pose.transform_point(v).z < 0.0)
        {
            return true;
        }
        self.obstacles
            .iter()
            .chain(self.target.iter().filter(|_| !exclude_target))
            .any(|o| o.gripper_collides(gripper, pose))
    }
}

/// Number of segments: the smallest power of two keeping every joint's move ≤ `step`.
///
/// Powers of two make finer steps sample a superset of coarser ones.
pub fn edge_segments(q_a: &Configuration, q_b: &Configuration, step: f64) -> usize {
    assert!(step > 0.0, "edge step must be positive");
    let d = q_a.max_joint_delta(q_b);
    if d == 0.0 {
        return 0;
    }
    ((d / step).ceil() as usize).max(1).next_power_of_two()
}

fn edge_sample(q_a: &Configuration, q_b: &Configuration, k: usize, n: usize) -> Configuration {
    if n == 0 || k == 0 {
        return *q_a;
    }
    if k == n {
        return *q_b;
    }
    Configuration(q_a.0 + (q_b.0 - q_a.0) * (k as f64 / n as f64))
}
