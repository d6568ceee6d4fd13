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

//! Rigid transforms, triangle meshes, BVH queries and the task-space pose metric.

mod bvh;
mod intersect;
mod mesh;
mod transform;

pub use bvh::{meshes_intersect, BvhIndex, IndexedMesh, RayHit};
pub use intersect::{closest_point_on_triangle, ray_triangle, triangles_intersect, Ray, SELF_HIT_GUARD};
pub use mesh::{Aabb, SurfacePoint, TriangleMesh, MIN_TRIANGLE_AREA};
pub use transform::{pose_distance, rotation_angle, task_error, PoseRecord, Transform};
