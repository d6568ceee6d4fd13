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

//! Scenario data model, manifests on disk and the four procedural families.
//!
//! A scenario places the mobile manipulator at the world origin facing +x,
//! surrounded by box obstacles, with one target object resting on a surface.
//! Ids are `family digit × 10 + level` (011 … 045).

mod annotate;
mod families;
mod io;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use annotate::{annotate_scenario, compute_ik_for, grasp_seed, ik_seed, Annotation, GRASP_FILE, IK_FILE};
pub use families::{generate_family, generate_scenario, Family, ObjectKind, ScenarioFamily};
pub use io::{load_scenario, save_scenario, IkFile, IkRecord, MANIFEST_FILE, SCENARIO_FORMAT};

use crate::collision::CollisionScene;
use crate::geometry::{IndexedMesh, Transform, TriangleMesh};
use crate::grasping::GraspTarget;
use crate::robot::{Configuration, KinematicChain};

/// A mesh in its own frame plus its world pose.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedMesh {
    pub name: String,
    pub mesh: TriangleMesh,
    pub pose: Transform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseLimits {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub family: Family,
    /// 1 (easiest) to 5.
    pub level: u8,
    /// The family's difficulty parameter at this level: setback or opening width, meters.
    pub difficulty: f64,
    pub obstacles: Vec<PlacedMesh>,
    pub target: PlacedMesh,
    pub base_limits: BaseLimits,
    pub q_start: Configuration,
    /// Grasp-set file, relative to the manifest directory.
    pub grasp_file: Option<String>,
    /// IK-set file, relative to the manifest directory.
    pub ik_file: Option<String>,
    /// Directory the scenario was loaded from, if any.
    pub source_dir: Option<PathBuf>,
}

impl Scenario {
    /// The robot with this scenario's base limits.
    pub fn chain(&self, robot: &KinematicChain) -> KinematicChain {
        robot.with_base_limits(self.base_limits.x, self.base_limits.y)
    }

    /// Floor, obstacles, and the target as an obstacle (for robot configurations).
    pub fn scene(&self) -> CollisionScene {
        let mut scene = CollisionScene::empty().with_floor(true);
        for o in &self.obstacles {
            scene.add_obstacle(o.name.clone(), &o.mesh, &o.pose);
        }
        scene.set_target(&self.target.mesh, &self.target.pose, true);
        scene
    }

    pub fn grasp_target(&self) -> GraspTarget {
        GraspTarget {
            object_id: self.target.name.clone(),
            mesh: IndexedMesh::new(self.target.mesh.clone()),
            pose: self.target.pose,
        }
    }

    /// Resolves a manifest-relative path against the directory the scenario came from.
    pub fn resolve(&self, relative: &str) -> PathBuf {
        match &self.source_dir {
            Some(d) => d.join(relative),
            None => PathBuf::from(relative),
        }
    }

    pub fn grasp_path(&self) -> Option<PathBuf> {
        self.grasp_file.as_deref().map(|f| self.resolve(f))
    }

    pub fn ik_path(&self) -> Option<PathBuf> {
        self.ik_file.as_deref().map(|f| self.resolve(f))
    }
}
