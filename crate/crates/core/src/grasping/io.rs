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

use serde::{Deserialize, Serialize};

use super::{ContactPair, Grasp, GraspSet, SamplerParams};
use crate::error::GraspError;
use crate::geometry::PoseRecord;

pub const GRASP_FORMAT: u32 = 1;
const KIND: &str = "grasp_set";

/// On-disk grasp set (`format: 1`). Poses are world frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspFile {
    pub format: u32,
    pub kind: String,
    pub object_id: String,
    pub seed: u64,
    pub params: SamplerParams,
    #[serde(default)]
    pub incomplete: bool,
    pub grasps: Vec<GraspRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspRecord {
    pub position: [f64; 3],
    /// `(w, x, y, z)`.
    pub quaternion: [f64; 4],
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contacts: Option<ContactRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactRecord {
    pub p1: [f64; 3],
    pub p2: [f64; 3],
    pub n1: [f64; 3],
    pub n2: [f64; 3],
    pub width: f64,
}

fn arr(v: &nalgebra::Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

impl From<&ContactPair> for ContactRecord {
    fn from(c: &ContactPair) -> Self {
        Self {
            p1: arr(&c.p1),
            p2: arr(&c.p2),
            n1: arr(&c.n1),
            n2: arr(&c.n2),
            width: c.width(),
        }
    }
}

impl ContactRecord {
    pub fn to_pair(&self) -> ContactPair {
        ContactPair {
            p1: self.p1.into(),
            p2: self.p2.into(),
            n1: self.n1.into(),
            n2: self.n2.into(),
        }
    }
}

impl From<&GraspSet> for GraspFile {
    fn from(set: &GraspSet) -> Self {
        Self {
            format: GRASP_FORMAT,
            kind: KIND.to_string(),
            object_id: set.object_id.clone(),
            seed: set.seed,
            params: set.params.clone(),
            incomplete: set.incomplete,
            grasps: set
                .grasps
                .iter()
                .map(|g| {
                    let pose = PoseRecord::from(&g.pose);
                    GraspRecord {
                        position: pose.position,
                        quaternion: pose.quaternion,
                        score: g.score,
                        contacts: g.contacts.as_ref().map(ContactRecord::from),
                    }
                })
                .collect(),
        }
    }
}

impl GraspFile {
    /// Checks the header and every record, then builds the in-memory set.
    pub fn to_set(&self) -> Result<GraspSet, GraspError> {
        if self.format != GRASP_FORMAT {
            return Err(GraspError::Invalid(format!(
                "format {} (expected {GRASP_FORMAT})",
                self.format
            )));
        }
        if self.kind != KIND {
            return Err(GraspError::Invalid(format!("kind \"{}\" (expected \"{KIND}\")", self.kind)));
        }
        let grasps = self
            .grasps
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let pose = PoseRecord {
                    position: r.position,
                    quaternion: r.quaternion,
                }
                .to_transform()
                .ok_or_else(|| GraspError::Invalid(format!("grasp {i}: invalid pose")))?;
                if !(0.0..=1.0).contains(&r.score) {
                    return Err(GraspError::Invalid(format!("grasp {i}: score {} outside [0, 1]", r.score)));
                }
                Ok(Grasp {
                    pose,
                    score: r.score,
                    contacts: r.contacts.as_ref().map(ContactRecord::to_pair),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GraspSet {
            object_id: self.object_id.clone(),
            seed: self.seed,
            params: self.params.clone(),
            grasps,
            incomplete: self.incomplete,
        })
    }
}

impl GraspSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraspFile::from(self)).expect("grasp set serializes")
    }

    pub fn from_json(src: &str) -> Result<GraspSet, GraspError> {
        let file: GraspFile =
            serde_json::from_str(src).map_err(|e| GraspError::Invalid(e.to_string()))?;
        file.to_set()
    }
}
