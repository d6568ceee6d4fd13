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

use nalgebra::{Unit, Vector3};
use serde::{Deserialize, Serialize};

use super::{JointKind, JointSpec, KinematicChain, Sphere};
use crate::error::RobotError;
use crate::geometry::PoseRecord;

pub const FORMAT_VERSION: u32 = 1;

const BUILTIN: &str = include_str!("../../data/mobile_panda.json");

/// JSON robot description, `format: 1`.
///
/// ```json
/// { "format": 1, "name": "...",
///   "joints": [ { "name", "kind": "prismatic"|"revolute", "axis": [x,y,z],
///                 "origin": { "position": [..], "quaternion": [w,x,y,z] },
///                 "limits": [lo, hi] } × 9 ],
///   "links": [ { "spheres": [ { "center": [..], "radius": r } ] } × 9 ],
///   "tool": { "position": [..], "quaternion": [..] } }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotDescription {
    pub format: u32,
    pub name: String,
    pub joints: Vec<JointRecord>,
    pub links: Vec<LinkRecord>,
    pub tool: PoseRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRecord {
    pub name: String,
    pub kind: JointKindRecord,
    pub axis: [f64; 3],
    pub origin: PoseRecord,
    pub limits: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKindRecord {
    Prismatic,
    Revolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    #[serde(default)]
    pub spheres: Vec<SphereRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereRecord {
    pub center: [f64; 3],
    pub radius: f64,
}

impl RobotDescription {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("bundled robot description parses")
    }

    pub fn from_json(src: &str) -> Result<Self, RobotError> {
        let desc: RobotDescription = serde_json::from_str(src)?;
        if desc.format != FORMAT_VERSION {
            return Err(RobotError::FormatVersion {
                found: desc.format,
                expected: FORMAT_VERSION,
            });
        }
        Ok(desc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("robot description serializes")
    }

    pub fn to_chain(&self) -> Result<KinematicChain, RobotError> {
        let joints = self
            .joints
            .iter()
            .enumerate()
            .map(|(index, j)| {
                let axis = Vector3::from(j.axis);
                if (axis.norm() - 1.0).abs() > 1e-9 {
                    return Err(RobotError::Joint {
                        index,
                        message: "axis must be unit length".into(),
                    });
                }
                let origin = j.origin.to_transform().ok_or_else(|| {
                    RobotError::Transform(format!("joint {index} origin"))
                })?;
                Ok(JointSpec {
                    name: j.name.clone(),
                    kind: match j.kind {
                        JointKindRecord::Prismatic => JointKind::Prismatic,
                        JointKindRecord::Revolute => JointKind::Revolute,
                    },
                    axis: Unit::new_unchecked(axis),
                    origin,
                    lower: j.limits[0],
                    upper: j.limits[1],
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let spheres = self
            .links
            .iter()
            .map(|l| {
                l.spheres
                    .iter()
                    .map(|s| Sphere {
                        center: Vector3::from(s.center),
                        radius: s.radius,
                    })
                    .collect()
            })
            .collect();
        let tool = self
            .tool
            .to_transform()
            .ok_or_else(|| RobotError::Transform("tool".into()))?;
        KinematicChain::new(self.name.clone(), joints, spheres, tool)
    }

    pub fn from_chain(chain: &KinematicChain) -> Self {
        Self {
            format: FORMAT_VERSION,
            name: chain.name.clone(),
            joints: chain
                .joints()
                .iter()
                .map(|j| JointRecord {
                    name: j.name.clone(),
                    kind: match j.kind {
                        JointKind::Prismatic => JointKindRecord::Prismatic,
                        JointKind::Revolute => JointKindRecord::Revolute,
                    },
                    axis: [j.axis.x, j.axis.y, j.axis.z],
                    origin: PoseRecord::from(&j.origin),
                    limits: [j.lower, j.upper],
                })
                .collect(),
            links: chain
                .link_spheres()
                .iter()
                .map(|spheres| LinkRecord {
                    spheres: spheres
                        .iter()
                        .map(|s| SphereRecord {
                            center: [s.center.x, s.center.y, s.center.z],
                            radius: s.radius,
                        })
                        .collect(),
                })
                .collect(),
            tool: PoseRecord::from(chain.tool()),
        }
    }
}
