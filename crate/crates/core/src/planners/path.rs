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

use super::{PlanResult, Planner, PlannerParams};
use crate::robot::{Configuration, DOF};

pub const PATH_FORMAT: u32 = 1;
const KIND: &str = "path";

/// On-disk planner output (`format: 1`): the path as 9-vectors plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFile {
    pub format: u32,
    pub kind: String,
    pub scenario: String,
    pub planner: Planner,
    /// Grasp index the run targeted (IK-RRT) or reached (J⁺-RRT).
    pub target: Option<usize>,
    pub success: bool,
    pub time_s: f64,
    pub iterations: u64,
    pub final_distance: f64,
    pub params: PlannerParams,
    pub path: Vec<[f64; DOF]>,
}

impl PathFile {
    pub fn new(scenario: &str, planner: Planner, target: Option<usize>, result: &PlanResult, params: &PlannerParams) -> Self {
        Self {
            format: PATH_FORMAT,
            kind: KIND.to_string(),
            scenario: scenario.to_string(),
            planner,
            target: target.or(result.grasp_index),
            success: result.success,
            time_s: result.time_s,
            iterations: result.iterations,
            final_distance: result.final_distance,
            params: params.clone(),
            path: result
                .path
                .iter()
                .map(|q| {
                    let mut a = [0.0; DOF];
                    a.copy_from_slice(q.as_slice());
                    a
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path file serializes")
    }

    pub fn from_json(src: &str) -> Result<Self, String> {
        let file: PathFile = serde_json::from_str(src).map_err(|e| e.to_string())?;
        if file.format != PATH_FORMAT {
            return Err(format!("unsupported path format {} (expected {PATH_FORMAT})", file.format));
        }
        if file.kind != KIND {
            return Err(format!("kind \"{}\" is not a path file", file.kind));
        }
        Ok(file)
    }

    pub fn result(&self) -> PlanResult {
        PlanResult {
            success: self.success,
            path: self.path.iter().map(|a| Configuration::from(*a)).collect(),
            grasp_index: self.target,
            time_s: self.time_s,
            iterations: self.iterations,
            final_distance: self.final_distance,
        }
    }
}
