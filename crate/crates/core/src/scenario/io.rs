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

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{BaseLimits, Family, PlacedMesh, Scenario};
use crate::error::ScenarioError;
use crate::geometry::{PoseRecord, TriangleMesh};
use crate::ik::{IkParams, IkSolution, IkSolutionSet};
use crate::robot::{Configuration, DOF};

pub const SCENARIO_FORMAT: u32 = 1;
pub const MANIFEST_FILE: &str = "scenario.json";
const SCENARIO_KIND: &str = "scenario";
const IK_KIND: &str = "ik_set";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeshEntry {
    name: String,
    mesh: String,
    pose: PoseRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    format: u32,
    kind: String,
    id: String,
    family: Family,
    level: u8,
    difficulty: f64,
    base_limits: BaseLimits,
    q_start: [f64; DOF],
    obstacles: Vec<MeshEntry>,
    target: MeshEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grasps: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ik: Option<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn invalid(path: &Path, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ScenarioError> {
    let src = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&src).map_err(|source| ScenarioError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), ScenarioError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn check_format(path: &Path, found: u32) -> Result<(), ScenarioError> {
    if found != SCENARIO_FORMAT {
        return Err(ScenarioError::FormatVersion {
            path: path.to_path_buf(),
            found,
            expected: SCENARIO_FORMAT,
        });
    }
    Ok(())
}

fn mesh_file_name(prefix: &str, name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    format!("{prefix}{clean}.obj")
}

fn save_mesh(dir: &Path, file: &str, placed: &PlacedMesh) -> Result<MeshEntry, ScenarioError> {
    write_file(&dir.join(file), &placed.mesh.to_obj_string())?;
    Ok(MeshEntry {
        name: placed.name.clone(),
        mesh: file.to_string(),
        pose: PoseRecord::from(&placed.pose),
    })
}

fn load_mesh(dir: &Path, entry: &MeshEntry) -> Result<PlacedMesh, ScenarioError> {
    let path = dir.join(&entry.mesh);
    let src = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mesh = TriangleMesh::from_obj_str(&src).map_err(|source| ScenarioError::Mesh {
        path: path.clone(),
        source,
    })?;
    let pose = entry
        .pose
        .to_transform()
        .ok_or_else(|| invalid(&dir.join(MANIFEST_FILE), format!("mesh \"{}\" has a degenerate pose", entry.name)))?;
    Ok(PlacedMesh {
        name: entry.name.clone(),
        mesh,
        pose,
    })
}

/// Writes `scenario` into `dir` as a manifest plus one OBJ per mesh. Returns the manifest path.
pub fn save_scenario(scenario: &Scenario, dir: &Path) -> Result<PathBuf, ScenarioError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let obstacles = scenario
        .obstacles
        .iter()
        .map(|o| save_mesh(dir, &mesh_file_name("obstacle_", &o.name), o))
        .collect::<Result<Vec<_>, _>>()?;
    let target = save_mesh(dir, &mesh_file_name("target_", &scenario.target.name), &scenario.target)?;
    let mut q_start = [0.0; DOF];
    q_start.copy_from_slice(scenario.q_start.as_slice());
    let manifest = Manifest {
        format: SCENARIO_FORMAT,
        kind: SCENARIO_KIND.to_string(),
        id: scenario.id.clone(),
        family: scenario.family,
        level: scenario.level,
        difficulty: scenario.difficulty,
        base_limits: scenario.base_limits,
        q_start,
        obstacles,
        target,
        grasps: scenario.grasp_file.clone(),
        ik: scenario.ik_file.clone(),
    };
    let path = dir.join(MANIFEST_FILE);
    write_file(&path, &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    Ok(path)
}

/// Loads a scenario from a manifest file or a directory containing one.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let m: Manifest = read_json(&path)?;
    check_format(&path, m.format)?;
    if m.kind != SCENARIO_KIND {
        return Err(invalid(&path, format!("kind \"{}\" is not a scenario", m.kind)));
    }
    if !(1..=5).contains(&m.level) {
        return Err(invalid(&path, format!("level {} outside 1..=5", m.level)));
    }
    let limits_ok = |l: [f64; 2]| l[0].is_finite() && l[1].is_finite() && l[0] <= l[1];
    if !limits_ok(m.base_limits.x) || !limits_ok(m.base_limits.y) {
        return Err(invalid(&path, "base limits must be finite with min <= max"));
    }
    let q_start = Configuration::from(m.q_start);
    if !q_start.is_finite() {
        return Err(invalid(&path, "q_start is not finite"));
    }
    let obstacles = m
        .obstacles
        .iter()
        .map(|e| load_mesh(&dir, e))
        .collect::<Result<Vec<_>, _>>()?;
    let target = load_mesh(&dir, &m.target)?;
    if !target.mesh.is_closed() {
        return Err(invalid(&path, "target mesh must be closed"));
    }
    Ok(Scenario {
        id: m.id,
        family: m.family,
        level: m.level,
        difficulty: m.difficulty,
        obstacles,
        target,
        base_limits: m.base_limits,
        q_start,
        grasp_file: m.grasps,
        ik_file: m.ik,
        source_dir: Some(dir),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkRecord {
    pub q: [f64; DOF],
    pub score: f64,
    pub grasp_index: usize,
}

/// On-disk IK solution set (`format: 1`, kind `ik_set`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkFile {
    pub format: u32,
    pub kind: String,
    pub scenario_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<IkParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_s: Option<f64>,
    pub solutions: Vec<IkRecord>,
}

impl IkFile {
    pub fn new(set: &IkSolutionSet, params: Option<IkParams>, time_s: Option<f64>) -> Self {
        Self {
            format: SCENARIO_FORMAT,
            kind: IK_KIND.to_string(),
            scenario_id: set.scenario_id.clone(),
            params,
            time_s,
            solutions: set
                .solutions
                .iter()
                .map(|s| {
                    let mut q = [0.0; DOF];
                    q.copy_from_slice(s.q.as_slice());
                    IkRecord {
                        q,
                        score: s.score,
                        grasp_index: s.grasp_index,
                    }
                })
                .collect(),
        }
    }

    pub fn to_set(&self) -> IkSolutionSet {
        IkSolutionSet {
            scenario_id: self.scenario_id.clone(),
            solutions: self
                .solutions
                .iter()
                .map(|r| IkSolution {
                    q: Configuration::from(r.q),
                    score: r.score,
                    grasp_index: r.grasp_index,
                })
                .collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        write_file(path, &serde_json::to_string_pretty(self).expect("ik file serializes"))
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let file: IkFile = read_json(path)?;
        check_format(path, file.format)?;
        if file.kind != IK_KIND {
            return Err(invalid(path, format!("kind \"{}\" is not an IK set", file.kind)));
        }
        for (i, r) in file.solutions.iter().enumerate() {
            if r.q.iter().any(|v| !v.is_finite()) || !(0.0..=1.0).contains(&r.score) {
                return Err(invalid(path, format!("solution {i} is malformed")));
            }
        }
        Ok(file)
    }
}
