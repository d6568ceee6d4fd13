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

use std::path::Path;
use std::time::Instant;

use super::io::{save_scenario, IkFile};
use super::Scenario;
use crate::error::ScenarioError;
use crate::grasping::{generate_grasp_set, gripper_mesh, GraspSet, SamplerParams};
use crate::ik::{compute_ik_set, IkParams, IkSolutionSet};
use crate::par::{derive_seed, key_hash, Execution};
use crate::robot::KinematicChain;

pub const GRASP_FILE: &str = "grasps.json";
pub const IK_FILE: &str = "ik.json";

/// What [`annotate_scenario`] produced.
#[derive(Debug, Clone)]
pub struct Annotation {
    pub grasps: GraspSet,
    pub grasp_time_s: f64,
    pub ik: IkSolutionSet,
    pub ik_time_s: f64,
}

/// Grasp-set seed of a scenario under a base seed.
pub fn grasp_seed(base: u64, scenario_id: &str) -> u64 {
    derive_seed(&[base, key_hash(scenario_id)])
}

/// IK-restart seed of a scenario under a base seed.
pub fn ik_seed(base: u64, scenario_id: &str) -> u64 {
    derive_seed(&[base, key_hash(scenario_id), 1])
}

/// Samples grasps and the IK set for `scenario`, writes both next to the
/// manifest in `dir` and re-saves the scenario pointing at them.
pub fn annotate_scenario(
    scenario: &mut Scenario,
    dir: &Path,
    robot: &KinematicChain,
    sampler: &SamplerParams,
    ik_params: &IkParams,
    base_seed: u64,
    exec: Execution,
) -> Result<Annotation, ScenarioError> {
    let t = Instant::now();
    let grasps = generate_grasp_set(
        &scenario.grasp_target(),
        &scenario.scene(),
        &gripper_mesh(),
        sampler,
        grasp_seed(base_seed, &scenario.id),
        exec,
    )?;
    let grasp_time_s = t.elapsed().as_secs_f64();
    let (ik, ik_time_s) = compute_ik_for(scenario, &grasps, robot, ik_params, base_seed, exec);

    std::fs::create_dir_all(dir).map_err(|source| ScenarioError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let grasp_path = dir.join(GRASP_FILE);
    std::fs::write(&grasp_path, grasps.to_json()).map_err(|source| ScenarioError::Io {
        path: grasp_path,
        source,
    })?;
    IkFile::new(&ik, Some(ik_params.clone()), Some(ik_time_s)).save(&dir.join(IK_FILE))?;
    scenario.grasp_file = Some(GRASP_FILE.into());
    scenario.ik_file = Some(IK_FILE.into());
    save_scenario(scenario, dir)?;
    scenario.source_dir = Some(dir.to_path_buf());
    Ok(Annotation {
        grasps,
        grasp_time_s,
        ik,
        ik_time_s,
    })
}

/// The scenario's IK set for `grasps`, with the wall time it took.
pub fn compute_ik_for(
    scenario: &Scenario,
    grasps: &GraspSet,
    robot: &KinematicChain,
    params: &IkParams,
    base_seed: u64,
    exec: Execution,
) -> (IkSolutionSet, f64) {
    let t = Instant::now();
    let ik = compute_ik_set(
        &scenario.chain(robot),
        &scenario.scene(),
        grasps,
        &scenario.q_start,
        params,
        &scenario.id,
        ik_seed(base_seed, &scenario.id),
        exec,
    );
    (ik, t.elapsed().as_secs_f64())
}
