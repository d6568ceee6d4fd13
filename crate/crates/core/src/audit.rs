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

//! Post-hoc checks of files produced by the pipeline. Every function returns
//! a list of human-readable problems; an empty list means the input is valid.

use crate::geometry::{pose_distance, IndexedMesh};
use crate::grasping::{grasp_score, is_antipodal, GraspSet};
use crate::ik::{IkParams, IkSolutionSet};
use crate::planners::{validate_plan, PathFile, PlanningProblem};
use crate::robot::KinematicChain;
use crate::scenario::Scenario;

/// Resting contact tolerance, meters.
const SUPPORT_TOL: f64 = 1e-6;

pub fn audit_scenario(s: &Scenario, robot: &KinematicChain) -> Vec<String> {
    let mut out = Vec::new();
    let chain = s.chain(robot);
    for (axis, lim) in [("x", s.base_limits.x), ("y", s.base_limits.y)] {
        if !(lim[0].is_finite() && lim[1].is_finite() && lim[0] <= lim[1]) {
            out.push(format!("base limit {axis} = {lim:?} is not a valid range"));
        }
    }
    let lo = chain.lower_limits();
    let hi = chain.upper_limits();
    if (lo[0], hi[0], lo[1], hi[1]) != (s.base_limits.x[0], s.base_limits.x[1], s.base_limits.y[0], s.base_limits.y[1]) {
        out.push("base limits disagree with the chain's prismatic joint limits".into());
    }
    if !chain.within_limits(&s.q_start) {
        out.push("q_start violates joint limits".into());
    } else if s.scene().config_in_collision(&chain, &s.q_start) {
        out.push("q_start is in collision".into());
    }
    if !s.target.mesh.is_closed() {
        out.push(format!("target mesh \"{}\" is not closed", s.target.name));
    }
    let t = s.target.mesh.transformed(&s.target.pose).aabb();
    let on_floor = t.min.z.abs() <= SUPPORT_TOL;
    let on_obstacle = s.obstacles.iter().any(|o| {
        let b = o.mesh.transformed(&o.pose).aabb();
        (b.max.z - t.min.z).abs() <= SUPPORT_TOL
            && b.min.x <= t.max.x
            && t.min.x <= b.max.x
            && b.min.y <= t.max.y
            && t.min.y <= b.max.y
    });
    if !(on_floor || on_obstacle) {
        out.push(format!("target bottom z = {:.6} rests on no surface", t.min.z));
    }
    if !(1..=5).contains(&s.level) {
        out.push(format!("level {} outside 1..=5", s.level));
    }
    out
}

/// Checks scores, antipodality at the set's μ and recomputed scores. With a
/// scenario, also checks that no gripper pose hits the scene.
pub fn audit_grasps(set: &GraspSet, scenario: Option<&Scenario>, gripper: &IndexedMesh) -> Vec<String> {
    let mut out = Vec::new();
    if set.len() > set.params.output_size {
        out.push(format!("{} grasps exceed output size {}", set.len(), set.params.output_size));
    }
    let scene = scenario.map(Scenario::scene);
    for (i, g) in set.grasps.iter().enumerate() {
        if !(0.0..=1.0).contains(&g.score) {
            out.push(format!("grasp {i}: score {} outside [0, 1]", g.score));
        }
        if let Some(c) = &g.contacts {
            if !is_antipodal(c, set.params.mu) {
                out.push(format!("grasp {i}: contacts are not antipodal at mu = {}", set.params.mu));
            }
            if c.width() > set.params.max_opening + 1e-12 {
                out.push(format!("grasp {i}: width {:.4} exceeds the gripper opening", c.width()));
            }
            let s = grasp_score(c);
            if (s - g.score).abs() > 1e-9 {
                out.push(format!("grasp {i}: stored score {} but contacts give {s}", g.score));
            }
        }
        if let Some(scene) = &scene {
            if scene.gripper_pose_in_collision(gripper, &g.pose, true) {
                out.push(format!("grasp {i}: gripper collides with the scene"));
            }
        }
    }
    out
}

/// Re-checks limits, collisions and FK residuals of every IK solution.
pub fn audit_ik(
    set: &IkSolutionSet,
    scenario: &Scenario,
    grasps: &GraspSet,
    robot: &KinematicChain,
    params: &IkParams,
) -> Vec<String> {
    let mut out = Vec::new();
    let chain = scenario.chain(robot);
    let scene = scenario.scene();
    if set.scenario_id != scenario.id {
        out.push(format!("IK set belongs to scenario {} not {}", set.scenario_id, scenario.id));
    }
    for (k, s) in set.solutions.iter().enumerate() {
        if k > 0 && s.grasp_index <= set.solutions[k - 1].grasp_index {
            out.push(format!("solution {k}: grasp indices not strictly increasing"));
        }
        let Some(g) = grasps.grasps.get(s.grasp_index) else {
            out.push(format!("solution {k}: grasp index {} out of range", s.grasp_index));
            continue;
        };
        if !chain.within_limits(&s.q) {
            out.push(format!("solution {k}: violates joint limits"));
        } else if scene.config_in_collision(&chain, &s.q) {
            out.push(format!("solution {k}: in collision"));
        }
        let d = pose_distance(&chain.gripper_pose(&s.q), &g.pose);
        if d > params.threshold {
            out.push(format!("solution {k}: residual {d:.4} above threshold {}", params.threshold));
        }
        if s.score != g.score {
            out.push(format!("solution {k}: score {} differs from grasp score {}", s.score, g.score));
        }
    }
    out
}

/// Re-validates a stored path against its scenario and, when available, the grasp it claims.
pub fn audit_path(file: &PathFile, scenario: &Scenario, grasps: Option<&GraspSet>, robot: &KinematicChain) -> Vec<String> {
    let mut out = Vec::new();
    if file.scenario != scenario.id {
        out.push(format!("path belongs to scenario {} not {}", file.scenario, scenario.id));
    }
    let chain = scenario.chain(robot);
    let scene = scenario.scene();
    let problem = PlanningProblem::new(&chain, &scene, scenario.q_start);
    let goal = match (file.success, file.target, grasps) {
        (true, Some(i), Some(g)) => match g.grasps.get(i) {
            Some(g) => Some(g.pose),
            None => {
                out.push(format!("target grasp {i} out of range"));
                None
            }
        },
        _ => None,
    };
    out.extend(
        validate_plan(&problem, &file.result(), goal.as_ref(), &file.params)
            .into_iter()
            .map(|v| v.to_string()),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, Family};

    #[test]
    fn generated_scenarios_pass() {
        let robot = KinematicChain::builtin();
        for f in Family::ALL {
            let s = generate_scenario(f, 1, f.default_schedule()[0], None);
            assert_eq!(audit_scenario(&s, &robot), Vec::<String>::new(), "{}", s.id);
        }
    }

    #[test]
    fn floating_target_is_flagged() {
        let robot = KinematicChain::builtin();
        let mut s = generate_scenario(Family::UnderTable, 1, 0.1, None);
        s.target.pose.translation.z += 0.01;
        assert!(audit_scenario(&s, &robot).iter().any(|m| m.contains("rests on no surface")));
    }
}
