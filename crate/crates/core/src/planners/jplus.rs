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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{extend, Tree};
use super::{Budget, DetailedPlan, GoalSampler, GoalSet, PlanResult, PlannerParams, PlanningProblem};
use crate::error::PlanError;
use crate::geometry::{pose_distance, task_error, Transform};
use crate::grasping::GraspSet;
use crate::ik::damped_pseudo_inverse;
use crate::robot::Configuration;

/// Result of a greedy task-space extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JplusOutcome {
    /// The node at this index is within `d_goal` of the target pose.
    GoalReached(usize),
    /// Progress stopped; the index is the last node reached (possibly the start node).
    Stalled(usize),
    /// The very first step collided.
    Trapped,
}

/// Greedy descent from node `from` toward `target`, one node per accepted step.
///
/// Each step is `Δq = J⁺ e` with per-joint clamp ε, clamped to the joint
/// limits. A step is accepted only when its edge is free and it lowers the
/// pose distance by more than `stall_progress`.
pub fn jplus_extend(
    tree: &mut Tree,
    problem: &PlanningProblem,
    from: usize,
    target: &Transform,
    params: &PlannerParams,
) -> JplusOutcome {
    let chain = problem.chain;
    let eps = params.epsilon;
    let mut cur = from;
    let mut dist = pose_distance(&tree.node(cur).pose, target);
    if dist <= params.d_goal {
        return JplusOutcome::GoalReached(cur);
    }
    for step in 0..params.stall_steps {
        let q = tree.node(cur).q;
        let (jac, pose) = chain.jacobian_and_pose(&q);
        let e = task_error(&pose, target);
        let dq = (damped_pseudo_inverse(&jac, params.damping) * e).map(|v| v.clamp(-eps, eps));
        let q_new = chain.clamp_to_limits(&Configuration(q.0 + dq));
        let pose_new = chain.gripper_pose(&q_new);
        let dist_new = pose_distance(&pose_new, target);
        if dist - dist_new <= params.stall_progress {
            return JplusOutcome::Stalled(cur);
        }
        if !problem.edge_free_from(&q, &q_new, params.edge_step()) {
            return if step == 0 {
                JplusOutcome::Trapped
            } else {
                JplusOutcome::Stalled(cur)
            };
        }
        cur = tree.push(q_new, cur, pose_new);
        dist = dist_new;
        if dist <= params.d_goal {
            return JplusOutcome::GoalReached(cur);
        }
    }
    JplusOutcome::Stalled(cur)
}

/// J⁺-RRT: one tree from the start, succeeding as soon as any node's gripper
/// pose is within `d_goal` of any grasp.
pub fn plan_jplus_rrt(
    problem: &PlanningProblem,
    grasps: &GraspSet,
    params: &PlannerParams,
) -> Result<PlanResult, PlanError> {
    plan_jplus_rrt_detailed(problem, grasps, params).map(|d| d.result)
}

pub fn plan_jplus_rrt_detailed(
    problem: &PlanningProblem,
    grasps: &GraspSet,
    params: &PlannerParams,
) -> Result<DetailedPlan, PlanError> {
    params.validate()?;
    if grasps.is_empty() {
        return Err(PlanError::NoGrasps);
    }
    if problem.in_collision(&problem.q_start) {
        return Err(PlanError::StartInCollision);
    }
    let budget = Budget::new(params);
    let chain = problem.chain;
    let goals = GoalSet::new(grasps.poses().copied().collect());
    let scores: Vec<f64> = grasps.grasps.iter().map(|g| g.score).collect();
    let sampler = GoalSampler::new(&scores, params.score_bias);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut tree = Tree::new(problem.q_start, chain.gripper_pose(&problem.q_start));
    let (mut best_goal, mut best_dist) = goals.closest(&tree.node(0).pose);
    let mut best_node = 0;
    let mut iterations = 0u64;

    while best_dist > params.d_goal && !budget.exhausted(iterations) {
        iterations += 1;
        let before = tree.len();
        if rng.random::<f64>() < params.p_goal {
            let g = sampler.sample(&mut rng);
            let (from, _) = tree.nearest_pose(goals.pose(g));
            jplus_extend(&mut tree, problem, from, goals.pose(g), params);
        } else {
            let q_rand = chain.random_configuration(&mut rng);
            let near = tree.nearest(&q_rand);
            extend(&mut tree, problem, near, &q_rand, params.epsilon, params.edge_step());
        }
        for i in before..tree.len() {
            let (g, d) = goals.closest(&tree.node(i).pose);
            if d < best_dist {
                (best_goal, best_dist, best_node) = (g, d, i);
                if d <= params.d_goal {
                    break;
                }
            }
        }
    }

    let success = best_dist <= params.d_goal;
    let result = PlanResult {
        success,
        path: if success { tree.path_to(best_node) } else { Vec::new() },
        grasp_index: success.then_some(best_goal),
        time_s: budget.elapsed(),
        iterations,
        final_distance: best_dist,
    };
    Ok(DetailedPlan {
        result,
        trees: vec![tree],
    })
}
