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

use super::tree::{extend, ExtendOutcome, Tree};
use super::{Budget, DetailedPlan, PlanResult, PlannerParams, PlanningProblem};
use crate::error::PlanError;
use crate::geometry::{pose_distance, Transform};
use crate::robot::Configuration;

/// Where the two trees were joined.
#[derive(Debug, Clone, Copy)]
struct Meeting {
    start_node: usize,
    goal_node: usize,
}

/// IK-RRT: bidirectional search from `q_start` to a goal configuration
/// `target_q`, typically an IK solution of grasp `grasp_pose`.
///
/// Both trees are pulled toward a shared random sample (the goal root with
/// probability `p_goal`), each extending until reached or trapped. After every
/// new node the closest node of the other tree is tested; the trees join when it
/// is within `connect_threshold` and the joining edge is free.
pub fn plan_ik_rrt(
    problem: &PlanningProblem,
    target_q: &Configuration,
    grasp_pose: Option<&Transform>,
    params: &PlannerParams,
) -> Result<PlanResult, PlanError> {
    plan_ik_rrt_detailed(problem, target_q, grasp_pose, params).map(|d| d.result)
}

pub fn plan_ik_rrt_detailed(
    problem: &PlanningProblem,
    target_q: &Configuration,
    grasp_pose: Option<&Transform>,
    params: &PlannerParams,
) -> Result<DetailedPlan, PlanError> {
    params.validate()?;
    if problem.in_collision(&problem.q_start) {
        return Err(PlanError::StartInCollision);
    }
    if problem.in_collision(target_q) {
        return Err(PlanError::TargetInCollision);
    }
    let budget = Budget::new(params);
    let chain = problem.chain;
    let goal_pose = grasp_pose.copied().unwrap_or_else(|| chain.gripper_pose(target_q));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut trees = [
        Tree::new(problem.q_start, chain.gripper_pose(&problem.q_start)),
        Tree::new(*target_q, chain.gripper_pose(target_q)),
    ];
    let mut best_dist = pose_distance(&trees[0].node(0).pose, &goal_pose);
    let mut iterations = 0u64;

    let mut meeting = if problem.q_start.max_joint_delta(target_q) <= 1e-12 {
        Some(Meeting {
            start_node: 0,
            goal_node: 0,
        })
    } else {
        try_connect(&trees, problem, params, 0, 0)
    };

    while meeting.is_none() && !budget.exhausted(iterations) {
        iterations += 1;
        let q_rand = if rng.random::<f64>() < params.p_goal {
            *target_q
        } else {
            chain.random_configuration(&mut rng)
        };
        'grow: for side in 0..2 {
            let mut from = trees[side].nearest(&q_rand);
            loop {
                let out = extend(&mut trees[side], problem, from, &q_rand, params.epsilon, params.edge_step());
                let new = match out {
                    ExtendOutcome::Advanced(i) => i,
                    ExtendOutcome::Reached(i) if i != from => i,
                    _ => break,
                };
                if side == 0 {
                    best_dist = best_dist.min(pose_distance(&trees[0].node(new).pose, &goal_pose));
                }
                let other = trees[1 - side].nearest(&trees[side].node(new).q);
                let (s, g) = if side == 0 { (new, other) } else { (other, new) };
                if let Some(m) = try_connect(&trees, problem, params, s, g) {
                    meeting = Some(m);
                    break 'grow;
                }
                if matches!(out, ExtendOutcome::Reached(_)) {
                    break;
                }
                from = new;
            }
        }
    }

    let result = match meeting {
        Some(m) => {
            let mut path = trees[0].path_to(m.start_node);
            let mut back = trees[1].path_to(m.goal_node);
            back.reverse();
            if path.last().is_some_and(|q| back.first().is_some_and(|b| q.max_joint_delta(b) <= 1e-12)) {
                back.remove(0);
            }
            path.extend(back);
            PlanResult {
                success: true,
                path,
                grasp_index: None,
                time_s: budget.elapsed(),
                iterations,
                final_distance: pose_distance(&trees[1].node(0).pose, &goal_pose),
            }
        }
        None => PlanResult {
            success: false,
            path: Vec::new(),
            grasp_index: None,
            time_s: budget.elapsed(),
            iterations,
            final_distance: best_dist,
        },
    };
    Ok(DetailedPlan {
        result,
        trees: trees.into(),
    })
}

fn try_connect(
    trees: &[Tree; 2],
    problem: &PlanningProblem,
    params: &PlannerParams,
    start_node: usize,
    goal_node: usize,
) -> Option<Meeting> {
    let a = &trees[0].node(start_node).q;
    let b = &trees[1].node(goal_node).q;
    (a.distance(b) <= params.connect_threshold()
        && problem.scene.edge_collision_free(problem.chain, a, b, params.edge_step()))
    .then_some(Meeting {
        start_node,
        goal_node,
    })
}
