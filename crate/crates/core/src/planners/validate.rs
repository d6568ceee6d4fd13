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

//! Independent re-checks of planner output.
//!
//! Edges are re-sampled here and tested configuration by configuration, without
//! the planners' edge routine. The sample set is the one that defines edge
//! validity: `2^m` equal segments, the fewest with no joint moving more than
//! `step` between samples. Both directions are walked.

use std::fmt;

use super::{PlanResult, PlannerParams, PlanningProblem, Tree};
use crate::geometry::{pose_distance, Transform};
use crate::robot::{interpolate, Configuration};

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyPath,
    PathOnFailure,
    StartMismatch,
    OutOfLimits { index: usize },
    StepTooLarge { index: usize, delta: f64 },
    EdgeInCollision { index: usize },
    GoalTooFar { distance: f64 },
    DistanceMismatch { reported: f64, recomputed: f64 },
    BadParent { index: usize },
    PoseMismatch { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPath => write!(f, "successful run with an empty path"),
            Violation::PathOnFailure => write!(f, "failed run carries a path"),
            Violation::StartMismatch => write!(f, "path does not begin at the start configuration"),
            Violation::OutOfLimits { index } => write!(f, "configuration {index} violates joint limits"),
            Violation::StepTooLarge { index, delta } => {
                write!(f, "step {index} moves a joint by {delta:.6} (more than epsilon)")
            }
            Violation::EdgeInCollision { index } => write!(f, "edge {index} collides"),
            Violation::GoalTooFar { distance } => {
                write!(f, "final gripper pose is {distance:.3} from the goal (more than d_goal)")
            }
            Violation::DistanceMismatch {
                reported,
                recomputed,
            } => write!(f, "reported final distance {reported} but recomputed {recomputed}"),
            Violation::BadParent { index } => write!(f, "node {index} has an invalid parent"),
            Violation::PoseMismatch { index } => write!(f, "node {index} caches a stale gripper pose"),
        }
    }
}

fn edge_free(problem: &PlanningProblem, q_a: &Configuration, q_b: &Configuration, step: f64) -> bool {
    let mut n = 1usize;
    while q_a.max_joint_delta(q_b) / n as f64 > step {
        n *= 2;
    }
    let free = |from: &Configuration, to: &Configuration| {
        (0..=n).all(|k| {
            let q = interpolate(from, to, k as f64 / n as f64).expect("t in [0, 1]");
            !problem.in_collision(&q)
        })
    };
    free(q_a, q_b) && free(q_b, q_a)
}

fn check_edge(
    problem: &PlanningProblem,
    params: &PlannerParams,
    index: usize,
    a: &Configuration,
    b: &Configuration,
    out: &mut Vec<Violation>,
) {
    let delta = a.max_joint_delta(b);
    if delta > params.epsilon + TOL {
        out.push(Violation::StepTooLarge { index, delta });
    }
    if !edge_free(problem, a, b, params.edge_step()) {
        out.push(Violation::EdgeInCollision { index });
    }
}

/// Checks a [`PlanResult`] against the planner contract. `goal` is the grasp pose
/// the run claims to reach. An empty list means the result is valid.
pub fn validate_plan(
    problem: &PlanningProblem,
    result: &PlanResult,
    goal: Option<&Transform>,
    params: &PlannerParams,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if !result.success {
        if !result.path.is_empty() {
            out.push(Violation::PathOnFailure);
        }
        return out;
    }
    let Some(first) = result.path.first() else {
        out.push(Violation::EmptyPath);
        return out;
    };
    if first.max_joint_delta(&problem.q_start) > TOL {
        out.push(Violation::StartMismatch);
    }
    for (i, q) in result.path.iter().enumerate() {
        if !q.is_finite() || !problem.chain.within_limits(q) {
            out.push(Violation::OutOfLimits { index: i });
        }
    }
    if result.path.len() == 1 && problem.in_collision(first) {
        out.push(Violation::EdgeInCollision { index: 0 });
    }
    for (i, w) in result.path.windows(2).enumerate() {
        check_edge(problem, params, i, &w[0], &w[1], &mut out);
    }
    if let Some(goal) = goal {
        let last = result.path.last().expect("non-empty");
        let d = pose_distance(&problem.chain.gripper_pose(last), goal);
        if d > params.d_goal {
            out.push(Violation::GoalTooFar { distance: d });
        }
        if (d - result.final_distance).abs() > 1e-9 {
            out.push(Violation::DistanceMismatch {
                reported: result.final_distance,
                recomputed: d,
            });
        }
    }
    out
}

/// Checks tree structure, step sizes, edge validity and cached poses.
pub fn validate_tree(problem: &PlanningProblem, tree: &Tree, params: &PlannerParams) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, node) in tree.nodes().iter().enumerate() {
        if !problem.chain.gripper_pose(&node.q).approx_eq(&node.pose, 1e-9) {
            out.push(Violation::PoseMismatch { index: i });
        }
        match (i, node.parent) {
            (0, None) => {
                if problem.in_collision(&node.q) {
                    out.push(Violation::EdgeInCollision { index: 0 });
                }
            }
            (_, Some(p)) if p < i => {
                check_edge(problem, params, i, &tree.node(p).q, &node.q, &mut out);
            }
            _ => out.push(Violation::BadParent { index: i }),
        }
    }
    out
}
