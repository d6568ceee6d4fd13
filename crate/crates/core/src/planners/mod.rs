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

//! The two baseline planners and their shared tree machinery.
//!
//! * J⁺-RRT grows one tree from the start and steers toward task-space grasp
//!   poses with the Jacobian pseudo-inverse.
//! * IK-RRT grows a tree from each end of a configuration-space query and
//!   joins them.
//!
//! Both use per-joint steps of at most `epsilon` and check edges at
//! `edge_step` (ε/2 by default).

mod ikrrt;
mod jplus;
mod nn;
mod path;
mod tree;
mod validate;

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use ikrrt::{plan_ik_rrt, plan_ik_rrt_detailed};
pub use jplus::{jplus_extend, plan_jplus_rrt, plan_jplus_rrt_detailed, JplusOutcome};
pub use path::{PathFile, PATH_FORMAT};
pub use tree::{extend, ExtendOutcome, Node, Tree};
pub use validate::{validate_plan, validate_tree, Violation};

use crate::collision::CollisionScene;
use crate::error::PlanError;
use crate::geometry::{pose_distance, Transform};
use crate::robot::{Configuration, KinematicChain};

/// Which baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Planner {
    #[serde(rename = "jplus-rrt")]
    JPlusRrt,
    #[serde(rename = "ik-rrt")]
    IkRrt,
}

impl Planner {
    pub const ALL: [Planner; 2] = [Planner::JPlusRrt, Planner::IkRrt];

    pub fn name(self) -> &'static str {
        match self {
            Planner::JPlusRrt => "jplus-rrt",
            Planner::IkRrt => "ik-rrt",
        }
    }
}

impl std::fmt::Display for Planner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Planner {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jplus-rrt" | "jplus" | "j+rrt" => Ok(Planner::JPlusRrt),
            "ik-rrt" | "ik" => Ok(Planner::IkRrt),
            other => Err(format!("unknown planner \"{other}\" (expected jplus-rrt or ik-rrt)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    /// Largest per-joint change in one tree extension (m or rad).
    pub epsilon: f64,
    /// Probability of steering toward a goal instead of a uniform sample.
    pub p_goal: f64,
    /// Task-space termination distance, in `pose_distance` units.
    pub d_goal: f64,
    /// Wall-clock budget, seconds.
    pub max_time: f64,
    pub seed: u64,
    /// J⁺-RRT: pick goals proportionally to grasp score.
    pub score_bias: bool,
    /// IK-RRT: configuration-space distance at which the trees are joined; ε when unset.
    pub connect_threshold: Option<f64>,
    /// Edge collision resolution; ε/2 when unset.
    pub edge_step: Option<f64>,
    /// Optional cap on random samples, for runs that must not depend on wall time.
    pub max_iterations: Option<u64>,
    /// J⁺ extension stops when one step gains less than this.
    pub stall_progress: f64,
    /// J⁺ extension stops after this many accepted steps.
    pub stall_steps: usize,
    /// Damping of the J⁺ pseudo-inverse.
    pub damping: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            p_goal: 0.01,
            d_goal: 50.0,
            max_time: 120.0,
            seed: 0,
            score_bias: false,
            connect_threshold: None,
            edge_step: None,
            max_iterations: None,
            stall_progress: 0.1,
            stall_steps: 200,
            damping: 0.1,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::Params(m.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(0.0..=1.0).contains(&self.p_goal) {
            return bad("p_goal must lie in [0, 1]");
        }
        if !(self.d_goal > 0.0) {
            return bad("d_goal must be positive");
        }
        if !(self.max_time > 0.0) {
            return bad("max_time must be positive");
        }
        if self.connect_threshold.is_some_and(|c| !(c > 0.0)) {
            return bad("connect threshold must be positive");
        }
        if self.edge_step.is_some_and(|s| !(s > 0.0)) {
            return bad("edge step must be positive");
        }
        if !(self.damping > 0.0) || !(self.stall_progress >= 0.0) || self.stall_steps == 0 {
            return bad("damping must be positive, stall progress non-negative and stall steps at least 1");
        }
        Ok(())
    }

    pub fn edge_step(&self) -> f64 {
        self.edge_step.unwrap_or(self.epsilon / 2.0)
    }

    pub fn connect_threshold(&self) -> f64 {
        self.connect_threshold.unwrap_or(self.epsilon)
    }
}

/// Robot, scene and start configuration shared by all planners.
#[derive(Debug, Clone, Copy)]
pub struct PlanningProblem<'a> {
    pub chain: &'a KinematicChain,
    pub scene: &'a CollisionScene,
    pub q_start: Configuration,
}

impl<'a> PlanningProblem<'a> {
    pub fn new(chain: &'a KinematicChain, scene: &'a CollisionScene, q_start: Configuration) -> Self {
        Self {
            chain,
            scene,
            q_start,
        }
    }

    pub fn in_collision(&self, q: &Configuration) -> bool {
        self.scene.config_in_collision(self.chain, q)
    }

    pub(crate) fn edge_free_from(&self, q_a: &Configuration, q_b: &Configuration, step: f64) -> bool {
        self.scene.edge_free_from(self.chain, q_a, q_b, step)
    }
}

/// Outcome of one planner run.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub success: bool,
    /// Start to goal; empty on failure.
    pub path: Vec<Configuration>,
    /// Grasp whose pose the path end reaches.
    pub grasp_index: Option<usize>,
    pub time_s: f64,
    /// Random samples drawn (uniform or goal).
    pub iterations: u64,
    /// Best task-space distance to a goal grasp seen during the run.
    pub final_distance: f64,
}

impl PlanResult {
    /// Sum of Euclidean segment lengths in configuration space.
    pub fn path_length(&self) -> f64 {
        self.path.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

/// A run together with the trees it grew, for independent validation.
#[derive(Debug, Clone)]
pub struct DetailedPlan {
    pub result: PlanResult,
    pub trees: Vec<Tree>,
}

/// Goal grasp poses with their nearest-goal query.
#[derive(Debug, Clone)]
pub struct GoalSet {
    poses: Vec<Transform>,
}

impl GoalSet {
    pub fn new(poses: Vec<Transform>) -> Self {
        Self { poses }
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn pose(&self, i: usize) -> &Transform {
        &self.poses[i]
    }

    /// Closest goal to `pose` and its distance, lowest index on ties.
    pub fn closest(&self, pose: &Transform) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, g) in self.poses.iter().enumerate() {
            // Translation alone bounds the distance from below.
            let lower = 1000.0 * (g.translation - pose.translation).norm();
            if lower >= best.1 {
                continue;
            }
            let d = pose_distance(pose, g);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

/// Picks goal indices uniformly, or proportionally to score.
#[derive(Debug, Clone)]
pub struct GoalSampler {
    n: usize,
    weighted: Option<WeightedIndex<f64>>,
}

impl GoalSampler {
    /// Falls back to uniform when biasing is off or every score is zero.
    pub fn new(scores: &[f64], score_bias: bool) -> Self {
        let weighted = if score_bias {
            WeightedIndex::new(scores.iter().map(|s| s.max(0.0))).ok()
        } else {
            None
        };
        Self {
            n: scores.len(),
            weighted,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.weighted {
            Some(w) => w.sample(rng),
            None => rng.random_range(0..self.n),
        }
    }
}

/// Wall-clock and iteration budget.
pub(crate) struct Budget {
    start: Instant,
    max_time: f64,
    max_iterations: Option<u64>,
}

impl Budget {
    pub(crate) fn new(params: &PlannerParams) -> Self {
        Self {
            start: Instant::now(),
            max_time: params.max_time,
            max_iterations: params.max_iterations,
        }
    }

    pub(crate) fn exhausted(&self, iterations: u64) -> bool {
        self.max_iterations.is_some_and(|m| iterations >= m) || self.elapsed() >= self.max_time
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}
