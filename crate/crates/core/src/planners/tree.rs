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

use crate::geometry::Transform;
use crate::robot::Configuration;

use super::nn::NearestIndex;
use super::PlanningProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub q: Configuration,
    /// `None` only for the root.
    pub parent: Option<usize>,
    /// Gripper pose at `q`, cached for task-space queries.
    pub pose: Transform,
}

/// Search tree over configurations. Nodes are only appended, so a parent
/// index is always smaller than its child's.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    index: NearestIndex,
}

impl Tree {
    pub fn new(root: Configuration, pose: Transform) -> Self {
        let mut index = NearestIndex::default();
        index.push(root.0.into());
        Self {
            nodes: vec![Node {
                q: root,
                parent: None,
                pose,
            }],
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn push(&mut self, q: Configuration, parent: usize, pose: Transform) -> usize {
        assert!(parent < self.nodes.len(), "parent index out of range");
        self.nodes.push(Node {
            q,
            parent: Some(parent),
            pose,
        });
        self.index.push(q.0.into());
        self.nodes.len() - 1
    }

    /// Index of the node closest to `q` in Euclidean distance, lowest index on ties.
    pub fn nearest(&self, q: &Configuration) -> usize {
        self.index.nearest(&q.0.into()).expect("tree has a root")
    }

    /// Node whose gripper pose is closest to `target` under `pose_distance`, with that distance.
    pub fn nearest_pose(&self, target: &Transform) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, n) in self.nodes.iter().enumerate() {
            if 1000.0 * (n.pose.translation - target.translation).norm() >= best.1 {
                continue;
            }
            let d = crate::geometry::pose_distance(&n.pose, target);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Configurations from the root to node `i`, inclusive.
    pub fn path_to(&self, i: usize) -> Vec<Configuration> {
        let mut out = Vec::new();
        let mut cur = Some(i);
        while let Some(c) = cur {
            out.push(self.nodes[c].q);
            cur = self.nodes[c].parent;
        }
        out.reverse();
        out
    }
}

/// Result of one straight-line extension step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendOutcome {
    /// A node was added short of the target.
    Advanced(usize),
    /// The node at this index equals the target (it may be the start node itself).
    Reached(usize),
    Trapped,
}

/// One step from node `from` toward `q_target`, each joint moving at most `epsilon`.
pub fn extend(
    tree: &mut Tree,
    problem: &PlanningProblem,
    from: usize,
    q_target: &Configuration,
    epsilon: f64,
    edge_step: f64,
) -> ExtendOutcome {
    let q_from = tree.node(from).q;
    let delta = q_target.0 - q_from.0;
    if delta.amax() <= 1e-12 {
        return ExtendOutcome::Reached(from);
    }
    let reaches = delta.amax() <= epsilon;
    let q_new = if reaches {
        *q_target
    } else {
        Configuration(q_from.0 + delta.map(|d| d.clamp(-epsilon, epsilon)))
    };
    if !problem.edge_free_from(&q_from, &q_new, edge_step) {
        return ExtendOutcome::Trapped;
    }
    let pose = problem.chain.gripper_pose(&q_new);
    let idx = tree.push(q_new, from, pose);
    if reaches {
        ExtendOutcome::Reached(idx)
    } else {
        ExtendOutcome::Advanced(idx)
    }
}
