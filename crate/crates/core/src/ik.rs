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

//! Damped-least-squares inverse kinematics with null-space posture control.
//!
//! Each iteration takes
//! `Δq = Jᵀ(JJᵀ + λ²I)⁻¹ e + k_ns (I − J⁺J)(q_rest − q)`,
//! clamps every joint's change to the step clamp, and clamps `q` to the joint
//! limits. Joints already on a limit and pushed outward are locked for that
//! step. `e` is the SI task error (m, rad); convergence is judged with
//! [`pose_distance`] instead.

use nalgebra::{SMatrix, SVector, Vector6};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::CollisionScene;
use crate::geometry::{pose_distance, task_error, Transform};
use crate::grasping::GraspSet;
use crate::par::{derive_seed, Execution};
use crate::robot::{Configuration, Jacobian, KinematicChain, DOF};

/// Singular values below this are treated as zero in the null-space projector.
const PINV_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkParams {
    /// Damping λ.
    pub damping: f64,
    /// Null-space gain k_ns toward the rest posture.
    pub null_space_gain: f64,
    pub max_iterations: usize,
    /// Success when `pose_distance(FK(q), target)` is at most this.
    pub threshold: f64,
    /// Largest per-joint change in one iteration.
    pub step_clamp: f64,
    /// Attempts per target; attempts after the first start from random configurations.
    pub restarts: usize,
}

impl Default for IkParams {
    fn default() -> Self {
        Self {
            damping: 0.1,
            null_space_gain: 0.05,
            max_iterations: 300,
            threshold: 1.0,
            step_clamp: 0.1,
            restarts: 1,
        }
    }
}

impl IkParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.damping > 0.0) {
            return Err("damping must be positive".into());
        }
        if !(self.null_space_gain >= 0.0) {
            return Err("null-space gain must be non-negative".into());
        }
        if !(self.threshold > 0.0) || !(self.step_clamp > 0.0) {
            return Err("threshold and step clamp must be positive".into());
        }
        if self.restarts == 0 {
            return Err("at least one attempt is required".into());
        }
        Ok(())
    }
}

/// Outcome of one solver run, kept for diagnostics and property checks.
#[derive(Debug, Clone, PartialEq)]
pub struct IkTrace {
    pub q: Configuration,
    pub converged: bool,
    pub iterations: usize,
    pub initial_distance: f64,
    pub final_distance: f64,
}

/// Damped pseudo-inverse `Jᵀ(JJᵀ + λ²I)⁻¹`.
pub fn damped_pseudo_inverse(j: &Jacobian, damping: f64) -> SMatrix<f64, DOF, 6> {
    let jjt = j * j.transpose() + SMatrix::<f64, 6, 6>::identity() * (damping * damping);
    let inv = jjt
        .cholesky()
        .map(|c| c.inverse())
        .expect("JJᵀ + λ²I is positive definite for λ > 0");
    j.transpose() * inv
}

fn null_space_projector(j: &Jacobian) -> SMatrix<f64, DOF, DOF> {
    let pinv = j
        .pseudo_inverse(PINV_EPS)
        .expect("pseudo-inverse with non-negative epsilon");
    SMatrix::<f64, DOF, DOF>::identity() - pinv * j
}

/// One solver step. Joints sitting on a limit that the step would push further
/// out are locked (their Jacobian columns removed) and the step is recomputed,
/// so the null-space term stays inside the null space of the free joints.
fn limited_step(
    chain: &KinematicChain,
    jac: &Jacobian,
    e: &Vector6<f64>,
    q: &Configuration,
    q_rest: &Configuration,
    params: &IkParams,
) -> SVector<f64, DOF> {
    let lower = chain.lower_limits();
    let upper = chain.upper_limits();
    let mut free = SVector::<f64, DOF>::repeat(1.0);
    let mut dq = SVector::<f64, DOF>::zeros();
    for _ in 0..=DOF {
        let select = SMatrix::<f64, DOF, DOF>::from_diagonal(&free);
        let j_free = jac * select;
        dq = select * damped_pseudo_inverse(&j_free, params.damping) * e;
        if params.null_space_gain > 0.0 {
            dq += select * null_space_projector(&j_free) * select * (q_rest.0 - q.0) * params.null_space_gain;
        }
        let mut locked_any = false;
        for i in 0..DOF {
            let pushing_out = (q[i] <= lower[i] && dq[i] < 0.0) || (q[i] >= upper[i] && dq[i] > 0.0);
            if free[i] > 0.0 && pushing_out {
                free[i] = 0.0;
                locked_any = true;
            }
        }
        if !locked_any {
            break;
        }
    }
    dq.map(|v| v.clamp(-params.step_clamp, params.step_clamp))
}

/// Runs the solver from `q_init`, pulling toward `q_rest` in the null space, and reports the final iterate.
pub fn solve_ik_traced(
    chain: &KinematicChain,
    target: &Transform,
    q_init: &Configuration,
    q_rest: &Configuration,
    params: &IkParams,
) -> IkTrace {
    let mut q = *q_init;
    let (mut jac, mut pose) = chain.jacobian_and_pose(&q);
    let initial_distance = pose_distance(&pose, target);
    let mut dist = initial_distance;
    let mut iterations = 0;
    while dist > params.threshold && iterations < params.max_iterations {
        let e = task_error(&pose, target);
        let dq = limited_step(chain, &jac, &e, &q, q_rest, params);
        q = chain.clamp_to_limits(&Configuration(q.0 + dq));
        (jac, pose) = chain.jacobian_and_pose(&q);
        dist = pose_distance(&pose, target);
        iterations += 1;
    }
    IkTrace {
        q,
        converged: dist <= params.threshold,
        iterations,
        initial_distance,
        final_distance: dist,
    }
}

/// Single attempt from `q_init`, which is also the rest posture. No collision checks.
pub fn solve_ik(
    chain: &KinematicChain,
    target: &Transform,
    q_init: &Configuration,
    params: &IkParams,
) -> Option<Configuration> {
    let trace = solve_ik_traced(chain, target, q_init, q_init, params);
    trace.converged.then_some(trace.q)
}

/// One entry of the IK solution set.
#[derive(Debug, Clone, PartialEq)]
pub struct IkSolution {
    pub q: Configuration,
    pub score: f64,
    pub grasp_index: usize,
}

/// Collision-free IK solutions for a grasp set, in grasp order.
#[derive(Debug, Clone, PartialEq)]
pub struct IkSolutionSet {
    pub scenario_id: String,
    pub solutions: Vec<IkSolution>,
}

impl IkSolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Solves every grasp from `q_start` and keeps solutions that are inside the
/// limits and free in `scene`. Extra attempts (when `params.restarts > 1`) start
/// from random configurations drawn from a stream keyed by `seed` and the grasp index.
#[allow(clippy::too_many_arguments)]
pub fn compute_ik_set(
    chain: &KinematicChain,
    scene: &CollisionScene,
    grasps: &GraspSet,
    q_start: &Configuration,
    params: &IkParams,
    scenario_id: &str,
    seed: u64,
    exec: Execution,
) -> IkSolutionSet {
    let solved = exec.map_range(grasps.len(), |i| {
        solve_for_grasp(chain, scene, &grasps.grasps[i].pose, q_start, params, seed, i)
    });
    let solutions = solved
        .into_iter()
        .enumerate()
        .filter_map(|(grasp_index, q)| {
            q.map(|q| IkSolution {
                q,
                score: grasps.grasps[grasp_index].score,
                grasp_index,
            })
        })
        .collect();
    IkSolutionSet {
        scenario_id: scenario_id.to_string(),
        solutions,
    }
}

fn solve_for_grasp(
    chain: &KinematicChain,
    scene: &CollisionScene,
    target: &Transform,
    q_start: &Configuration,
    params: &IkParams,
    seed: u64,
    index: usize,
) -> Option<Configuration> {
    let accept = |q: Configuration| chain.within_limits(&q) && !scene.config_in_collision(chain, &q);
    let first = solve_ik_traced(chain, target, q_start, q_start, params);
    if first.converged && accept(first.q) {
        return Some(first.q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, index as u64]));
    for _ in 1..params.restarts {
        let init = chain.random_configuration(&mut rng);
        let trace = solve_ik_traced(chain, target, &init, q_start, params);
        if trace.converged && accept(trace.q) {
            return Some(trace.q);
        }
    }
    None
}
