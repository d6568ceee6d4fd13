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
use reachgrasp::geometry::pose_distance;
use reachgrasp::ik::{solve_ik, solve_ik_traced, IkParams};
use reachgrasp::robot::{ready_configuration, KinematicChain};

#[test]
fn random_reachable_targets() {
    let chain = KinematicChain::builtin();
    let params = IkParams::default();
    let home = ready_configuration();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut ok = 0;
    for _ in 0..100 {
        let target = chain.gripper_pose(&chain.random_configuration(&mut rng));
        if let Some(q) = solve_ik(&chain, &target, &home, &params) {
            assert!(chain.within_limits(&q));
            assert!(pose_distance(&chain.gripper_pose(&q), &target) <= params.threshold);
            ok += 1;
        }
    }
    println!("reached {ok}/100");
    assert!(ok >= 90, "only {ok}/100 random targets reached");
}

#[test]
fn residual_never_grows_on_success() {
    let chain = KinematicChain::builtin();
    let home = ready_configuration();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let target = chain.gripper_pose(&chain.random_configuration(&mut rng));
        let trace = solve_ik_traced(&chain, &target, &home, &home, &IkParams::default());
        if trace.converged {
            assert!(trace.final_distance <= trace.initial_distance);
        }
    }
}

#[test]
fn null_space_term_keeps_solutions_near_rest() {
    let chain = KinematicChain::builtin();
    let rest = ready_configuration();
    let with = IkParams::default();
    let without = IkParams {
        null_space_gain: 0.0,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut trials, mut preferred) = (0, 0);
    while trials < 50 {
        // Targets a short distance from the rest posture.
        let mut q = rest;
        for i in 0..9 {
            q[i] += rng.random_range(-0.3..0.3);
        }
        let q = chain.clamp_to_limits(&q);
        let target = chain.gripper_pose(&q);
        let (Some(a), Some(b)) = (
            solve_ik(&chain, &target, &rest, &with),
            solve_ik(&chain, &target, &rest, &without),
        ) else {
            continue;
        };
        trials += 1;
        if a.distance(&rest) <= b.distance(&rest) + 1e-3 {
            preferred += 1;
        }
    }
    println!("null-space preference {preferred}/{trials}");
    assert!(preferred * 10 >= trials * 8);
}
