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

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use reachgrasp::geometry::pose_distance;
use reachgrasp::grasping::{generate_grasp_set, gripper_mesh, GraspSet, SamplerParams};
use reachgrasp::ik::{compute_ik_set, IkParams, IkSolutionSet};
use reachgrasp::par::Execution;
use reachgrasp::planners::{
    plan_ik_rrt, plan_ik_rrt_detailed, plan_jplus_rrt, plan_jplus_rrt_detailed, validate_plan, validate_tree,
    GoalSampler, PlanResult, PlannerParams, PlanningProblem,
};
use reachgrasp::robot::KinematicChain;
use reachgrasp::scenario::{generate_scenario, Family, Scenario};

struct Fixture {
    scenario: Scenario,
    chain: KinematicChain,
    grasps: GraspSet,
    ik: IkSolutionSet,
}

fn fixture() -> Fixture {
    let robot = KinematicChain::builtin();
    let scenario = generate_scenario(Family::UnderTable, 1, Family::UnderTable.default_schedule()[0], None);
    let chain = scenario.chain(&robot);
    let scene = scenario.scene();
    let params = SamplerParams {
        raw_budget: 4000,
        output_size: 60,
        ..Default::default()
    };
    let grasps = generate_grasp_set(&scenario.grasp_target(), &scene, &gripper_mesh(), &params, 11, Execution::Parallel)
        .unwrap();
    let ik = compute_ik_set(&chain, &scene, &grasps, &scenario.q_start, &IkParams::default(), &scenario.id, 11, Execution::Parallel);
    assert!(!ik.is_empty(), "fixture needs at least one IK solution");
    Fixture {
        scenario,
        chain,
        grasps,
        ik,
    }
}

fn budget(iterations: u64, seed: u64) -> PlannerParams {
    PlannerParams {
        max_time: 1e6,
        max_iterations: Some(iterations),
        seed,
        ..Default::default()
    }
}

fn same_run(a: &PlanResult, b: &PlanResult) -> bool {
    a.success == b.success
        && a.path == b.path
        && a.grasp_index == b.grasp_index
        && a.iterations == b.iterations
        && a.final_distance == b.final_distance
}

#[test]
fn fixed_seed_and_budget_repeat_exactly() {
    let f = fixture();
    let scene = f.scenario.scene();
    let problem = PlanningProblem::new(&f.chain, &scene, f.scenario.q_start);
    let target = &f.ik.solutions[0];
    for seed in [1, 2, 3] {
        let p = budget(300, seed);
        let a = plan_jplus_rrt(&problem, &f.grasps, &p).unwrap();
        let b = plan_jplus_rrt(&problem, &f.grasps, &p).unwrap();
        assert!(same_run(&a, &b), "J+ seed {seed}");
        let pose = f.grasps.grasps[target.grasp_index].pose;
        let a = plan_ik_rrt(&problem, &target.q, Some(&pose), &p).unwrap();
        let b = plan_ik_rrt(&problem, &target.q, Some(&pose), &p).unwrap();
        assert!(same_run(&a, &b), "IK-RRT seed {seed}");
    }
}

#[test]
fn grown_trees_are_valid() {
    let f = fixture();
    let scene = f.scenario.scene();
    let problem = PlanningProblem::new(&f.chain, &scene, f.scenario.q_start);
    let target = &f.ik.solutions[0];
    let pose = f.grasps.grasps[target.grasp_index].pose;
    for seed in 0..4 {
        let p = budget(400, seed);
        let runs = [
            (plan_jplus_rrt_detailed(&problem, &f.grasps, &p).unwrap(), None),
            (plan_ik_rrt_detailed(&problem, &target.q, Some(&pose), &p).unwrap(), Some(pose)),
        ];
        for (plan, goal) in &runs {
            for tree in &plan.trees {
                assert!(validate_tree(&problem, tree, &p).is_empty(), "seed {seed}");
            }
            let goal = goal.or_else(|| plan.result.grasp_index.map(|g| f.grasps.grasps[g].pose));
            let v = validate_plan(&problem, &plan.result, goal.as_ref(), &p);
            assert!(v.is_empty(), "seed {seed}: {v:?}");
        }
    }
}

#[test]
fn reported_distance_is_the_tree_minimum() {
    let f = fixture();
    let scene = f.scenario.scene();
    let problem = PlanningProblem::new(&f.chain, &scene, f.scenario.q_start);
    for seed in 0..4 {
        let p = budget(150, seed);
        let plan = plan_jplus_rrt_detailed(&problem, &f.grasps, &p).unwrap();
        let tree = &plan.trees[0];
        // Recompute poses from configurations rather than trusting the cache.
        let brute = tree
            .nodes()
            .iter()
            .flat_map(|n| {
                let pose = f.chain.gripper_pose(&n.q);
                f.grasps.grasps.iter().map(move |g| pose_distance(&pose, &g.pose))
            })
            .fold(f64::INFINITY, f64::min);
        assert!(
            (plan.result.final_distance - brute).abs() <= 1e-9,
            "seed {seed}: {} vs {brute}",
            plan.result.final_distance
        );
        assert_eq!(plan.result.success, brute <= p.d_goal);
    }
}

#[test]
fn success_is_monotone_in_the_iteration_budget() {
    let f = fixture();
    let scene = f.scenario.scene();
    let problem = PlanningProblem::new(&f.chain, &scene, f.scenario.q_start);
    for seed in 0..6 {
        let mut succeeded = false;
        for n in [25, 50, 100, 200, 400] {
            let r = plan_jplus_rrt(&problem, &f.grasps, &budget(n, seed)).unwrap();
            assert!(r.success || !succeeded, "seed {seed}: success lost at {n} iterations");
            succeeded |= r.success;
        }
    }
}

#[test]
fn score_bias_draws_follow_scores() {
    let scores = [0.9, 0.05, 0.3, 0.0, 0.6, 0.15];
    let total: f64 = scores.iter().sum();
    let n = 100_000;
    let sampler = GoalSampler::new(&scores, true);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut counts = [0usize; 6];
    for _ in 0..n {
        counts[sampler.sample(&mut rng)] += 1;
    }
    for (i, &s) in scores.iter().enumerate() {
        let p = s / total;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let dev = (counts[i] as f64 - n as f64 * p).abs();
        assert!(dev <= 3.0 * sigma, "goal {i}: {} draws, expected {}", counts[i], n as f64 * p);
    }
    assert_eq!(counts[3], 0);

    let uniform = GoalSampler::new(&scores, false);
    let mut counts = [0usize; 6];
    for _ in 0..n {
        counts[uniform.sample(&mut rng)] += 1;
    }
    let p = 1.0 / 6.0;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    assert!(counts.iter().all(|&c| (c as f64 - n as f64 * p).abs() <= 3.0 * sigma), "{counts:?}");
}
