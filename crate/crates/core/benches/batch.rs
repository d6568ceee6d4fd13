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

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use reachgrasp::grasping::{generate_grasp_set, gripper_mesh, SamplerParams};
use reachgrasp::ik::{compute_ik_set, IkParams};
use reachgrasp::par::Execution;
use reachgrasp::robot::KinematicChain;
use reachgrasp::scenario::{generate_scenario, Family};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn grasp_sampling(c: &mut Criterion) {
    let scenario = generate_scenario(Family::NarrowOpening, 1, Family::NarrowOpening.default_schedule()[0], None);
    let (target, scene, gripper) = (scenario.grasp_target(), scenario.scene(), gripper_mesh());
    let params = SamplerParams {
        raw_budget: 5000,
        output_size: 100,
        ..Default::default()
    };
    let mut group = c.benchmark_group("grasp_set");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_grasp_set(&target, &scene, &gripper, black_box(&params), 1, exec).unwrap())
        });
    }
    group.finish();
}

fn ik_sets(c: &mut Criterion) {
    let robot = KinematicChain::builtin();
    let scenario = generate_scenario(Family::NarrowOpening, 1, Family::NarrowOpening.default_schedule()[0], None);
    let (chain, scene) = (scenario.chain(&robot), scenario.scene());
    let grasps = generate_grasp_set(
        &scenario.grasp_target(),
        &scene,
        &gripper_mesh(),
        &SamplerParams::default(),
        1,
        Execution::Parallel,
    )
    .unwrap();
    let params = IkParams::default();
    let mut group = c.benchmark_group("ik_set");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| compute_ik_set(&chain, &scene, black_box(&grasps), &scenario.q_start, &params, &scenario.id, 1, exec))
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = grasp_sampling, ik_sets
}
criterion_main!(benches);
