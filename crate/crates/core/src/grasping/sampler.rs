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

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_grasp_poses_with_phase, grasp_score, is_antipodal, ContactPair, Grasp, GraspSet, SamplerParams};
use crate::collision::CollisionScene;
use crate::error::GraspError;
use crate::geometry::{pose_distance, IndexedMesh, Ray, Transform};
use crate::par::{derive_seed, Execution};

/// First contacts drawn per independently seeded chunk.
const CHUNK_POINTS: usize = 32;
/// Chunks generated per parallel round.
const CHUNKS_PER_ROUND: usize = 16;
const SUBSAMPLE_STREAM: u64 = 0x5B5A_4D50;

/// The object to grasp: its mesh in the object frame and its world pose.
#[derive(Debug, Clone)]
pub struct GraspTarget {
    pub object_id: String,
    pub mesh: IndexedMesh,
    pub pose: Transform,
}

/// Uniform direction inside the cone of half-angle `half_angle` around unit `axis`.
fn sample_cone<R: Rng + ?Sized>(rng: &mut R, axis: &Vector3<f64>, half_angle: f64) -> Vector3<f64> {
    let cos_t = 1.0 - rng.random::<f64>() * (1.0 - half_angle.cos());
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    let helper = if axis.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = axis.cross(&helper).normalize();
    let e2 = axis.cross(&e1);
    axis * cos_t + (e1 * phi.cos() + e2 * phi.sin()) * sin_t
}

/// Samples `n_points` first contacts and shoots `rays_per_point` rays from each
/// into the body inside its friction cone. Exit points forming an antipodal pair
/// no wider than the gripper opening are returned, in sampling order.
pub fn sample_contact_pairs<R: Rng + ?Sized>(
    mesh: &IndexedMesh,
    params: &SamplerParams,
    n_points: usize,
    rng: &mut R,
) -> Result<Vec<ContactPair>, GraspError> {
    let half_angle = params.mu.atan();
    let firsts = mesh.mesh.surface_sample(rng, n_points)?;
    let normals = mesh.mesh.normals();
    let mut pairs = Vec::new();
    for first in firsts {
        let n1 = -first.normal;
        for _ in 0..params.rays_per_point {
            let dir = sample_cone(rng, &n1, half_angle);
            let Some(ray) = Ray::new(first.point, dir) else {
                continue;
            };
            let Some(hit) = mesh.ray_cast(&ray) else {
                continue;
            };
            let pair = ContactPair {
                p1: first.point,
                p2: hit.point,
                n1,
                n2: -normals[hit.triangle],
            };
            if pair.width() <= params.max_opening && is_antipodal(&pair, params.mu) {
                pairs.push(pair);
            }
        }
    }
    Ok(pairs)
}

/// Candidate grasps in the object frame from one seeded chunk of first contacts.
fn chunk_candidates(mesh: &IndexedMesh, params: &SamplerParams, seed: u64, chunk: usize) -> Result<Vec<Grasp>, GraspError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, chunk as u64]));
    let pairs = sample_contact_pairs(mesh, params, CHUNK_POINTS, &mut rng)?;
    let mut out = Vec::with_capacity(pairs.len() * params.approach_directions);
    for pair in pairs {
        let score = grasp_score(&pair);
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        for pose in build_grasp_poses_with_phase(&pair, params.approach_directions, phase) {
            out.push(Grasp {
                pose,
                score,
                contacts: Some(pair),
            });
        }
    }
    Ok(out)
}

/// Full pipeline: sample up to `raw_budget` candidate poses, drop those where the
/// gripper hits the scene, and thin the rest to `output_size` by farthest-point
/// sampling. The result depends only on the inputs and `seed`, not on `exec`.
pub fn generate_grasp_set(
    target: &GraspTarget,
    scene: &CollisionScene,
    gripper: &IndexedMesh,
    params: &SamplerParams,
    seed: u64,
    exec: Execution,
) -> Result<GraspSet, GraspError> {
    params.validate()?;
    let max_chunks = params.raw_budget.div_ceil(CHUNK_POINTS).max(1);
    let mut raw: Vec<Grasp> = Vec::with_capacity(params.raw_budget);
    let mut next_chunk = 0;
    while raw.len() < params.raw_budget && next_chunk < max_chunks {
        let round: Vec<usize> = (next_chunk..(next_chunk + CHUNKS_PER_ROUND).min(max_chunks)).collect();
        next_chunk += round.len();
        for batch in exec.map(&round, |&c| chunk_candidates(&target.mesh, params, seed, c)) {
            raw.extend(batch?);
        }
    }
    raw.truncate(params.raw_budget);
    let raw_count = raw.len();

    let world: Vec<Grasp> = raw
        .into_iter()
        .map(|g| Grasp {
            pose: target.pose.compose(&g.pose),
            score: g.score,
            contacts: g.contacts.map(|c| c.transformed(&target.pose)),
        })
        .collect();
    let keep = exec.map(&world, |g| !scene.gripper_pose_in_collision(gripper, &g.pose, true));
    let survivors: Vec<Grasp> = world
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| k.then_some(g))
        .collect();
    log::debug!(
        "{}: {} raw candidates, {} collision-free",
        target.object_id,
        raw_count,
        survivors.len()
    );
    if survivors.is_empty() {
        return Err(GraspError::NoSurvivors);
    }

    let incomplete = survivors.len() < params.output_size;
    if incomplete {
        log::warn!(
            "{}: only {} collision-free grasps (wanted {})",
            target.object_id,
            survivors.len(),
            params.output_size
        );
    }
    let poses: Vec<Transform> = survivors.iter().map(|g| g.pose).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, SUBSAMPLE_STREAM]));
    let picked = farthest_point_subsample(&poses, params.output_size, &mut rng);
    let grasps = picked.into_iter().map(|i| survivors[i].clone()).collect();
    Ok(GraspSet {
        object_id: target.object_id.clone(),
        seed,
        params: params.clone(),
        grasps,
        incomplete,
    })
}

/// Greedy farthest-point selection under [`pose_distance`].
///
/// The first index is drawn from `rng`; each next one maximizes the distance to
/// the selected set, ties going to the lowest index. Returns all indices when
/// `k ≥ poses.len()`.
pub fn farthest_point_subsample<R: Rng + ?Sized>(poses: &[Transform], k: usize, rng: &mut R) -> Vec<usize> {
    let n = poses.len();
    if k >= n {
        return (0..n).collect();
    }
    if k == 0 {
        return Vec::new();
    }
    let first = rng.random_range(0..n);
    let mut picked = vec![first];
    let mut taken = vec![false; n];
    taken[first] = true;
    let mut nearest: Vec<f64> = poses.iter().map(|p| pose_distance(p, &poses[first])).collect();
    while picked.len() < k {
        let mut best = None;
        for (i, &d) in nearest.iter().enumerate() {
            if taken[i] {
                continue;
            }
            match best {
                Some((_, bd)) if d <= bd => {}
                _ => best = Some((i, d)),
            }
        }
        let (next, _) = best.expect("k < n leaves a candidate");
        picked.push(next);
        taken[next] = true;
        for (i, d) in nearest.iter_mut().enumerate() {
            if !taken[i] {
                *d = d.min(pose_distance(&poses[i], &poses[next]));
            }
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TriangleMesh;
    use crate::grasping::gripper_mesh;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn small_sphere_pairs_are_antipodal_diameters() {
        let mesh = IndexedMesh::new(TriangleMesh::icosphere(0.03, 3));
        let params = SamplerParams::default();
        let pairs = sample_contact_pairs(&mesh, &params, 300, &mut rng(1)).unwrap();
        assert!(pairs.len() > 100);
        let mean = pairs.iter().map(|p| p.width()).sum::<f64>() / pairs.len() as f64;
        for p in &pairs {
            assert!(is_antipodal(p, params.mu));
            assert!(p.width() <= 0.08);
        }
        // A chord at angle θ to the radial normal has length 2r·cos θ. Facet
        // normals of the level-3 icosphere stray a few degrees from radial, so
        // the cone bound is relaxed from 45° to 50°.
        let min_width = 0.06 * 50f64.to_radians().cos();
        assert!(pairs.iter().all(|p| p.width() >= min_width));
        assert!(mean > 0.045, "mean width {mean}");
    }

    #[test]
    fn large_sphere_yields_nothing() {
        let mesh = IndexedMesh::new(TriangleMesh::icosphere(0.1, 3));
        let pairs = sample_contact_pairs(&mesh, &SamplerParams::default(), 300, &mut rng(2)).unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn thin_box_pairs_join_opposite_faces() {
        let mesh = IndexedMesh::new(TriangleMesh::cuboid(Vector3::new(0.015, 0.015, 0.05)));
        let pairs = sample_contact_pairs(&mesh, &SamplerParams::default(), 400, &mut rng(3)).unwrap();
        assert!(!pairs.is_empty());
        // Faces classified by their dominant normal component.
        let face = |n: &Vector3<f64>| {
            let i = n.iamax();
            (i, n[i].signum())
        };
        for p in &pairs {
            let (a, sa) = face(&p.n1);
            let (b, sb) = face(&p.n2);
            assert_eq!(a, b);
            assert_eq!(sa, -sb);
        }
    }

    fn sphere_on_floor() -> (GraspTarget, CollisionScene) {
        let mesh = TriangleMesh::icosphere(0.03, 3);
        let pose = Transform::from_translation(0.5, 0.0, 0.03);
        let mut scene = CollisionScene::empty().with_floor(true);
        scene.set_target(&mesh, &pose, true);
        let target = GraspTarget {
            object_id: "ball".into(),
            mesh: IndexedMesh::new(mesh),
            pose,
        };
        (target, scene)
    }

    #[test]
    fn sphere_on_plane_gives_full_collision_free_set() {
        let (target, scene) = sphere_on_floor();
        let gripper = gripper_mesh();
        let params = SamplerParams {
            raw_budget: 10_000,
            ..Default::default()
        };
        let set = generate_grasp_set(&target, &scene, &gripper, &params, 7, Execution::Parallel).unwrap();
        assert_eq!(set.len(), 200);
        assert!(!set.incomplete);
        for g in &set.grasps {
            assert!((0.0..=1.0).contains(&g.score));
            assert!(!scene.gripper_pose_in_collision(&gripper, &g.pose, true));
            let c = g.contacts.unwrap();
            assert!(is_antipodal(&c, params.mu));
            assert!((g.pose.axis(1).dot(&c.axis()) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_across_execution_modes() {
        let (target, scene) = sphere_on_floor();
        let gripper = gripper_mesh();
        let params = SamplerParams {
            raw_budget: 3_000,
            output_size: 50,
            ..Default::default()
        };
        let a = generate_grasp_set(&target, &scene, &gripper, &params, 11, Execution::Parallel).unwrap();
        let b = generate_grasp_set(&target, &scene, &gripper, &params, 11, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let c = generate_grasp_set(&target, &scene, &gripper, &params, 12, Execution::Parallel).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn enclosed_object_has_no_survivors() {
        let (target, mut scene) = sphere_on_floor();
        scene.add_obstacle(
            "vault",
            &TriangleMesh::cuboid(Vector3::new(0.5, 0.5, 0.5)),
            &Transform::from_translation(0.5, 0.0, 0.03),
        );
        let params = SamplerParams {
            raw_budget: 1_000,
            output_size: 10,
            ..Default::default()
        };
        let err = generate_grasp_set(&target, &scene, &gripper_mesh(), &params, 1, Execution::Parallel);
        assert!(matches!(err, Err(GraspError::NoSurvivors)));
    }

    #[test]
    fn farthest_point_oracle() {
        // Points on a line: after the first pick, the extremes come next.
        let poses: Vec<Transform> = (0..11)
            .map(|i| Transform::from_translation(i as f64 * 0.01, 0.0, 0.0))
            .collect();
        let picked = farthest_point_subsample(&poses, 3, &mut rng(0));
        let first = picked[0];
        let far = if first < 5 { 10 } else { 0 };
        assert_eq!(picked[1], far);
        assert_eq!(picked.len(), 3);
        let mut dedup = picked.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 3);
        assert_eq!(farthest_point_subsample(&poses, 20, &mut rng(0)), (0..11).collect::<Vec<_>>());
    }
}
