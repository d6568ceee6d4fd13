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

use nalgebra::{UnitQuaternion, Vector3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use reachgrasp::geometry::{pose_distance, ray_triangle, BvhIndex, Ray, Transform, TriangleMesh};
use reachgrasp::robot::{Configuration, KinematicChain, DOF};

fn transform() -> impl Strategy<Value = Transform> {
    (
        prop::array::uniform3(-1.0f64..1.0),
        prop::array::uniform3(-1.0f64..1.0),
        -3.1f64..3.1,
        prop::array::uniform3(-2.0f64..2.0),
    )
        .prop_filter_map("degenerate axis", |(axis, _, angle, t)| {
            let axis = Vector3::from(axis);
            (axis.norm() > 1e-3).then(|| {
                Transform::new(
                    UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle),
                    Vector3::from(t),
                )
            })
        })
}

fn configuration() -> impl Strategy<Value = Configuration> {
    let chain = KinematicChain::builtin();
    let (lo, hi) = (chain.lower_limits(), chain.upper_limits());
    prop::array::uniform9(0.0f64..1.0).prop_map(move |u| {
        let mut q = [0.0; DOF];
        for i in 0..DOF {
            q[i] = lo[i] + u[i] * (hi[i] - lo[i]);
        }
        Configuration::from(q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pose_distance_is_a_metric(a in transform(), b in transform(), c in transform()) {
        let tol = 1e-6;
        prop_assert!(pose_distance(&a, &a).abs() <= tol);
        prop_assert!((pose_distance(&a, &b) - pose_distance(&b, &a)).abs() <= tol);
        prop_assert!(pose_distance(&a, &c) <= pose_distance(&a, &b) + pose_distance(&b, &c) + tol);
        prop_assert!(pose_distance(&a, &b) >= 0.0);
    }

    #[test]
    fn inverse_of_composition(a in transform(), b in transform()) {
        let lhs = a.compose(&b).inverse();
        let rhs = b.inverse().compose(&a.inverse());
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }

    #[test]
    fn bvh_ray_cast_matches_brute_force(
        seed in any::<u64>(),
        origin in prop::array::uniform3(-1.5f64..1.5),
        dir in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mesh = TriangleMesh::icosphere(0.5, 1)
            .transformed(&Transform::from_translation(0.1, -0.05, 0.2));
        // Clutter the sphere with a random box so rays see several surfaces.
        let bx = TriangleMesh::cuboid(Vector3::new(0.2, 0.3, 0.1))
            .transformed(&Transform::from_translation(rand::Rng::random_range(&mut rng, -0.6..0.6), 0.0, -0.4));
        let mesh = TriangleMesh::merged([&mesh, &bx]);
        let Some(ray) = Ray::new(Vector3::from(origin), Vector3::from(dir)) else {
            return Ok(());
        };
        let bvh = BvhIndex::build(&mesh);
        let brute = (0..mesh.len())
            .filter_map(|i| ray_triangle(&ray, &mesh.triangle(i)))
            .fold(None, |best: Option<f64>, t| Some(best.map_or(t, |b| b.min(t))));
        let hit = bvh.ray_cast(&mesh, &ray);
        match (hit, brute) {
            (None, None) => {}
            (Some(h), Some(t)) => prop_assert!((h.distance - t).abs() <= 1e-9, "{} vs {}", h.distance, t),
            (h, b) => prop_assert!(false, "bvh {:?} vs brute {:?}", h.map(|h| h.distance), b),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobian_matches_central_differences(q in configuration()) {
        let chain = KinematicChain::builtin();
        let j = chain.jacobian(&q);
        let h = 1e-6;
        let base = chain.gripper_pose(&q);
        for i in 0..DOF {
            let (mut qp, mut qm) = (q, q);
            qp[i] += h;
            qm[i] -= h;
            let (tp, tm) = (chain.gripper_pose(&qp), chain.gripper_pose(&qm));
            let dp = (tp.translation - tm.translation) / (2.0 * h);
            // World-frame angular velocity from the rotation difference.
            let dr = (tp.rotation * tm.rotation.inverse()).scaled_axis() / (2.0 * h);
            for r in 0..3 {
                prop_assert!((j[(r, i)] - dp[r]).abs() < 1e-5, "linear ({r},{i})");
                prop_assert!((j[(r + 3, i)] - dr[r]).abs() < 1e-5, "angular ({r},{i})");
            }
        }
        prop_assert!(base.translation.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn base_translation_never_rotates_the_gripper(q in configuration(), dx in -0.5f64..0.5, dy in -0.5f64..0.5) {
        let chain = KinematicChain::builtin();
        let mut moved = q;
        moved[0] += dx;
        moved[1] += dy;
        let (a, b) = (chain.gripper_pose(&q), chain.gripper_pose(&moved));
        prop_assert!(a.rotation.angle_to(&b.rotation) <= 1e-12);
        prop_assert!((b.translation - a.translation - Vector3::new(dx, dy, 0.0)).norm() <= 1e-12);
    }
}

/// Area-uniform sampling: chi-square over triangle hit counts on a 20-face mesh.
#[test]
fn surface_sampling_is_area_uniform() {
    let mesh = TriangleMesh::icosphere(1.0, 0)
        .transformed(&Transform::from_translation(0.3, 0.0, 0.0));
    // Stretch along x so face areas differ.
    let stretched: Vec<Vector3<f64>> = mesh.vertices().iter().map(|v| Vector3::new(2.0 * v.x, v.y, 0.5 * v.z)).collect();
    let mesh = TriangleMesh::new(stretched, mesh.triangles().to_vec()).unwrap();
    assert_eq!(mesh.len(), 20);
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = mesh.surface_sample(&mut rng, n).unwrap();
    let mut counts = [0usize; 20];
    for p in &pts {
        counts[p.triangle] += 1;
    }
    let total: f64 = (0..20).map(|i| mesh.triangle_area(i)).sum();
    let chi2: f64 = (0..20)
        .map(|i| {
            let e = n as f64 * mesh.triangle_area(i) / total;
            (counts[i] as f64 - e).powi(2) / e
        })
        .sum();
    // 99.9th percentile of chi-square with 19 degrees of freedom.
    assert!(chi2 < 43.82, "chi-square {chi2}");
}
