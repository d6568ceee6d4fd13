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

//! Narrow-phase primitives: ray/triangle, triangle/triangle, point/triangle.

use nalgebra::Vector3;

type V3 = Vector3<f64>;

/// Minimum hit distance along a ray; suppresses hits on the surface the ray starts from.
pub const SELF_HIT_GUARD: f64 = 1e-9;

/// Half-line with a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: V3,
    direction: V3,
}

impl Ray {
    /// Normalizes `direction`; returns `None` for a zero or non-finite direction.
    pub fn new(origin: V3, direction: V3) -> Option<Self> {
        let n = direction.norm();
        if !n.is_finite() || n < 1e-12 {
            return None;
        }
        Some(Self {
            origin,
            direction: direction / n,
        })
    }

    pub fn direction(&self) -> &V3 {
        &self.direction
    }

    pub fn at(&self, t: f64) -> V3 {
        self.origin + self.direction * t
    }
}

/// Möller–Trumbore. Returns the ray parameter of the hit, if any, with `t > SELF_HIT_GUARD`.
pub fn ray_triangle(ray: &Ray, tri: &[V3; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = ray.direction.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin - tri[0];
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = ray.direction.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > SELF_HIT_GUARD).then_some(t)
}

fn project(tri: &[V3; 3], axis: &V3) -> (f64, f64) {
    let a = tri[0].dot(axis);
    let b = tri[1].dot(axis);
    let c = tri[2].dot(axis);
    (a.min(b).min(c), a.max(b).max(c))
}

fn separated_on(a: &[V3; 3], b: &[V3; 3], axis: &V3) -> bool {
    let (amin, amax) = project(a, axis);
    let (bmin, bmax) = project(b, axis);
    amax < bmin || bmax < amin
}

/// Separating-axis test for two triangles. Touching triangles count as intersecting.
pub fn triangles_intersect(a: &[V3; 3], b: &[V3; 3]) -> bool {
    let ea = [a[1] - a[0], a[2] - a[1], a[0] - a[2]];
    let eb = [b[1] - b[0], b[2] - b[1], b[0] - b[2]];
    let na = ea[0].cross(&ea[1]);
    let nb = eb[0].cross(&eb[1]);
    if separated_on(a, b, &na) || separated_on(a, b, &nb) {
        return false;
    }
    let scale = ea.iter().chain(eb.iter()).map(|e| e.norm()).fold(0.0, f64::max);
    let eps = 1e-12 * scale * scale;
    let mut any_cross = false;
    for e in &ea {
        for f in &eb {
            let axis = e.cross(f);
            if axis.norm() > eps {
                any_cross = true;
                if separated_on(a, b, &axis) {
                    return false;
                }
            }
        }
    }
    let coplanar = na.cross(&nb).norm() <= 1e-12 * na.norm() * nb.norm();
    if coplanar || !any_cross {
        for e in ea.iter().chain(eb.iter()) {
            let axis = na.cross(e);
            if axis.norm() > eps && separated_on(a, b, &axis) {
                return false;
            }
        }
    }
    true
}

/// Closest point to `p` on the triangle (Ericson, Real-Time Collision Detection 5.1.5).
pub fn closest_point_on_triangle(p: &V3, tri: &[V3; 3]) -> V3 {
    let [a, b, c] = tri;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn segment_hits_triangle(p: &V3, q: &V3, tri: &[V3; 3]) -> bool {
        let d = q - p;
        let len = d.norm();
        let ray = Ray::new(*p, d).unwrap();
        // Independent of the guard: shift the origin back slightly.
        let shifted = Ray::new(p - ray.direction() * 1e-6, d).unwrap();
        ray_triangle(&shifted, tri).is_some_and(|t| t <= len + 1e-6)
    }

    fn brute_tri_tri(a: &[V3; 3], b: &[V3; 3]) -> bool {
        (0..3).any(|i| segment_hits_triangle(&a[i], &a[(i + 1) % 3], b))
            || (0..3).any(|i| segment_hits_triangle(&b[i], &b[(i + 1) % 3], a))
    }

    fn v3() -> impl Strategy<Value = V3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| V3::new(x, y, z))
    }

    fn area(t: &[V3; 3]) -> f64 {
        0.5 * (t[1] - t[0]).cross(&(t[2] - t[0])).norm()
    }

    proptest! {
        #[test]
        fn tri_tri_matches_edge_crossing_oracle(a0 in v3(), a1 in v3(), a2 in v3(), b0 in v3(), b1 in v3(), b2 in v3()) {
            let a = [a0, a1, a2];
            let b = [b0, b1, b2];
            prop_assume!(area(&a) > 1e-3 && area(&b) > 1e-3);
            // Skip near-coplanar pairs where the edge oracle is ill-conditioned.
            let na = (a1 - a0).cross(&(a2 - a0)).normalize();
            let nb = (b1 - b0).cross(&(b2 - b0)).normalize();
            prop_assume!(na.cross(&nb).norm() > 1e-2);
            prop_assert_eq!(triangles_intersect(&a, &b), brute_tri_tri(&a, &b));
        }

        #[test]
        fn closest_point_is_minimal(p in v3(), a in v3(), b in v3(), c in v3(), u in 0.0..1.0f64, v in 0.0..1.0f64) {
            let t = [a, b, c];
            prop_assume!(area(&t) > 1e-4);
            let cp = closest_point_on_triangle(&p, &t);
            let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
            let other = a + (b - a) * u + (c - a) * v;
            prop_assert!((p - cp).norm() <= (p - other).norm() + 1e-12);
        }
    }

    #[test]
    fn coplanar_triangles() {
        let a = [V3::zeros(), V3::x(), V3::y()];
        let overlapping = [V3::new(0.2, 0.2, 0.0), V3::new(1.2, 0.2, 0.0), V3::new(0.2, 1.2, 0.0)];
        let apart = [V3::new(2.0, 2.0, 0.0), V3::new(3.0, 2.0, 0.0), V3::new(2.0, 3.0, 0.0)];
        // Separated only along an in-plane edge normal.
        let diagonal = [V3::new(0.6, 0.6, 0.0), V3::new(1.6, 0.6, 0.0), V3::new(0.6, 1.6, 0.0)];
        assert!(triangles_intersect(&a, &overlapping));
        assert!(!triangles_intersect(&a, &apart));
        assert!(!triangles_intersect(&a, &diagonal));
    }

    #[test]
    fn ray_triangle_basics() {
        let tri = [V3::new(-1.0, -1.0, 1.0), V3::new(1.0, -1.0, 1.0), V3::new(0.0, 1.0, 1.0)];
        let up = Ray::new(V3::zeros(), V3::z()).unwrap();
        assert!((ray_triangle(&up, &tri).unwrap() - 1.0).abs() < 1e-15);
        let down = Ray::new(V3::zeros(), -V3::z()).unwrap();
        assert!(ray_triangle(&down, &tri).is_none());
        let on_surface = Ray::new(V3::new(0.0, 0.0, 1.0), V3::z()).unwrap();
        assert!(ray_triangle(&on_surface, &tri).is_none());
        assert!(Ray::new(V3::zeros(), V3::zeros()).is_none());
    }
}
