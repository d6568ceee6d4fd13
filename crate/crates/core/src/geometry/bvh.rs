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

use super::intersect::{closest_point_on_triangle, ray_triangle, triangles_intersect, Ray};
use super::mesh::{Aabb, TriangleMesh};
use super::transform::Transform;

const LEAF_SIZE: usize = 4;
const INLINE_STACK: usize = 64;

/// Traversal stack that lives on the call stack unless the tree is unusually deep.
struct NodeStack {
    inline: [usize; INLINE_STACK],
    len: usize,
    spill: Vec<usize>,
}

impl NodeStack {
    fn root() -> Self {
        Self {
            inline: [0; INLINE_STACK],
            len: 1,
            spill: Vec::new(),
        }
    }

    #[inline]
    fn push(&mut self, id: usize) {
        if self.len < INLINE_STACK {
            self.inline[self.len] = id;
            self.len += 1;
        } else {
            self.spill.push(id);
        }
    }

    #[inline]
    fn pop(&mut self) -> Option<usize> {
        if let Some(id) = self.spill.pop() {
            return Some(id);
        }
        if self.len == 0 {
            return None;
        }
        self.len -= 1;
        Some(self.inline[self.len])
    }
}
const BINS: usize = 16;

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf { start: usize, count: usize },
    Inner { left: usize, right: usize },
}

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    kind: NodeKind,
}

/// Axis-aligned bounding-volume hierarchy over the triangles of one mesh.
///
/// Splits on the longest centroid axis at the binned median, down to leaves of
/// at most four triangles. The index stores triangle ids only, so queries take
/// the mesh it was built for.
#[derive(Debug, Clone)]
pub struct BvhIndex {
    nodes: Vec<Node>,
    order: Vec<usize>,
    triangle_count: usize,
}

/// Nearest ray intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub point: Vector3<f64>,
    pub triangle: usize,
    pub distance: f64,
}

impl BvhIndex {
    pub fn build(mesh: &TriangleMesh) -> Self {
        let n = mesh.len();
        let boxes: Vec<Aabb> = (0..n)
            .map(|i| Aabb::from_points(mesh.triangle(i).iter()))
            .collect();
        let centroids: Vec<Vector3<f64>> = boxes.iter().map(Aabb::center).collect();
        let mut bvh = BvhIndex {
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            order: (0..n).collect(),
            triangle_count: n,
        };
        if n == 0 {
            bvh.nodes.push(Node {
                aabb: Aabb::empty(),
                kind: NodeKind::Leaf { start: 0, count: 0 },
            });
            return bvh;
        }
        bvh.build_node(0, n, &boxes, &centroids);
        bvh
    }

    fn build_node(
        &mut self,
        start: usize,
        end: usize,
        boxes: &[Aabb],
        centroids: &[Vector3<f64>],
    ) -> usize {
        let slice = &self.order[start..end];
        let aabb = slice
            .iter()
            .fold(Aabb::empty(), |acc, &t| acc.merge(&boxes[t]));
        let id = self.nodes.len();
        self.nodes.push(Node {
            aabb,
            kind: NodeKind::Leaf {
                start,
                count: end - start,
            },
        });
        let count = end - start;
        if count <= LEAF_SIZE {
            return id;
        }
        let cbox = Aabb::from_points(slice.iter().map(|&t| &centroids[t]));
        let ext = cbox.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = if ext[axis] <= 0.0 {
            start + count / 2
        } else {
            // Binned median: pick the bin boundary whose left count is closest to half.
            let lo = cbox.min[axis];
            let scale = BINS as f64 / ext[axis];
            let bin_of = |t: usize| (((centroids[t][axis] - lo) * scale) as usize).min(BINS - 1);
            let mut counts = [0usize; BINS];
            for &t in slice {
                counts[bin_of(t)] += 1;
            }
            let mut best = (usize::MAX, 1);
            let mut acc = 0;
            for (b, &c) in counts.iter().enumerate().take(BINS - 1) {
                acc += c;
                if acc > 0 && acc < count {
                    let diff = acc.abs_diff(count / 2);
                    if diff < best.0 {
                        best = (diff, b + 1);
                    }
                }
            }
            if best.0 == usize::MAX {
                start + count / 2
            } else {
                let split_bin = best.1;
                let part = &mut self.order[start..end];
                let mut i = 0;
                for j in 0..part.len() {
                    if bin_of(part[j]) < split_bin {
                        part.swap(i, j);
                        i += 1;
                    }
                }
                start + i
            }
        };
        let left = self.build_node(start, mid, boxes, centroids);
        let right = self.build_node(mid, end, boxes, centroids);
        self.nodes[id].kind = NodeKind::Inner { left, right };
        id
    }

    pub fn root_aabb(&self) -> Aabb {
        self.nodes[0].aabb
    }

    pub fn triangle_count(&self) -> usize {
        self.triangle_count
    }

    /// Nearest hit with distance greater than the self-hit guard. Ties go to the lower triangle id.
    pub fn ray_cast(&self, mesh: &TriangleMesh, ray: &Ray) -> Option<RayHit> {
        let inv = ray.direction().map(|d| 1.0 / d);
        let mut best: Option<(f64, usize)> = None;
        let mut stack = NodeStack::root();
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            let limit = best.map_or(f64::INFINITY, |b| b.0);
            match slab(&node.aabb, ray, &inv) {
                Some(tmin) if tmin <= limit => {}
                _ => continue,
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for &t in &self.order[start..start + count] {
                        if let Some(d) = ray_triangle(ray, &mesh.triangle(t)) {
                            let better = match best {
                                None => true,
                                Some((bd, bt)) => d < bd || (d == bd && t < bt),
                            };
                            if better {
                                best = Some((d, t));
                            }
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        best.map(|(distance, triangle)| RayHit {
            point: ray.at(distance),
            triangle,
            distance,
        })
    }

    /// Counts every triangle crossing along the ray.
    pub fn ray_crossings(&self, mesh: &TriangleMesh, ray: &Ray) -> usize {
        let inv = ray.direction().map(|d| 1.0 / d);
        let mut hits = 0;
        let mut stack = NodeStack::root();
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if slab(&node.aabb, ray, &inv).is_none() {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    hits += self.order[start..start + count]
                        .iter()
                        .filter(|&&t| ray_triangle(ray, &mesh.triangle(t)).is_some())
                        .count();
                }
                NodeKind::Inner { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        hits
    }

    /// Parity test; meaningful for closed meshes only.
    pub fn contains_point(&self, mesh: &TriangleMesh, p: &Vector3<f64>) -> bool {
        if !self.root_aabb().contains_point(p) {
            return false;
        }
        // An irrational-ish direction avoids grazing edges of axis-aligned geometry.
        let ray = Ray::new(*p, Vector3::new(0.5772156649, 0.3261803399, 0.7548776662))
            .expect("fixed direction");
        self.ray_crossings(mesh, &ray) % 2 == 1
    }

    /// True when some triangle lies strictly closer than `radius` to `center`.
    pub fn sphere_intersects(&self, mesh: &TriangleMesh, center: &Vector3<f64>, radius: f64) -> bool {
        let r2 = radius * radius;
        let mut stack = NodeStack::root();
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.aabb.distance_squared(center) >= r2 {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for &t in &self.order[start..start + count] {
                        let tri = mesh.triangle(t);
                        if (closest_point_on_triangle(center, &tri) - center).norm_squared() < r2 {
                            return true;
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        false
    }

    /// Visits leaf AABBs with their triangle ids (used by invariant checks).
    pub fn leaves(&self) -> impl Iterator<Item = (Aabb, &[usize])> + '_ {
        self.nodes.iter().filter_map(move |n| match n.kind {
            NodeKind::Leaf { start, count } => Some((n.aabb, &self.order[start..start + count])),
            NodeKind::Inner { .. } => None,
        })
    }
}

fn slab(b: &Aabb, ray: &Ray, inv: &Vector3<f64>) -> Option<f64> {
    if b.is_empty() {
        return None;
    }
    let mut tmin = 0.0f64;
    let mut tmax = f64::INFINITY;
    for i in 0..3 {
        let o = ray.origin[i];
        if inv[i].is_infinite() {
            if o < b.min[i] || o > b.max[i] {
                return None;
            }
            continue;
        }
        let t1 = (b.min[i] - o) * inv[i];
        let t2 = (b.max[i] - o) * inv[i];
        tmin = tmin.max(t1.min(t2));
        tmax = tmax.min(t1.max(t2));
    }
    // Small slack keeps hits that lie exactly on a box face.
    (tmax >= tmin - 1e-12 * (1.0 + tmax.abs())).then_some(tmin)
}

/// A mesh bundled with its BVH.
#[derive(Debug, Clone)]
pub struct IndexedMesh {
    pub mesh: TriangleMesh,
    pub bvh: BvhIndex,
}

impl IndexedMesh {
    pub fn new(mesh: TriangleMesh) -> Self {
        let bvh = BvhIndex::build(&mesh);
        Self { mesh, bvh }
    }

    pub fn ray_cast(&self, ray: &Ray) -> Option<RayHit> {
        self.bvh.ray_cast(&self.mesh, ray)
    }
}

/// Boolean narrow phase between two meshes. `pose_ab` maps `b`'s frame into `a`'s.
pub fn meshes_intersect(a: &IndexedMesh, b: &IndexedMesh, pose_ab: &Transform) -> bool {
    if a.mesh.is_empty() || b.mesh.is_empty() {
        return false;
    }
    let b_boxes: Vec<Aabb> = b
        .bvh
        .nodes
        .iter()
        .map(|n| n.aabb.transformed(pose_ab))
        .collect();
    let mut b_tris: Vec<Option<[Vector3<f64>; 3]>> = vec![None; b.mesh.len()];
    let mut stack = vec![(0usize, 0usize)];
    while let Some((ia, ib)) = stack.pop() {
        let na = &a.bvh.nodes[ia];
        let nb = &b.bvh.nodes[ib];
        if !na.aabb.overlaps(&b_boxes[ib]) {
            continue;
        }
        match (&na.kind, &nb.kind) {
            (
                NodeKind::Leaf { start: sa, count: ca },
                NodeKind::Leaf { start: sb, count: cb },
            ) => {
                for &ta in &a.bvh.order[*sa..sa + ca] {
                    let tri_a = a.mesh.triangle(ta);
                    for &tb in &b.bvh.order[*sb..sb + cb] {
                        let tri_b = *b_tris[tb].get_or_insert_with(|| {
                            b.mesh.triangle(tb).map(|v| pose_ab.transform_point(&v))
                        });
                        if triangles_intersect(&tri_a, &tri_b) {
                            return true;
                        }
                    }
                }
            }
            (NodeKind::Leaf { .. }, NodeKind::Inner { left, right }) => {
                stack.push((ia, *right));
                stack.push((ia, *left));
            }
            (NodeKind::Inner { left, right }, NodeKind::Leaf { .. }) => {
                stack.push((*right, ib));
                stack.push((*left, ib));
            }
            (NodeKind::Inner { left: la, right: ra }, NodeKind::Inner { left: lb, right: rb }) => {
                // Descend the larger box first.
                if na.aabb.extent().norm_squared() >= b_boxes[ib].extent().norm_squared() {
                    stack.push((*ra, ib));
                    stack.push((*la, ib));
                } else {
                    stack.push((ia, *rb));
                    stack.push((ia, *lb));
                }
            }
        }
    }
    false
}
