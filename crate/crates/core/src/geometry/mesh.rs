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

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::transform::Transform;
use crate::error::GeometryError;

/// Minimum accepted triangle area in m².
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vector3::repeat(f64::INFINITY),
            max: Vector3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vector3<f64>>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Vector3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn merge(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x
    }

    pub fn center(&self) -> Vector3<f64> {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn contains_point(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn contains(&self, other: &Aabb) -> bool {
        (0..3).all(|i| other.min[i] >= self.min[i] && other.max[i] <= self.max[i])
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    /// Squared distance from `p` to the box (0 inside).
    pub fn distance_squared(&self, p: &Vector3<f64>) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let v = if p[i] < self.min[i] {
                self.min[i] - p[i]
            } else if p[i] > self.max[i] {
                p[i] - self.max[i]
            } else {
                0.0
            };
            d += v * v;
        }
        d
    }

    pub fn corners(&self) -> [Vector3<f64>; 8] {
        let (a, b) = (self.min, self.max);
        [
            Vector3::new(a.x, a.y, a.z),
            Vector3::new(b.x, a.y, a.z),
            Vector3::new(a.x, b.y, a.z),
            Vector3::new(b.x, b.y, a.z),
            Vector3::new(a.x, a.y, b.z),
            Vector3::new(b.x, a.y, b.z),
            Vector3::new(a.x, b.y, b.z),
            Vector3::new(b.x, b.y, b.z),
        ]
    }

    /// Bounding box of this box after a rigid transform.
    pub fn transformed(&self, t: &Transform) -> Aabb {
        let corners = self.corners().map(|c| t.transform_point(&c));
        Aabb::from_points(corners.iter())
    }
}

/// A point sampled on a mesh surface with the outward normal of its triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub point: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub triangle: usize,
}

/// Indexed triangle mesh with per-triangle outward unit normals (counter-clockwise winding).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vector3<f64>>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Vector3<f64>>,
}

impl TriangleMesh {
    /// Validates indices and rejects degenerate triangles.
    pub fn new(
        vertices: Vec<Vector3<f64>>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, GeometryError> {
        if let Some(i) = vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(GeometryError::NonFiniteVertex(i));
        }
        let mut normals = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i >= vertices.len()) {
                return Err(GeometryError::IndexOutOfRange {
                    triangle: t,
                    index: bad,
                    vertex_count: vertices.len(),
                });
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            if area <= MIN_TRIANGLE_AREA {
                return Err(GeometryError::DegenerateTriangle { triangle: t, area });
            }
            normals.push(cross / cross.norm());
        }
        Ok(Self {
            vertices,
            triangles,
            normals,
        })
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Vector3<f64>] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> [Vector3<f64>; 3] {
        self.triangles[i].map(|v| self.vertices[v])
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle(i);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.len()).map(|i| self.triangle_area(i)).sum()
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter())
    }

    /// Copy of the mesh with every vertex moved by `t`.
    pub fn transformed(&self, t: &Transform) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| t.transform_point(v)).collect(),
            triangles: self.triangles.clone(),
            normals: self.normals.iter().map(|n| t.transform_vector(n)).collect(),
        }
    }

    /// True when every undirected edge is shared by exactly two triangles.
    pub fn is_closed(&self) -> bool {
        let mut edges = std::collections::HashMap::<(usize, usize), u32>::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        !edges.is_empty() && edges.values().all(|&c| c == 2)
    }

    /// Concatenates meshes into one (indices shifted).
    pub fn merged<'a>(meshes: impl IntoIterator<Item = &'a TriangleMesh>) -> TriangleMesh {
        let mut out = TriangleMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            normals: Vec::new(),
        };
        for m in meshes {
            let offset = out.vertices.len();
            out.vertices.extend_from_slice(&m.vertices);
            out.triangles
                .extend(m.triangles.iter().map(|t| t.map(|i| i + offset)));
            out.normals.extend_from_slice(&m.normals);
        }
        out
    }

    /// Draws `n` points uniformly by area over the surface.
    pub fn surface_sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Result<Vec<SurfacePoint>, GeometryError> {
        if self.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let areas: Vec<f64> = (0..self.len()).map(|i| self.triangle_area(i)).collect();
        let pick = WeightedIndex::new(&areas).map_err(|_| GeometryError::EmptyMesh)?;
        Ok((0..n)
            .map(|_| {
                let t = pick.sample(rng);
                let [a, b, c] = self.triangle(t);
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                let s = r1.sqrt();
                let point = a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2);
                SurfacePoint {
                    point,
                    normal: self.normals[t],
                    triangle: t,
                }
            })
            .collect())
    }

    /// Axis-aligned box centered at the origin.
    pub fn cuboid(half_extents: Vector3<f64>) -> TriangleMesh {
        let h = half_extents;
        let vertices = (0..8)
            .map(|i| {
                Vector3::new(
                    if i & 1 == 0 { -h.x } else { h.x },
                    if i & 2 == 0 { -h.y } else { h.y },
                    if i & 4 == 0 { -h.z } else { h.z },
                )
            })
            .collect();
        let triangles = vec![
            [0, 2, 1],
            [1, 2, 3], // -z
            [4, 5, 6],
            [5, 7, 6], // +z
            [0, 1, 4],
            [1, 5, 4], // -y
            [2, 6, 3],
            [3, 6, 7], // +y
            [0, 4, 2],
            [2, 4, 6], // -x
            [1, 3, 5],
            [3, 7, 5], // +x
        ];
        TriangleMesh::new(vertices, triangles).expect("cuboid with positive extents")
    }

    /// Box spanning `[min, max]`.
    pub fn cuboid_between(min: Vector3<f64>, max: Vector3<f64>) -> TriangleMesh {
        let c = (min + max) * 0.5;
        Self::cuboid((max - min) * 0.5)
            .transformed(&Transform::from_translation(c.x, c.y, c.z))
    }

    /// Icosphere of the given radius; `subdivisions` = 0 gives the 20-face icosahedron.
    pub fn icosphere(radius: f64, subdivisions: u32) -> TriangleMesh {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vector3<f64>> = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ]
        .iter()
        .map(|v| Vector3::from(*v).normalize())
        .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoints = std::collections::HashMap::new();
            let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| -> usize {
                *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                    vertices.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, c, &mut vertices);
                let ca = mid(c, a, &mut vertices);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        let vertices = vertices.into_iter().map(|v| v * radius).collect();
        TriangleMesh::new(vertices, faces).expect("icosphere with positive radius")
    }

    /// Closed cylinder along z, centered at the origin.
    pub fn cylinder(radius: f64, length: f64, segments: usize) -> TriangleMesh {
        let segments = segments.max(3);
        let h = length / 2.0;
        let mut vertices = Vec::with_capacity(2 * segments + 2);
        for z in [-h, h] {
            for k in 0..segments {
                let a = TAU * k as f64 / segments as f64;
                vertices.push(Vector3::new(radius * a.cos(), radius * a.sin(), z));
            }
        }
        let bottom = vertices.len();
        vertices.push(Vector3::new(0.0, 0.0, -h));
        let top = vertices.len();
        vertices.push(Vector3::new(0.0, 0.0, h));
        let mut triangles = Vec::with_capacity(4 * segments);
        for k in 0..segments {
            let k1 = (k + 1) % segments;
            let (b0, b1, t0, t1) = (k, k1, k + segments, k1 + segments);
            triangles.push([b0, b1, t1]);
            triangles.push([b0, t1, t0]);
            triangles.push([bottom, b1, b0]);
            triangles.push([top, t0, t1]);
        }
        TriangleMesh::new(vertices, triangles).expect("cylinder with positive size")
    }

    /// A tube with polygonal cross-section swept along a planar arc, capped at both ends.
    ///
    /// The arc lies in the xy-plane around the origin, spanning `sweep` radians
    /// symmetric about the -y axis, so the result is a banana-like curved prism.
    pub fn curved_prism(
        arc_radius: f64,
        sweep: f64,
        section_radius: f64,
        sides: usize,
        steps: usize,
    ) -> TriangleMesh {
        let sides = sides.max(3);
        let steps = steps.max(1);
        let mut vertices = Vec::with_capacity((steps + 1) * sides + 2);
        let frame = |s: usize| {
            let phi = -PI / 2.0 - sweep / 2.0 + sweep * s as f64 / steps as f64;
            let radial = Vector3::new(phi.cos(), phi.sin(), 0.0);
            (radial * arc_radius, radial)
        };
        for s in 0..=steps {
            let (center, radial) = frame(s);
            for k in 0..sides {
                let a = TAU * k as f64 / sides as f64;
                vertices.push(
                    center + radial * (section_radius * a.cos())
                        + Vector3::z() * (section_radius * a.sin()),
                );
            }
        }
        let start = vertices.len();
        vertices.push(frame(0).0);
        let end = vertices.len();
        vertices.push(frame(steps).0);
        let mut triangles = Vec::with_capacity(2 * steps * sides + 2 * sides);
        for s in 0..steps {
            for k in 0..sides {
                let k1 = (k + 1) % sides;
                let (a, b) = (s * sides + k, s * sides + k1);
                let (c, d) = (a + sides, b + sides);
                triangles.push([a, c, d]);
                triangles.push([a, d, b]);
            }
        }
        for k in 0..sides {
            let k1 = (k + 1) % sides;
            triangles.push([start, k, k1]);
            triangles.push([end, steps * sides + k1, steps * sides + k]);
        }
        let mut mesh = TriangleMesh::new(vertices, triangles).expect("curved prism");
        mesh.orient_outward();
        mesh
    }

    /// Flips the whole winding if the signed volume is negative.
    fn orient_outward(&mut self) {
        let volume: f64 = self
            .triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                a.dot(&b.cross(&c))
            })
            .sum();
        if volume < 0.0 {
            for t in &mut self.triangles {
                t.swap(1, 2);
            }
            for n in &mut self.normals {
                *n = -*n;
            }
        }
    }

    /// Parses the `v`/`f` subset of Wavefront OBJ. Faces must be triangles.
    pub fn from_obj_str(src: &str) -> Result<TriangleMesh, GeometryError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let lineno = lineno + 1;
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("v") => {
                    let coords: Vec<f64> = tokens
                        .take(3)
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .map_err(|_| GeometryError::Obj {
                            line: lineno,
                            message: "invalid vertex coordinate".into(),
                        })?;
                    if coords.len() != 3 {
                        return Err(GeometryError::Obj {
                            line: lineno,
                            message: "vertex needs three coordinates".into(),
                        });
                    }
                    vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
                }
                Some("f") => {
                    let refs: Vec<&str> = tokens.collect();
                    if refs.len() != 3 {
                        return Err(GeometryError::Obj {
                            line: lineno,
                            message: format!(
                                "face has {} vertices; only triangulated meshes are supported",
                                refs.len()
                            ),
                        });
                    }
                    let mut tri = [0usize; 3];
                    for (slot, r) in tri.iter_mut().zip(refs) {
                        let idx: i64 = r
                            .split('/')
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| GeometryError::Obj {
                                line: lineno,
                                message: format!("invalid face index '{r}'"),
                            })?;
                        let resolved = match idx {
                            i if i > 0 => i - 1,
                            i if i < 0 => vertices.len() as i64 + i,
                            _ => -1,
                        };
                        if resolved < 0 || resolved as usize >= vertices.len() {
                            return Err(GeometryError::Obj {
                                line: lineno,
                                message: format!("face index {idx} out of range"),
                            });
                        }
                        *slot = resolved as usize;
                    }
                    triangles.push(tri);
                }
                _ => {}
            }
        }
        TriangleMesh::new(vertices, triangles)
    }

    /// Serializes as OBJ (`v` and `f` records). Floats use shortest round-trip formatting.
    pub fn to_obj_string(&self) -> String {
        let mut out = String::with_capacity(32 * (self.vertices.len() + self.triangles.len()));
        for v in &self.vertices {
            out.push_str(&format!("v {:?} {:?} {:?}\n", v.x, v.y, v.z));
        }
        for t in &self.triangles {
            out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
        }
        out
    }
}
