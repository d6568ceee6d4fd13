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

//! Exact Euclidean nearest-neighbor index over configurations.
//!
//! Points live in a handful of static k-d trees whose sizes follow a binary
//! counter, plus a short unindexed tail that is scanned linearly. A full tail
//! is merged with every smaller tree into one new tree, so insertion is
//! amortized `O(log² n)` and a query visits `O(log n)` trees.

use crate::robot::DOF;

const LEAF: usize = 16;
const TAIL: usize = 64;

type Point = [f64; DOF];

#[derive(Debug, Clone, PartialEq)]
enum KdNode {
    Leaf { lo: usize, hi: usize },
    Split { dim: usize, value: f64, left: usize, right: usize },
}

/// Static tree over a subset of the index's points.
#[derive(Debug, Clone, PartialEq)]
struct KdTree {
    perm: Vec<usize>,
    nodes: Vec<KdNode>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct NearestIndex {
    points: Vec<Point>,
    /// Strictly decreasing sizes.
    trees: Vec<KdTree>,
    /// Points from here on are in no tree.
    tail: usize,
}

#[inline]
fn dist2(a: &Point, b: &Point) -> f64 {
    let mut d = 0.0;
    for k in 0..DOF {
        let t = a[k] - b[k];
        d += t * t;
    }
    d
}

/// `(d, i)` beats `best` on distance, then on lower index.
#[inline]
fn better(d: f64, i: usize, best: (f64, usize)) -> bool {
    d < best.0 || (d == best.0 && i < best.1)
}

impl KdTree {
    fn build(points: &[Point], perm: Vec<usize>) -> Self {
        let mut tree = Self { perm, nodes: Vec::new() };
        let n = tree.perm.len();
        tree.build_node(points, 0, n);
        tree
    }

    #[allow(clippy::needless_range_loop)]
    fn build_node(&mut self, points: &[Point], lo: usize, hi: usize) -> usize {
        if hi - lo <= LEAF {
            self.nodes.push(KdNode::Leaf { lo, hi });
            return self.nodes.len() - 1;
        }
        let mut dim = 0;
        let mut widest = -1.0;
        for k in 0..DOF {
            let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.perm[lo..hi] {
                mn = mn.min(points[i][k]);
                mx = mx.max(points[i][k]);
            }
            if mx - mn > widest {
                widest = mx - mn;
                dim = k;
            }
        }
        let mid = (lo + hi) / 2;
        self.perm[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| points[a][dim].total_cmp(&points[b][dim]));
        let value = points[self.perm[mid]][dim];
        let at = self.nodes.len();
        self.nodes.push(KdNode::Leaf { lo: 0, hi: 0 });
        let left = self.build_node(points, lo, mid);
        let right = self.build_node(points, mid, hi);
        self.nodes[at] = KdNode::Split { dim, value, left, right };
        at
    }

    /// Descends with `rd`, the squared distance from `q` to the current cell,
    /// and `off`, its per-axis components.
    fn search(&self, points: &[Point], node: usize, q: &Point, rd: f64, off: &mut Point, best: &mut (f64, usize)) {
        match self.nodes[node] {
            KdNode::Leaf { lo, hi } => {
                for &i in &self.perm[lo..hi] {
                    let d = dist2(&points[i], q);
                    if better(d, i, *best) {
                        *best = (d, i);
                    }
                }
            }
            KdNode::Split { dim, value, left, right } => {
                // Left holds coordinates ≤ value, right ≥ value.
                let diff = q[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(points, near, q, rd, off, best);
                let old = off[dim];
                let rd_far = rd - old * old + diff * diff;
                if rd_far <= best.0 {
                    off[dim] = diff;
                    self.search(points, far, q, rd_far, off, best);
                    off[dim] = old;
                }
            }
        }
    }
}

impl NearestIndex {
    pub fn push(&mut self, p: Point) {
        self.points.push(p);
        if self.points.len() - self.tail < TAIL {
            return;
        }
        let mut perm: Vec<usize> = (self.tail..self.points.len()).collect();
        while self.trees.last().is_some_and(|t| t.perm.len() <= perm.len()) {
            perm.extend(self.trees.pop().expect("checked").perm);
        }
        self.trees.push(KdTree::build(&self.points, perm));
        self.tail = self.points.len();
    }

    /// Index of the nearest point, lowest index on ties. `None` when empty.
    pub fn nearest(&self, q: &Point) -> Option<usize> {
        let mut best = (f64::INFINITY, usize::MAX);
        for i in self.tail..self.points.len() {
            let d = dist2(&self.points[i], q);
            if better(d, i, best) {
                best = (d, i);
            }
        }
        for tree in &self.trees {
            tree.search(&self.points, 0, q, 0.0, &mut [0.0; DOF], &mut best);
        }
        (best.1 != usize::MAX).then_some(best.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(points: &[Point], q: &Point) -> usize {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, p) in points.iter().enumerate() {
            let d = dist2(p, q);
            if better(d, i, best) {
                best = (d, i);
            }
        }
        best.1
    }

    proptest! {
        #[test]
        fn matches_linear_scan(
            pts in prop::collection::vec(prop::array::uniform9(-2i8..3), 1..400),
            queries in prop::collection::vec(prop::array::uniform9(-3i8..4), 1..20),
        ) {
            // Small integer grids force many exact ties and shared coordinates.
            let pts: Vec<Point> = pts.iter().map(|p| p.map(|v| v as f64 * 0.5)).collect();
            let mut index = NearestIndex::default();
            for (n, p) in pts.iter().enumerate() {
                index.push(*p);
                let q = queries[n % queries.len()].map(|v| v as f64 * 0.5);
                prop_assert_eq!(index.nearest(&q), Some(brute(&pts[..=n], &q)));
            }
        }
    }

    #[test]
    fn empty_index_has_no_nearest() {
        assert_eq!(NearestIndex::default().nearest(&[0.0; DOF]), None);
    }
}
