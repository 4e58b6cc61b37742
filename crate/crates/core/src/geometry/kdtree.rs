//! Exact k-d tree over a fixed point list.
//!
//! Results are defined to be identical to a linear scan: distances are
//! accumulated in the same order as [`super::point::dist_sq`] and ties are
//! broken by the lowest original index.

use crate::scalar::Real;

use super::point::{dist_sq, Point};

const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
enum Node<T> {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: T,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
pub(crate) struct KdTree<T> {
    nodes: Vec<Node<T>>,
    /// Site indices, permuted so that every leaf owns a contiguous run.
    order: Vec<usize>,
}

impl<T: Real> KdTree<T> {
    pub(crate) fn build(points: &[Point<T>]) -> Self {
        let mut tree = KdTree {
            nodes: Vec::new(),
            order: (0..points.len()).collect(),
        };
        if !points.is_empty() {
            let n = points.len();
            tree.build_node(points, 0, n);
        }
        tree
    }

    fn build_node(&mut self, points: &[Point<T>], start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(points, start, end);
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a][axis]
                .partial_cmp(&points[b][axis])
                .expect("finite coordinates")
                .then(a.cmp(&b))
        });
        let value = points[self.order[mid]][axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(points, start, mid);
        let right = self.build_node(points, mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn widest_axis(&self, points: &[Point<T>], start: usize, end: usize) -> usize {
        let dim = points[self.order[start]].dim();
        let mut best = (0, T::neg_infinity());
        for axis in 0..dim {
            let (lo, hi) = self.order[start..end]
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &i| {
                    (lo.min(points[i][axis]), hi.max(points[i][axis]))
                });
            if hi - lo > best.1 {
                best = (axis, hi - lo);
            }
        }
        best.0
    }

    /// Nearest site as `(squared distance, index)`.
    pub(crate) fn nearest(&self, points: &[Point<T>], q: &[T]) -> (T, usize) {
        let mut best = (T::infinity(), usize::MAX);
        if !self.nodes.is_empty() {
            self.nearest_in(points, q, 0, &mut best);
        }
        best
    }

    fn nearest_in(&self, points: &[Point<T>], q: &[T], node: usize, best: &mut (T, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d2 = dist_sq(q, points[i].coords());
                    if d2 < best.0 || (d2 == best.0 && i < best.1) {
                        *best = (d2, i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < T::zero() {
                    (left, right)
                } else {
                    (right, left)
                };
                self.nearest_in(points, q, near, best);
                // Sites on the median itself may sit in either child, so only
                // a strictly larger plane gap allows skipping.
                if diff * diff <= best.0 {
                    self.nearest_in(points, q, far, best);
                }
            }
        }
    }

    /// Indices of every site whose distance (as `sqrt(dist_sq)`) is `<= radius`.
    pub(crate) fn within(&self, points: &[Point<T>], q: &[T], radius: T, out: &mut Vec<usize>) {
        if !self.nodes.is_empty() {
            let prune = radius * (T::one() + T::epsilon() * T::lit(16.0));
            self.within_in(points, q, radius, prune, 0, out);
        }
    }

    fn within_in(
        &self,
        points: &[Point<T>],
        q: &[T],
        radius: T,
        prune: T,
        node: usize,
        out: &mut Vec<usize>,
    ) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if dist_sq(q, points[i].coords()).sqrt() <= radius {
                        out.push(i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                if diff <= prune {
                    self.within_in(points, q, radius, prune, left, out);
                }
                if -diff <= prune {
                    self.within_in(points, q, radius, prune, right, out);
                }
            }
        }
    }
}
