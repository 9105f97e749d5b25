//! Euclidean distances and exact two-nearest-knot queries.
//!
//! Low-dimensional queries go through a k-d tree; above
//! [`KD_TREE_MAX_DIM`] dimensions partitioning stops paying off and a plain
//! scan over the knots is used instead. Both paths compute squared distances
//! with the same summation order, so they agree bit for bit, including on
//! ties (resolved toward the lower knot index).

use rayon::prelude::*;

use crate::base::DataMatrix;
use crate::error::{Result, SkeletonError};

/// Largest ambient dimension served by the k-d tree backend.
pub const KD_TREE_MAX_DIM: usize = 20;

const LEAF_SIZE: usize = 4;

/// Squared Euclidean distance. Four independent partial sums let the
/// compiler vectorize; the summation order is fixed, so results are
/// reproducible across backends.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            let t = x[l] - y[l];
            acc[l] += t * t;
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += (x - y) * (x - y);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `‖a − b‖₂`, checking that the dimensions agree.
pub fn euclidean_dist(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(SkeletonError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(sq_dist(a, b).sqrt())
}

/// Running pair of best `(squared distance, index)` candidates, ordered
/// lexicographically so equal distances prefer the smaller index.
#[derive(Clone, Copy, Debug)]
struct BestTwo {
    first: (f64, usize),
    second: (f64, usize),
}

impl BestTwo {
    fn new() -> Self {
        Self {
            first: (f64::INFINITY, usize::MAX),
            second: (f64::INFINITY, usize::MAX),
        }
    }

    #[inline]
    fn offer(&mut self, d2: f64, idx: usize) {
        let cand = (d2, idx);
        if less(cand, self.first) {
            self.second = self.first;
            self.first = cand;
        } else if less(cand, self.second) {
            self.second = cand;
        }
    }
}

#[inline]
fn less(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Nearest and second-nearest knot for every row of `points`.
pub fn two_nearest_knots(points: &DataMatrix, centers: &DataMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    if centers.rows() < 2 {
        return Err(SkeletonError::invalid(format!(
            "two nearest knots need at least 2 knots, got {}",
            centers.rows()
        )));
    }
    if points.cols() != centers.cols() {
        return Err(SkeletonError::DimensionMismatch {
            expected: centers.cols(),
            got: points.cols(),
        });
    }
    let pairs: Vec<(usize, usize)> = if centers.cols() <= KD_TREE_MAX_DIM {
        let tree = KdTree::build(centers);
        (0..points.rows())
            .into_par_iter()
            .map(|i| tree.two_nearest(points.row(i)))
            .collect()
    } else {
        (0..points.rows())
            .into_par_iter()
            .map(|i| scan_two_nearest(points.row(i), centers))
            .collect()
    };
    Ok(pairs.into_iter().unzip())
}

/// Exhaustive scan over all knots.
pub fn scan_two_nearest(x: &[f64], centers: &DataMatrix) -> (usize, usize) {
    let mut best = BestTwo::new();
    for (j, c) in centers.iter_rows().enumerate() {
        best.offer(sq_dist(x, c), j);
    }
    (best.first.1, best.second.1)
}

#[derive(Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        dim: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static k-d tree over a (small) set of knots.
#[derive(Debug)]
pub struct KdTree<'a> {
    centers: &'a DataMatrix,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub fn build(centers: &'a DataMatrix) -> Self {
        let mut tree = KdTree {
            centers,
            order: (0..centers.rows()).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, centers.rows());
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let d = self.centers.cols();
        let mut dim = 0;
        let mut spread = -1.0;
        for k in 0..d {
            let (lo, hi) = self.order[start..end]
                .iter()
                .map(|&j| self.centers.row(j)[k])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi - lo > spread {
                spread = hi - lo;
                dim = k;
            }
        }
        let mid = start + (end - start) / 2;
        let centers = self.centers;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centers.row(a)[dim].total_cmp(&centers.row(b)[dim]).then(a.cmp(&b))
        });
        let value = centers.row(self.order[mid])[dim];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            dim,
            value,
            left,
            right,
        };
        id
    }

    pub fn two_nearest(&self, x: &[f64]) -> (usize, usize) {
        let mut best = BestTwo::new();
        self.search(0, x, &mut best);
        (best.first.1, best.second.1)
    }

    fn search(&self, node: usize, x: &[f64], best: &mut BestTwo) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    best.offer(sq_dist(x, self.centers.row(j)), j);
                }
            }
            Node::Split {
                dim,
                value,
                left,
                right,
            } => {
                let diff = x[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, x, best);
                // Equality must still descend: a tie on the far side can win
                // on index.
                if diff * diff <= best.second.0 {
                    self.search(far, x, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Seed;
    use rand::Rng;

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_dist(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(euclidean_dist(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), 0.0);
        assert_eq!(
            euclidean_dist(&[1.0, 1.0, 1.0, 1.0], &[0.0, 0.0, 0.0, 0.0]).unwrap(),
            2.0
        );
        assert!(matches!(
            euclidean_dist(&[1.0], &[1.0, 2.0]),
            Err(SkeletonError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn simple_two_nearest() {
        let pts = DataMatrix::from_rows(&[[0.0, 0.0]]).unwrap();
        let centers = DataMatrix::from_rows(&[[1.0, 0.0], [-2.0, 0.0], [0.0, 3.0]]).unwrap();
        let (a1, a2) = two_nearest_knots(&pts, &centers).unwrap();
        assert_eq!((a1[0], a2[0]), (0, 1));
    }

    #[test]
    fn ties_go_to_lower_index() {
        // Point at the origin is at distance 1 from knots 2 and 5, further from the rest.
        let centers = DataMatrix::from_rows(&[
            [4.0, 4.0],
            [-4.0, 4.0],
            [1.0, 0.0],
            [4.0, -4.0],
            [-4.0, -4.0],
            [-1.0, 0.0],
        ])
        .unwrap();
        let pts = DataMatrix::from_rows(&[[0.0, 0.0]]).unwrap();
        let (a1, a2) = two_nearest_knots(&pts, &centers).unwrap();
        assert_eq!((a1[0], a2[0]), (2, 5));
        let mut padded = Vec::new();
        for r in centers.iter_rows() {
            let mut v = r.to_vec();
            v.resize(30, 0.0);
            padded.push(v);
        }
        let centers30 = DataMatrix::from_rows(&padded).unwrap();
        let (b1, b2) = two_nearest_knots(&pts.pad_zero_columns(28), &centers30).unwrap();
        assert_eq!((b1[0], b2[0]), (2, 5));
    }

    #[test]
    fn needs_two_knots() {
        let pts = DataMatrix::from_rows(&[[0.0]]).unwrap();
        let centers = DataMatrix::from_rows(&[[1.0]]).unwrap();
        assert!(matches!(
            two_nearest_knots(&pts, &centers),
            Err(SkeletonError::InvalidArgument(_))
        ));
    }

    #[test]
    fn kd_tree_matches_scan_on_grid_ties() {
        // Integer lattice knots give many exact ties.
        let mut c = Vec::new();
        for x in 0..6 {
            for y in 0..5 {
                c.push([x as f64, y as f64]);
            }
        }
        let centers = DataMatrix::from_rows(&c).unwrap();
        let mut rng = Seed(3).rng();
        let mut p = Vec::new();
        for _ in 0..500 {
            // half-integer coordinates sit exactly between knots
            p.push([
                rng.random_range(0..12) as f64 * 0.5,
                rng.random_range(0..10) as f64 * 0.5,
            ]);
        }
        let pts = DataMatrix::from_rows(&p).unwrap();
        let (a1, a2) = two_nearest_knots(&pts, &centers).unwrap();
        for i in 0..pts.rows() {
            assert_eq!((a1[i], a2[i]), scan_two_nearest(pts.row(i), &centers));
        }
    }
}
