//! Independent reference implementations used by the integration tests.
//!
//! Everything here is written for clarity rather than speed and shares no
//! code with the library beyond its data types.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use skeleton_clust::DataMatrix;

pub fn naive_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += (x - y) * (x - y);
    }
    s
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DataMatrix {
    let values = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
    DataMatrix::new(rows, cols, values).unwrap()
}

/// Integer lattice points in `[0, side)^cols`, so that distance ties occur.
pub fn lattice_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, side: u32) -> DataMatrix {
    let values = (0..rows * cols).map(|_| rng.random_range(0..side) as f64).collect();
    DataMatrix::new(rows, cols, values).unwrap()
}

/// Nearest and second-nearest center by sorting all distances; equal
/// distances go to the lower index.
pub fn brute_two_nearest(x: &[f64], centers: &DataMatrix) -> (usize, usize) {
    let mut all: Vec<(f64, usize)> = centers
        .iter_rows()
        .enumerate()
        .map(|(j, c)| (naive_sq_dist(x, c), j))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    (all[0].1, all[1].1)
}

/// Number of observations whose two nearest centers are `{j, l}`.
pub fn brute_pair_count(data: &DataMatrix, centers: &DataMatrix, j: usize, l: usize) -> usize {
    data.iter_rows()
        .filter(|x| {
            let (a, b) = brute_two_nearest(x, centers);
            (a == j && b == l) || (a == l && b == j)
        })
        .count()
}

pub fn brute_voronoi_density(data: &DataMatrix, centers: &DataMatrix, j: usize, l: usize) -> f64 {
    let count = brute_pair_count(data, centers, j, l);
    let dist = naive_sq_dist(centers.row(j), centers.row(l)).sqrt();
    let mass = count as f64 / data.rows() as f64;
    mass / dist
}

/// Unordered center pairs that occur as (nearest, second nearest) for some
/// observation, sorted.
pub fn brute_witness_edges(data: &DataMatrix, centers: &DataMatrix) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = data
        .iter_rows()
        .map(|x| {
            let (a, b) = brute_two_nearest(x, centers);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

fn gaussian(u: f64) -> f64 {
    (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn sd_unbiased(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Signed position of `x` along the direction from `cj` to `cl`, measured
/// from `cj`, and the perpendicular distance to that line.
pub fn line_coordinates(x: &[f64], cj: &[f64], cl: &[f64]) -> (f64, f64) {
    let u: Vec<f64> = cl.iter().zip(cj).map(|(b, a)| b - a).collect();
    let len = naive_sq_dist(cj, cl).sqrt();
    let along: f64 = x.iter().zip(cj).zip(&u).map(|((xv, a), uv)| (xv - a) * uv).sum::<f64>() / len;
    let total = naive_sq_dist(x, cj);
    let perp = (total - along * along).max(0.0).sqrt();
    (along, perp)
}

fn kde(positions: &[f64], at: f64, h: f64, n: usize) -> f64 {
    positions.iter().map(|s| gaussian((s - at) / h)).sum::<f64>() / (n as f64 * h)
}

/// Gaussian face density of `(j, l)` with the `(4/3) sd n_loc^rate`
/// bandwidth, projecting only the observations whose nearest center is `j`
/// or `l`.
pub fn naive_face_density(data: &DataMatrix, centers: &DataMatrix, j: usize, l: usize, rate: f64) -> f64 {
    let (cj, cl) = (centers.row(j), centers.row(l));
    let positions: Vec<f64> = data
        .iter_rows()
        .filter(|x| {
            let a = brute_two_nearest(x, centers).0;
            a == j || a == l
        })
        .map(|x| line_coordinates(x, cj, cl).0)
        .collect();
    let h = 4.0 / 3.0 * sd_unbiased(&positions) * (positions.len() as f64).powf(rate);
    let len = naive_sq_dist(cj, cl).sqrt();
    kde(&positions, len / 2.0, h, data.rows())
}

/// Gaussian tube density of `(j, l)`: minimum over `grid` equally spaced
/// positions on the segment of the KDE of all observations within
/// perpendicular distance `radius` of the line.
pub fn naive_tube_density(
    data: &DataMatrix,
    centers: &DataMatrix,
    j: usize,
    l: usize,
    rate: f64,
    radius: f64,
    grid: usize,
) -> f64 {
    let (cj, cl) = (centers.row(j), centers.row(l));
    let positions: Vec<f64> = data
        .iter_rows()
        .map(|x| line_coordinates(x, cj, cl))
        .filter(|&(_, perp)| perp <= radius)
        .map(|(s, _)| s)
        .collect();
    let h = 4.0 / 3.0 * sd_unbiased(&positions) * (positions.len() as f64).powf(rate);
    let len = naive_sq_dist(cj, cl).sqrt();
    (0..grid)
        .map(|g| kde(&positions, len * g as f64 / (grid - 1) as f64, h, data.rows()))
        .fold(f64::INFINITY, f64::min)
}

/// `sqrt` of the mean over centers of the mean squared distance of their
/// cell's members.
pub fn naive_tube_radius(data: &DataMatrix, centers: &DataMatrix) -> f64 {
    let k = centers.rows();
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for x in data.iter_rows() {
        let a = brute_two_nearest(x, centers).0;
        sums[a] += naive_sq_dist(x, centers.row(a));
        counts[a] += 1;
    }
    let mean: f64 = (0..k).map(|j| sums[j] / counts[j] as f64).sum::<f64>() / k as f64;
    mean.sqrt()
}

/// One merge of the reference agglomeration: `(id_a, id_b, height)` with
/// `id_a < id_b`, leaves `0..k` and merge `s` creating id `k + s`.
pub type NaiveMerge = (usize, usize, f64);

/// Textbook agglomeration. Every step recomputes every group distance from
/// the original matrix; ties go to the smallest `(min id, max id)`.
pub fn naive_agglomerate(dist: &[Vec<f64>], linkage: &str) -> Vec<NaiveMerge> {
    let k = dist.len();
    let mut groups: Vec<(usize, Vec<usize>)> = (0..k).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    for step in 0..k.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for p in 0..groups.len() {
            for q in p + 1..groups.len() {
                let (ga, gb) = (&groups[p].1, &groups[q].1);
                let mut all = Vec::new();
                for &a in ga {
                    for &b in gb {
                        all.push(dist[a][b]);
                    }
                }
                let d = match linkage {
                    "single" => all.iter().cloned().fold(f64::INFINITY, f64::min),
                    "complete" => all.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    "average" => all.iter().sum::<f64>() / all.len() as f64,
                    other => panic!("unknown linkage {other}"),
                };
                let (ia, ib) = (groups[p].0.min(groups[q].0), groups[p].0.max(groups[q].0));
                let better = match best {
                    None => true,
                    Some((bd, ba, bb, _, _)) => d < bd || (d == bd && (ia, ib) < (ba, bb)),
                };
                if better {
                    best = Some((d, ia, ib, p, q));
                }
            }
        }
        let (d, ia, ib, p, q) = best.unwrap();
        let mut members = groups[p].1.clone();
        members.extend_from_slice(&groups[q].1);
        groups.remove(q);
        groups.remove(p);
        groups.push((k + step, members));
        merges.push((ia, ib, d));
    }
    merges
}

/// Kruskal minimum spanning forest weights, sorted ascending.
pub fn kruskal_weights(k: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
    let mut sorted = edges.to_vec();
    sorted.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut out = Vec::new();
    for (a, b, w) in sorted {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            out.push(w);
        }
    }
    out
}

/// Adjusted Rand index by enumerating every pair of observations.
pub fn pair_enumeration_ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut neither) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => both += 1.0,
                (true, false) => only_a += 1.0,
                (false, true) => only_b += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    let num = 2.0 * (both * neither - only_a * only_b);
    let den = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
    num / den
}

/// Exact 2-D Delaunay edges by the empty-circumcircle test over all
/// triangles. Assumes general position.
pub fn exact_delaunay_edges(points: &[[f64; 2]]) -> Vec<(usize, usize)> {
    let k = points.len();
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let (pa, pb, pc) = (points[a], points[b], points[c]);
                let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]);
                if det.abs() < 1e-14 {
                    continue;
                }
                let empty = (0..k)
                    .filter(|&m| m != a && m != b && m != c)
                    .all(|m| !in_circumcircle(pa, pb, pc, points[m]));
                if empty {
                    edges.extend([(a, b), (a, c), (b, c)]);
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

fn in_circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2], p: [f64; 2]) -> bool {
    let orient = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let row = |q: [f64; 2]| {
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        (dx, dy, dx * dx + dy * dy)
    };
    let (ax, ay, a2) = row(a);
    let (bx, by, b2) = row(b);
    let (cx, cy, c2) = row(c);
    let det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    if orient > 0.0 {
        det > 0.0
    } else {
        det < 0.0
    }
}

/// Polygon clipped to the half-plane `n . x <= c` (Sutherland-Hodgman).
fn clip(poly: &[[f64; 2]], n: [f64; 2], c: f64) -> Vec<[f64; 2]> {
    let inside = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] <= c;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (ip, iq) = (inside(p), inside(q));
        if ip {
            out.push(p);
        }
        if ip != iq {
            let fp = n[0] * p[0] + n[1] * p[1] - c;
            let fq = n[0] * q[0] + n[1] * q[1] - c;
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        s += p[0] * q[1] - q[0] * p[1];
    }
    s.abs() / 2.0
}

/// Area of the part of the unit square whose two nearest knots are `j` and
/// `l`: every other knot must be farther than both.
pub fn two_nn_region_area(knots: &[[f64; 2]], j: usize, l: usize) -> f64 {
    let mut poly = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    for (m, &pm) in knots.iter().enumerate() {
        if m == j || m == l {
            continue;
        }
        for near in [knots[j], knots[l]] {
            // |x - near|^2 <= |x - pm|^2  <=>  2 (pm - near) . x <= |pm|^2 - |near|^2
            let n = [2.0 * (pm[0] - near[0]), 2.0 * (pm[1] - near[1])];
            let c = pm[0] * pm[0] + pm[1] * pm[1] - near[0] * near[0] - near[1] * near[1];
            poly = clip(&poly, n, c);
            if poly.is_empty() {
                return 0.0;
            }
        }
    }
    polygon_area(&poly)
}

/// Haar-ish random orthogonal matrix (row-major) by Gram-Schmidt on a
/// Gaussian matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
    while rows.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for r in &rows {
            let dot: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(r) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            rows.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    rows
}

pub fn rotate(data: &DataMatrix, q: &[Vec<f64>]) -> DataMatrix {
    let rows: Vec<Vec<f64>> = data
        .iter_rows()
        .map(|x| q.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
        .collect();
    DataMatrix::from_rows(&rows).unwrap()
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        (values[m / 2 - 1] + values[m / 2]) / 2.0
    }
}
