//! Knot segmentation: agglomerative clustering of knots on inverse edge
//! weights, dendrogram cuts and label propagation to observations.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeletonError};
use crate::knots::KnotSet;
use crate::skeleton::EdgeList;

/// Distance assigned to knot pairs without an edge or with zero similarity.
/// Finite so that average-linkage updates stay finite.
pub const DISCONNECTED: f64 = 1e308;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Single,
    Average,
    Complete,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Single, Linkage::Average, Linkage::Complete];

    pub fn as_str(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        }
    }

    /// Lance–Williams update for the distance from `a ∪ b` to a third group.
    #[inline]
    fn update(self, d_a: f64, d_b: f64, n_a: usize, n_b: usize, d_ab: f64) -> f64 {
        match self {
            Linkage::Single => d_a.min(d_b),
            Linkage::Complete => d_a.max(d_b),
            Linkage::Average => {
                let n = (n_a + n_b) as f64;
                // weighted form avoids overflow next to the DISCONNECTED sentinel;
                // clamp absorbs rounding below the merge height
                (d_a * (n_a as f64 / n) + d_b * (n_b as f64 / n)).max(d_ab)
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Linkage {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            _ => Err(SkeletonError::invalid(format!(
                "unknown linkage '{s}' (expected single, average or complete)"
            ))),
        }
    }
}

/// Upper triangle of a symmetric `k x k` distance matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedDistances {
    k: usize,
    values: Vec<f64>,
}

impl CondensedDistances {
    pub fn new(k: usize, values: Vec<f64>) -> Result<Self> {
        let expected = k * k.saturating_sub(1) / 2;
        if values.len() != expected {
            return Err(SkeletonError::DimensionMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(SkeletonError::invalid(format!(
                "distances must be nonnegative, got {v}"
            )));
        }
        Ok(Self { k, values })
    }

    /// Builds from a full symmetric matrix given as a closure.
    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for i in 0..k {
            for j in i + 1..k {
                values.push(f(i, j));
            }
        }
        Self::new(k, values)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.k * i - i * (i + 1) / 2 + j - i - 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.values[self.index(i, j)]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Inverse similarities on skeleton edges; [`DISCONNECTED`] everywhere else.
pub fn similarity_to_distance(k: usize, edges: &EdgeList, weights: &[f64]) -> Result<CondensedDistances> {
    if weights.len() != edges.len() {
        return Err(SkeletonError::DimensionMismatch {
            expected: edges.len(),
            got: weights.len(),
        });
    }
    let mut values = vec![DISCONNECTED; k * k.saturating_sub(1) / 2];
    let mut out = CondensedDistances { k, values: Vec::new() };
    for (&(a, b), &w) in edges.pairs.iter().zip(weights) {
        if a == b || a.max(b) >= k {
            return Err(SkeletonError::invalid(format!("bad edge ({a}, {b}) for {k} knots")));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(SkeletonError::invalid(format!(
                "similarity must be finite and >= 0, got {w}"
            )));
        }
        if w > 0.0 {
            values[out.index(a, b)] = (1.0 / w).min(DISCONNECTED);
        }
    }
    out.values = values;
    Ok(out)
}

/// One agglomeration step. Leaves are `0..k`; the group formed by merge `s`
/// gets id `k + s`. Always `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
    pub linkage: Linkage,
}

#[derive(Serialize, Deserialize)]
struct DendrogramDocument {
    linkage: Linkage,
    leaves: usize,
    merges: Vec<(usize, usize, f64)>,
}

impl Dendrogram {
    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        let doc = DendrogramDocument {
            linkage: self.linkage,
            leaves: self.leaves,
            merges: self.merges.iter().map(|m| (m.a, m.b, m.height)).collect(),
        };
        serde_json::to_writer(&mut w, &doc)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let doc: DendrogramDocument = serde_json::from_reader(r)?;
        let k = doc.leaves;
        if k == 0 || doc.merges.len() != k - 1 {
            return Err(SkeletonError::invalid("dendrogram needs leaves - 1 merges"));
        }
        let mut sizes: Vec<usize> = vec![1; k];
        let mut used = vec![false; 2 * k - 1];
        let mut merges = Vec::with_capacity(k - 1);
        for (s, (a, b, height)) in doc.merges.into_iter().enumerate() {
            if a >= b || b >= k + s || used[a] || used[b] {
                return Err(SkeletonError::invalid(format!("invalid merge ({a}, {b}) at step {s}")));
            }
            used[a] = true;
            used[b] = true;
            let size = sizes[a] + sizes[b];
            sizes.push(size);
            merges.push(Merge { a, b, height, size });
        }
        Ok(Self {
            leaves: k,
            merges,
            linkage: doc.linkage,
        })
    }
}

/// Agglomerates the `k` items of `dist` with the chosen linkage.
///
/// At each step the closest pair of active groups is merged; equal distances
/// go to the pair with the smallest `(min id, max id)`. Every active row
/// caches its best partner, so only rows that pointed at a merged group are
/// rescanned.
#[allow(clippy::needless_range_loop)]
pub fn hierarchical_cluster(dist: &CondensedDistances, linkage: Linkage) -> Result<Dendrogram> {
    let k = dist.k();
    if k == 0 {
        return Err(SkeletonError::invalid("need at least one item to cluster"));
    }
    let mut d = vec![0.0f64; k * k];
    for i in 0..k {
        for j in i + 1..k {
            let v = dist.get(i, j);
            d[i * k + j] = v;
            d[j * k + i] = v;
        }
    }
    let mut active = vec![true; k];
    let mut ids: Vec<usize> = (0..k).collect();
    let mut sizes = vec![1usize; k];

    // Key ordering pairs: (distance, smaller id, larger id).
    let key = |d: &[f64], ids: &[usize], i: usize, j: usize| -> (f64, usize, usize) {
        let (x, y) = (ids[i], ids[j]);
        (d[i * k + j], x.min(y), x.max(y))
    };
    let better = |a: (f64, usize, usize), b: (f64, usize, usize)| -> bool {
        a.0 < b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2))
    };
    let scan_row = |d: &[f64], ids: &[usize], active: &[bool], i: usize| -> Option<usize> {
        let mut best: Option<(usize, (f64, usize, usize))> = None;
        for j in 0..k {
            if j == i || !active[j] {
                continue;
            }
            let kj = key(d, ids, i, j);
            if best.is_none_or(|(_, kb)| better(kj, kb)) {
                best = Some((j, kj));
            }
        }
        best.map(|(j, _)| j)
    };

    let mut nn: Vec<Option<usize>> = (0..k).map(|i| scan_row(&d, &ids, &active, i)).collect();
    let mut merges = Vec::with_capacity(k - 1);

    for step in 0..k - 1 {
        let mut pick: Option<(usize, usize, (f64, usize, usize))> = None;
        for i in 0..k {
            if !active[i] {
                continue;
            }
            if let Some(j) = nn[i] {
                let kij = key(&d, &ids, i, j);
                if pick.is_none_or(|(_, _, kb)| better(kij, kb)) {
                    pick = Some((i, j, kij));
                }
            }
        }
        let (s1, s2, (height, id_a, id_b)) = pick.expect("two active groups remain");
        let (keep, drop) = (s1.min(s2), s1.max(s2));
        let (n_keep, n_drop) = (sizes[keep], sizes[drop]);

        for i in 0..k {
            if !active[i] || i == keep || i == drop {
                continue;
            }
            let v = linkage.update(d[keep * k + i], d[drop * k + i], n_keep, n_drop, height);
            d[keep * k + i] = v;
            d[i * k + keep] = v;
        }
        active[drop] = false;
        sizes[keep] = n_keep + n_drop;
        ids[keep] = k + step;
        merges.push(Merge {
            a: id_a,
            b: id_b,
            height,
            size: sizes[keep],
        });

        nn[drop] = None;
        nn[keep] = scan_row(&d, &ids, &active, keep);
        for i in 0..k {
            if !active[i] || i == keep {
                continue;
            }
            match nn[i] {
                Some(j) if j == keep || j == drop => nn[i] = scan_row(&d, &ids, &active, i),
                Some(j) => {
                    if better(key(&d, &ids, i, keep), key(&d, &ids, i, j)) {
                        nn[i] = Some(keep);
                    }
                }
                None => nn[i] = scan_row(&d, &ids, &active, i),
            }
        }
    }

    Ok(Dendrogram {
        leaves: k,
        merges,
        linkage,
    })
}

/// Group index per leaf after undoing the last `S − 1` merges. Groups are
/// numbered by their smallest leaf.
pub fn cut_dendrogram(dendro: &Dendrogram, s: usize) -> Result<Vec<usize>> {
    let k = dendro.leaves;
    if s == 0 || s > k {
        return Err(SkeletonError::invalid(format!(
            "cluster count S = {s} outside [1, {k}]"
        )));
    }
    let mut parent: Vec<usize> = (0..2 * k - 1).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step, m) in dendro.merges.iter().take(k - s).enumerate() {
        let new = k + step;
        let ra = find(&mut parent, m.a);
        let rb = find(&mut parent, m.b);
        parent[ra] = new;
        parent[rb] = new;
    }
    let mut label_of_root = vec![usize::MAX; 2 * k - 1];
    let mut next = 0;
    let mut groups = Vec::with_capacity(k);
    for leaf in 0..k {
        let r = find(&mut parent, leaf);
        if label_of_root[r] == usize::MAX {
            label_of_root[r] = next;
            next += 1;
        }
        groups.push(label_of_root[r]);
    }
    Ok(groups)
}

/// Final labels for observations and the knot-to-group map they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub knot_groups: Vec<usize>,
    pub n_clusters: usize,
}

/// Each observation takes the group of its nearest knot.
pub fn assign_labels(knot_groups: &[usize], knots: &KnotSet) -> Result<ClusteringResult> {
    if knot_groups.len() != knots.k() {
        return Err(SkeletonError::DimensionMismatch {
            expected: knots.k(),
            got: knot_groups.len(),
        });
    }
    let n_clusters = knot_groups.iter().max().map_or(0, |&m| m + 1);
    Ok(ClusteringResult {
        labels: knots.assign1.iter().map(|&a| knot_groups[a]).collect(),
        knot_groups: knot_groups.to_vec(),
        n_clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::DataMatrix;

    fn three() -> CondensedDistances {
        CondensedDistances::new(3, vec![1.0, 5.0, 4.0]).unwrap()
    }

    #[test]
    fn inverse_similarity() {
        let edges = EdgeList {
            pairs: vec![(0, 1), (0, 2), (1, 2)],
            evidence: vec![1, 1, 1],
        };
        let d = similarity_to_distance(4, &edges, &[1.0, 0.25, 4.0]).unwrap();
        assert_eq!((d.get(0, 1), d.get(0, 2), d.get(1, 2)), (1.0, 4.0, 0.25));
        assert_eq!(d.get(0, 3), DISCONNECTED);
        let edges = EdgeList {
            pairs: vec![(0, 1)],
            evidence: vec![1],
        };
        assert_eq!(similarity_to_distance(2, &edges, &[2.0]).unwrap().get(1, 0), 0.5);
        assert_eq!(
            similarity_to_distance(2, &edges, &[0.0]).unwrap().get(0, 1),
            DISCONNECTED
        );
        assert!(similarity_to_distance(2, &edges, &[-1.0]).is_err());
    }

    #[test]
    fn three_point_single_and_complete() {
        let s = hierarchical_cluster(&three(), Linkage::Single).unwrap();
        assert_eq!((s.merges[0].a, s.merges[0].b, s.merges[0].height), (0, 1, 1.0));
        assert_eq!((s.merges[1].a, s.merges[1].b, s.merges[1].height), (2, 3, 4.0));
        let c = hierarchical_cluster(&three(), Linkage::Complete).unwrap();
        assert_eq!(c.merges[1].height, 5.0);
        let a = hierarchical_cluster(&three(), Linkage::Average).unwrap();
        assert_eq!(a.merges[1].height, 4.5);
    }

    #[test]
    fn cuts() {
        let s = hierarchical_cluster(&three(), Linkage::Single).unwrap();
        assert_eq!(cut_dendrogram(&s, 1).unwrap(), vec![0, 0, 0]);
        assert_eq!(cut_dendrogram(&s, 2).unwrap(), vec![0, 0, 1]);
        assert_eq!(cut_dendrogram(&s, 3).unwrap(), vec![0, 1, 2]);
        assert!(cut_dendrogram(&s, 0).is_err());
        assert!(cut_dendrogram(&s, 4).is_err());
    }

    #[test]
    fn disconnected_components_merge_last_in_index_order() {
        // Two components {0,1} and {2,3}, plus an isolated knot 4.
        let edges = EdgeList {
            pairs: vec![(0, 1), (2, 3)],
            evidence: vec![1, 1],
        };
        let d = similarity_to_distance(5, &edges, &[1.0, 2.0]).unwrap();
        for linkage in Linkage::ALL {
            let dendro = hierarchical_cluster(&d, linkage).unwrap();
            assert_eq!(cut_dendrogram(&dendro, 3).unwrap(), vec![0, 0, 1, 1, 2]);
            assert!(dendro.heights().iter().all(|h| h.is_finite()));
        }
        let single = hierarchical_cluster(&d, Linkage::Single).unwrap();
        assert_eq!(single.merges[2].height, DISCONNECTED);
        // {2,3} merges first (id 5), {0,1} second (id 6); among the sentinel
        // ties the pair (4, 5) has the smallest ids
        assert_eq!((single.merges[2].a, single.merges[2].b), (4, 5));
    }

    #[test]
    fn single_knot_dendrogram() {
        let d = CondensedDistances::new(1, vec![]).unwrap();
        let dendro = hierarchical_cluster(&d, Linkage::Single).unwrap();
        assert!(dendro.merges.is_empty());
        assert_eq!(cut_dendrogram(&dendro, 1).unwrap(), vec![0]);
    }

    #[test]
    fn dendrogram_json_roundtrip() {
        let dendro = hierarchical_cluster(&three(), Linkage::Average).unwrap();
        let mut buf = Vec::new();
        dendro.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"merges\":[[0,1,1.0],[2,3,4.5]]"), "{text}");
        assert_eq!(Dendrogram::read_json(&buf[..]).unwrap(), dendro);
        assert!(
            Dendrogram::read_json(&br#"{"linkage":"single","leaves":3,"merges":[[0,1,1.0],[0,2,2.0]]}"#[..]).is_err()
        );
    }

    #[test]
    fn labels_follow_nearest_knot() {
        let data = DataMatrix::from_rows(&[[0.0], [0.9], [2.1], [3.0]]).unwrap();
        let centers = DataMatrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let knots = KnotSet::from_centers(&data, centers).unwrap();
        let r = assign_labels(&[0, 0, 0, 0], &knots).unwrap();
        assert_eq!(r.labels, vec![0; 4]);
        assert_eq!(r.n_clusters, 1);
        let r = assign_labels(&[0, 0, 1, 1], &knots).unwrap();
        assert_eq!(r.labels, vec![0, 0, 1, 1]);
        assert!(assign_labels(&[0, 1], &knots).is_err());
    }
}
