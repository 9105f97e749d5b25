//! Approximate Delaunay skeleton over the knots.
//!
//! Knots `j` and `ℓ` are joined when at least one observation has them as
//! its two nearest knots. Such a witness lies in the region where the two
//! Voronoi cells meet, so in general position every edge found here is also
//! an edge of the exact Delaunay triangulation.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::base::DataMatrix;
use crate::error::{Result, SkeletonError};
use crate::knots::KnotSet;

/// Sorted unique knot pairs `(j, ℓ)`, `j < ℓ`, with the number of
/// observations whose two nearest knots are exactly that pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeList {
    pub pairs: Vec<(usize, usize)>,
    pub evidence: Vec<usize>,
}

impl EdgeList {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn position(&self, j: usize, l: usize) -> Option<usize> {
        let key = (j.min(l), j.max(l));
        self.pairs.binary_search(&key).ok()
    }

    pub fn evidence_for(&self, j: usize, l: usize) -> usize {
        self.position(j, l).map_or(0, |p| self.evidence[p])
    }
}

/// Edges witnessed by the 2-NN assignments of `knots`.
pub fn approx_delaunay(knots: &KnotSet) -> EdgeList {
    if knots.k() < 2 {
        return EdgeList::default();
    }
    let mut keys: Vec<(usize, usize)> = knots
        .assign1
        .iter()
        .zip(&knots.assign2)
        .map(|(&a, &b)| (a.min(b), a.max(b)))
        .collect();
    keys.sort_unstable();
    let mut out = EdgeList::default();
    for key in keys {
        match out.pairs.last() {
            Some(&last) if last == key => *out.evidence.last_mut().unwrap() += 1,
            _ => {
                out.pairs.push(key);
                out.evidence.push(1);
            }
        }
    }
    out
}

/// Edge weight estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    #[default]
    Voronoi,
    Face,
    Tube,
    /// Inverse mean distance between the two cells; the density-free baseline.
    AvgDist,
}

impl WeightKind {
    pub const ALL: [WeightKind; 4] = [
        WeightKind::Voronoi,
        WeightKind::Face,
        WeightKind::Tube,
        WeightKind::AvgDist,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::Voronoi => "voronoi",
            WeightKind::Face => "face",
            WeightKind::Tube => "tube",
            WeightKind::AvgDist => "avgdist",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightKind {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "voronoi" | "vd" => Ok(WeightKind::Voronoi),
            "face" | "fd" => Ok(WeightKind::Face),
            "tube" | "td" => Ok(WeightKind::Tube),
            "avgdist" | "ad" => Ok(WeightKind::AvgDist),
            _ => Err(SkeletonError::invalid(format!(
                "unknown weight kind '{s}' (expected voronoi, face, tube or avgdist)"
            ))),
        }
    }
}

/// Why an edge weight fell back to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightWarning {
    CoincidentKnots,
    TooFewPoints,
    ZeroSpread,
    EmptyTube,
    EmptyCell,
}

/// Knots, edges and per-edge similarities.
#[derive(Debug, Clone)]
pub struct SkeletonGraph {
    pub knots: KnotSet,
    pub edges: EdgeList,
    pub weights: Vec<f64>,
    pub warnings: Vec<Option<WeightWarning>>,
    pub weight_kind: WeightKind,
}

impl SkeletonGraph {
    pub fn k(&self) -> usize {
        self.knots.k()
    }

    pub fn to_document(&self) -> SkeletonDocument {
        SkeletonDocument {
            knots: self.knots.centers.iter_rows().map(<[f64]>::to_vec).collect(),
            edges: self.edges.pairs.iter().map(|&(a, b)| [a, b]).collect(),
            evidence: self.edges.evidence.clone(),
            weights: self.weights.clone(),
            weight_kind: self.weight_kind,
        }
    }
}

/// Serialized skeleton: enough to redo the segmentation without the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonDocument {
    pub knots: Vec<Vec<f64>>,
    pub edges: Vec<[usize; 2]>,
    pub evidence: Vec<usize>,
    pub weights: Vec<f64>,
    pub weight_kind: WeightKind,
}

impl SkeletonDocument {
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let doc: Self = serde_json::from_reader(r)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn k(&self) -> usize {
        self.knots.len()
    }

    pub fn centers(&self) -> Result<DataMatrix> {
        DataMatrix::from_rows(&self.knots)
    }

    pub fn edge_list(&self) -> EdgeList {
        EdgeList {
            pairs: self.edges.iter().map(|e| (e[0], e[1])).collect(),
            evidence: self.evidence.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        let m = self.edges.len();
        if self.weights.len() != m || self.evidence.len() != m {
            return Err(SkeletonError::invalid(format!(
                "skeleton has {m} edges but {} weights and {} evidence counts",
                self.weights.len(),
                self.evidence.len()
            )));
        }
        let k = self.k();
        for w in self.edges.windows(2) {
            if (w[0][0], w[0][1]) >= (w[1][0], w[1][1]) {
                return Err(SkeletonError::invalid("skeleton edges must be sorted and unique"));
            }
        }
        for (e, &wt) in self.edges.iter().zip(&self.weights) {
            if e[0] >= e[1] || e[1] >= k {
                return Err(SkeletonError::invalid(format!("bad edge {:?} for {k} knots", e)));
            }
            if !(wt.is_finite() && wt >= 0.0) {
                return Err(SkeletonError::invalid(format!("bad weight {wt} on edge {:?}", e)));
            }
        }
        Ok(())
    }
}
