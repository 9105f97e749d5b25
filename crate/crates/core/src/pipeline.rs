//! End-to-end skeleton clustering: knots, skeleton, weights, segmentation
//! and label assignment.

use serde::{Deserialize, Serialize};

use crate::base::DataMatrix;
use crate::error::{Result, SkeletonError};
use crate::knots::{kmeans_fit, KMeansConfig, KnotSet};
use crate::segmentation::{
    assign_labels, cut_dendrogram, hierarchical_cluster, similarity_to_distance, ClusteringResult, Dendrogram, Linkage,
};
use crate::skeleton::{approx_delaunay, SkeletonGraph, WeightKind};
use crate::weights::{weight_skeleton, WeightParams};

/// Everything needed to cluster a data matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonClustering {
    pub kmeans: KMeansConfig,
    pub weight: WeightKind,
    pub params: WeightParams,
    pub linkage: Linkage,
    /// Final number of clusters `S`.
    pub clusters: usize,
}

impl SkeletonClustering {
    pub fn new(clusters: usize) -> Self {
        Self {
            kmeans: KMeansConfig::default(),
            weight: WeightKind::Voronoi,
            params: WeightParams::default(),
            linkage: Linkage::Single,
            clusters,
        }
    }

    pub fn fit(&self, data: &DataMatrix) -> Result<ClusteringRun> {
        let fit = kmeans_fit(data, &self.kmeans)?;
        let mut run = segment_knots(data, fit.knots, self.weight, &self.params, self.linkage, self.clusters)?;
        run.kmeans_objective = Some(fit.objective);
        Ok(run)
    }
}

#[derive(Debug, Clone)]
pub struct ClusteringRun {
    pub skeleton: SkeletonGraph,
    pub dendrogram: Dendrogram,
    pub result: ClusteringResult,
    pub kmeans_objective: Option<f64>,
}

/// Steps 2 to 5 for already constructed knots. Lets several weightings or
/// linkages share one (expensive) knot fit.
pub fn segment_knots(
    data: &DataMatrix,
    knots: KnotSet,
    weight: WeightKind,
    params: &WeightParams,
    linkage: Linkage,
    clusters: usize,
) -> Result<ClusteringRun> {
    if clusters == 0 || clusters > knots.k() {
        return Err(SkeletonError::invalid(format!(
            "cluster count S = {clusters} outside [1, k = {}]",
            knots.k()
        )));
    }
    let edges = approx_delaunay(&knots);
    let skeleton = weight_skeleton(&edges, data, &knots, weight, params)?;
    let dendrogram = dendrogram_for(&skeleton, linkage)?;
    let groups = cut_dendrogram(&dendrogram, clusters)?;
    let result = assign_labels(&groups, &skeleton.knots)?;
    Ok(ClusteringRun {
        skeleton,
        dendrogram,
        result,
        kmeans_objective: None,
    })
}

pub fn dendrogram_for(skeleton: &SkeletonGraph, linkage: Linkage) -> Result<Dendrogram> {
    let dist = similarity_to_distance(skeleton.k(), &skeleton.edges, &skeleton.weights)?;
    hierarchical_cluster(&dist, linkage)
}
