//! Skeleton clustering for multivariate and high-dimensional data.
//!
//! The pipeline has five steps:
//!
//! 1. [`knots`]: overfitted k-means (`k ≈ √n`) places knots that summarize the data.
//! 2. [`skeleton`]: knots sharing a Voronoi boundary, as witnessed by some
//!    observation having both as its two nearest knots, are joined by an edge.
//! 3. [`weights`]: each edge gets a density-based similarity (Voronoi, face
//!    or tube density) that stays estimable in high dimension.
//! 4. [`segmentation`]: knots are agglomerated on inverse similarity and the
//!    dendrogram is cut into `S` groups.
//! 5. Every observation takes the group of its nearest knot.
//!
//! [`pipeline::SkeletonClustering`] runs all of it; [`bench`] holds the
//! synthetic benchmark shapes, the adjusted Rand index and the experiment
//! runner, and [`cli`] the command-line front end.
//!
//! ```
//! use skeleton_clust::bench::{adjusted_rand_index, gen_mickey};
//! use skeleton_clust::knots::KMeansConfig;
//! use skeleton_clust::pipeline::SkeletonClustering;
//! use skeleton_clust::Seed;
//!
//! let ds = gen_mickey(2, Seed(3)).unwrap();
//! let mut cfg = SkeletonClustering::new(3);
//! cfg.kmeans = KMeansConfig { restarts: 5, seed: Seed(4), ..KMeansConfig::default() };
//! let run = cfg.fit(&ds.data).unwrap();
//! assert_eq!(run.skeleton.k(), 35);
//! let ari = adjusted_rand_index(&ds.truth, &run.result.labels).unwrap();
//! assert!(ari > 0.5);
//! ```

pub mod base;
pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod knots;
pub mod nn;
pub mod pipeline;
pub mod segmentation;
pub mod skeleton;
pub mod weights;

pub use base::{DataMatrix, Seed};
pub use error::{Result, SkeletonError};
pub use knots::{KMeansConfig, KnotSet};
pub use pipeline::SkeletonClustering;
pub use segmentation::{ClusteringResult, Dendrogram, Linkage};
pub use skeleton::{SkeletonGraph, WeightKind};
