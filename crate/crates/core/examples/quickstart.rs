//! Cluster the Yinyang shape, embedded in 10 dimensions, end to end and
//! score it against the truth.
//!
//! cargo run --release --example quickstart

use skeleton_clust::bench::{adjusted_rand_index, gen_yinyang};
use skeleton_clust::knots::KMeansConfig;
use skeleton_clust::{Result, Seed, SkeletonClustering};

fn main() -> Result<()> {
    let ds = gen_yinyang(10, Seed(1))?;
    let mut cfg = SkeletonClustering::new(5);
    cfg.kmeans = KMeansConfig {
        restarts: 50,
        seed: Seed(2),
        ..KMeansConfig::default()
    };
    let run = cfg.fit(&ds.data)?;
    let ari = adjusted_rand_index(&ds.truth, &run.result.labels)?;
    println!(
        "n={} k={} edges={} clusters={} ARI={ari:.3}",
        ds.n(),
        run.skeleton.k(),
        run.skeleton.edges.len(),
        run.result.n_clusters
    );
    Ok(())
}
