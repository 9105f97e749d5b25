//! Overlapping Gaussian components (Mix Mickey): single linkage chains the
//! components together, average linkage keeps them apart better.
//!
//! cargo run --release --example linkage_overlap

use skeleton_clust::bench::{adjusted_rand_index, gen_mix_mickey};
use skeleton_clust::knots::kmeans;
use skeleton_clust::pipeline::segment_knots;
use skeleton_clust::weights::WeightParams;
use skeleton_clust::{KMeansConfig, Linkage, Result, Seed, WeightKind};

fn main() -> Result<()> {
    let ds = gen_mix_mickey(Seed(7))?;
    let cfg = KMeansConfig {
        restarts: 20,
        seed: Seed(8),
        ..KMeansConfig::default()
    };
    let knots = kmeans(&ds.data, &cfg)?;
    for linkage in Linkage::ALL {
        let run = segment_knots(
            &ds.data,
            knots.clone(),
            WeightKind::Voronoi,
            &WeightParams::default(),
            linkage,
            3,
        )?;
        let ari = adjusted_rand_index(&ds.truth, &run.result.labels)?;
        println!("{:>8}: ARI {ari:.3}", linkage.as_str());
    }
    Ok(())
}
