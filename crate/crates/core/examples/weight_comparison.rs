//! Voronoi, face and tube density against the average-distance baseline on
//! one knot fit, in low and high dimension.
//!
//! cargo run --release --example weight_comparison

use skeleton_clust::bench::{adjusted_rand_index, gen_yinyang};
use skeleton_clust::knots::kmeans;
use skeleton_clust::pipeline::segment_knots;
use skeleton_clust::weights::WeightParams;
use skeleton_clust::{KMeansConfig, Linkage, Result, Seed, WeightKind};

fn main() -> Result<()> {
    for d in [2, 100] {
        let ds = gen_yinyang(d, Seed(3))?;
        let cfg = KMeansConfig {
            restarts: 20,
            seed: Seed(4),
            ..KMeansConfig::with_k(57)
        };
        let knots = kmeans(&ds.data, &cfg)?;
        let mut line = format!("d={d:>3}:");
        for kind in WeightKind::ALL {
            let run = segment_knots(
                &ds.data,
                knots.clone(),
                kind,
                &WeightParams::default(),
                Linkage::Single,
                5,
            )?;
            let ari = adjusted_rand_index(&ds.truth, &run.result.labels)?;
            line.push_str(&format!("  {kind}={ari:.3}"));
        }
        println!("{line}");
    }
    Ok(())
}
