//! Face density under different bandwidth rate exponents `h ∝ n_loc^rate`.
//!
//! cargo run --release --example bandwidth_rates

use skeleton_clust::bench::{adjusted_rand_index, gen_yinyang};
use skeleton_clust::knots::kmeans;
use skeleton_clust::pipeline::segment_knots;
use skeleton_clust::weights::{BandwidthRule, WeightParams};
use skeleton_clust::{KMeansConfig, Linkage, Result, Seed, WeightKind};

fn main() -> Result<()> {
    let ds = gen_yinyang(10, Seed(1))?;
    let cfg = KMeansConfig {
        restarts: 20,
        seed: Seed(2),
        ..KMeansConfig::with_k(57)
    };
    let knots = kmeans(&ds.data, &cfg)?;
    for rate in [-1.0 / 3.0, -0.25, -0.2, -0.15, -0.1] {
        let params = WeightParams {
            bandwidth: BandwidthRule::SilvermanRate { rate_exponent: rate },
            ..WeightParams::default()
        };
        let run = segment_knots(&ds.data, knots.clone(), WeightKind::Face, &params, Linkage::Single, 5)?;
        println!(
            "rate {rate:>7.4}: ARI {:.3}",
            adjusted_rand_index(&ds.truth, &run.result.labels)?
        );
    }
    Ok(())
}
