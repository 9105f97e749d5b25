//! Uniform background noise: with extra clusters the noise is split off into
//! small groups, so recovery of the true shapes improves as S grows past the
//! number of components. ARI is computed on signal points only.
//!
//! cargo run --release --example noise_robustness

use skeleton_clust::bench::{adjusted_rand_index, prepare_dataset, GeneratorKind};
use skeleton_clust::knots::kmeans;
use skeleton_clust::pipeline::segment_knots;
use skeleton_clust::segmentation::{assign_labels, cut_dendrogram};
use skeleton_clust::weights::WeightParams;
use skeleton_clust::{KMeansConfig, Linkage, Result, Seed, WeightKind};

fn main() -> Result<()> {
    let (ds, signal) = prepare_dataset(GeneratorKind::Yinyang, 10, 1, 0.2, 0.0)?;
    let cfg = KMeansConfig {
        restarts: 20,
        seed: Seed(2),
        ..KMeansConfig::default()
    };
    let knots = kmeans(&ds.data, &cfg)?;
    let run = segment_knots(
        &ds.data,
        knots,
        WeightKind::Voronoi,
        &WeightParams::default(),
        Linkage::Single,
        1,
    )?;
    let truth: Vec<usize> = signal.iter().map(|&i| ds.truth[i]).collect();
    println!("n={} ({} signal), k={}", ds.n(), signal.len(), run.skeleton.k());
    for s in 5..=14 {
        let groups = cut_dendrogram(&run.dendrogram, s)?;
        let labels = assign_labels(&groups, &run.skeleton.knots)?.labels;
        let pred: Vec<usize> = signal.iter().map(|&i| labels[i]).collect();
        println!("S={s:>2}  ARI {:.3}", adjusted_rand_index(&truth, &pred)?);
    }
    Ok(())
}
