//! Dropping the lowest-density observations (distance to the sqrt(n)-th
//! nearest neighbor) before clustering a noisy sample.
//!
//! cargo run --release --example denoise

use skeleton_clust::bench::{add_noise_points, adjusted_rand_index, gen_yinyang, knn_density_denoise};
use skeleton_clust::knots::KMeansConfig;
use skeleton_clust::{Result, Seed, SkeletonClustering};

fn main() -> Result<()> {
    let noisy = add_noise_points(&gen_yinyang(2, Seed(1))?, 0.2, Seed(1).derive(1))?;
    let noise_label = noisy.noise_label.expect("noise was added");
    let mut cfg = SkeletonClustering::new(5);
    cfg.kmeans = KMeansConfig {
        restarts: 20,
        seed: Seed(2),
        ..KMeansConfig::default()
    };

    for frac in [0.0, 0.1, 0.2] {
        let cleaned = knn_density_denoise(&noisy, frac)?;
        let ds = &cleaned.dataset;
        let left = ds.truth.iter().filter(|&&t| t == noise_label).count();
        let run = cfg.fit(&ds.data)?;
        let signal = ds.signal_indices();
        let truth: Vec<usize> = signal.iter().map(|&i| ds.truth[i]).collect();
        let pred: Vec<usize> = signal.iter().map(|&i| run.result.labels[i]).collect();
        println!(
            "drop {:>3.0}%: kept {:>4}, noise left {:>3}, signal ARI {:.3}",
            frac * 100.0,
            ds.n(),
            left,
            adjusted_rand_index(&truth, &pred)?
        );
    }
    Ok(())
}
