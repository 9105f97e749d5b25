//! Voronoi density converges as the sample grows: for fixed knots on the unit
//! square the relative edge error shrinks roughly like 1/sqrt(n).
//! The reference weights come from a very large sample.
//!
//! cargo run --release --example rate_check

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skeleton_clust::skeleton::{approx_delaunay, SkeletonGraph};
use skeleton_clust::weights::{weight_skeleton, WeightParams};
use skeleton_clust::{DataMatrix, KnotSet, Result, WeightKind};

fn uniform(n: usize, seed: u64) -> Result<DataMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DataMatrix::new(n, 2, (0..2 * n).map(|_| rng.random::<f64>()).collect())
}

fn skeleton(centers: &DataMatrix, n: usize, seed: u64) -> Result<SkeletonGraph> {
    let data = uniform(n, seed)?;
    let knots = KnotSet::from_centers(&data, centers.clone())?;
    let edges = approx_delaunay(&knots);
    weight_skeleton(&edges, &data, &knots, WeightKind::Voronoi, &WeightParams::default())
}

fn main() -> Result<()> {
    // a jittered 4 x 4 grid keeps every 2-NN region away from zero area
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut grid = Vec::with_capacity(32);
    for i in 0..4 {
        for j in 0..4 {
            for c in [i, j] {
                grid.push((c as f64 + 0.5) / 4.0 + (rng.random::<f64>() - 0.5) * 0.12);
            }
        }
    }
    let centers = DataMatrix::new(16, 2, grid)?;
    let reference = skeleton(&centers, 2_000_000, 0)?;
    for n in [1000, 4000, 16000, 64000] {
        let (mut worst, mut typical) = (Vec::new(), Vec::new());
        for seed in 1..=20 {
            let g = skeleton(&centers, n, seed)?;
            let mut errs: Vec<f64> = reference
                .edges
                .pairs
                .iter()
                .zip(&reference.weights)
                .map(|(&(j, l), &want)| {
                    let got = g.edges.position(j, l).map_or(0.0, |p| g.weights[p]);
                    (got - want).abs() / want
                })
                .collect();
            errs.sort_by(f64::total_cmp);
            typical.push(errs[errs.len() / 2]);
            worst.push(errs[errs.len() - 1]);
        }
        println!(
            "n={n:>6}  relative error: median edge {:.4}, worst edge {:.4}",
            median(&mut typical),
            median(&mut worst)
        );
    }
    Ok(())
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}
