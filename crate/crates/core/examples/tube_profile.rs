//! Density along the segment between two knots: a valley between the knots
//! marks a low-density gap, a flat profile marks a well-connected edge.
//!
//! cargo run --release --example tube_profile

use skeleton_clust::bench::gen_mickey;
use skeleton_clust::knots::kmeans;
use skeleton_clust::skeleton::approx_delaunay;
use skeleton_clust::weights::{tube_density, tube_profile, tube_radius_rule, BandwidthRule, KernelKind};
use skeleton_clust::{KMeansConfig, Result, Seed};

fn main() -> Result<()> {
    let ds = gen_mickey(2, Seed(1))?;
    let cfg = KMeansConfig {
        restarts: 10,
        seed: Seed(2),
        ..KMeansConfig::default()
    };
    let knots = kmeans(&ds.data, &cfg)?;
    let edges = approx_delaunay(&knots);
    let radius = tube_radius_rule(&knots, &ds.data)?.value;
    let bw = BandwidthRule::default();

    // the edges with the lowest and highest tube density
    let mut scored: Vec<(f64, (usize, usize))> = edges
        .pairs
        .iter()
        .map(|&(j, l)| {
            let t = tube_density(j, l, &ds.data, &knots, KernelKind::Gaussian, &bw, radius, 21)?;
            Ok((t.value, (j, l)))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("tube radius {radius:.3}, {} edges", edges.len());
    for (label, &(value, (j, l))) in [("weakest", &scored[0]), ("strongest", &scored[scored.len() - 1])] {
        let prof = tube_profile(j, l, &ds.data, &knots, KernelKind::Gaussian, &bw, radius, 21)?;
        let samples: Vec<String> = prof.iter().step_by(5).map(|v| format!("{v:.4}")).collect();
        println!(
            "{label:>9} edge ({j:>2}, {l:>2}) density {value:.4}, profile at t = 0, .25, .5, .75, 1: {}",
            samples.join(" ")
        );
    }
    Ok(())
}
