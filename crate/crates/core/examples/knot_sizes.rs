//! Knot-size diagram: how many observations each knot summarizes, for a few
//! choices of k. Very small knots hint that k is too large for n.
//!
//! cargo run --release --example knot_sizes

use skeleton_clust::bench::gen_mickey;
use skeleton_clust::knots::{kmeans, knot_size_histogram, KnotCount};
use skeleton_clust::{KMeansConfig, Result, Seed};

fn main() -> Result<()> {
    let ds = gen_mickey(2, Seed(5))?;
    for k in [KnotCount::Fixed(10), KnotCount::Auto, KnotCount::Fixed(120)] {
        let cfg = KMeansConfig {
            k,
            restarts: 10,
            seed: Seed(6),
            ..KMeansConfig::default()
        };
        let knots = kmeans(&ds.data, &cfg)?;
        let mut sizes: Vec<usize> = knot_size_histogram(&knots).into_iter().map(|(_, s)| s).collect();
        sizes.sort_unstable();
        let bars: String = sizes.iter().map(|&s| bar(s)).collect();
        println!(
            "k={:>3} min={:>3} median={:>3} max={:>4}  {bars}",
            knots.k(),
            sizes[0],
            sizes[sizes.len() / 2],
            sizes[sizes.len() - 1]
        );
    }
    Ok(())
}

/// One character per knot, darker for larger cells.
fn bar(size: usize) -> char {
    match size {
        0..=5 => '.',
        6..=20 => ':',
        21..=60 => '+',
        _ => '#',
    }
}
