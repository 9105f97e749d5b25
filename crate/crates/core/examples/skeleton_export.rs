//! Save a fitted skeleton, reload it without the data and re-segment it with
//! a different linkage and cluster count. Also writes an SVG picture.
//!
//! cargo run --release --example skeleton_export

use std::fs::File;
use std::io::BufWriter;

use skeleton_clust::bench::gen_ring;
use skeleton_clust::io::write_svg_plot;
use skeleton_clust::knots::KMeansConfig;
use skeleton_clust::segmentation::{cut_dendrogram, hierarchical_cluster, similarity_to_distance};
use skeleton_clust::skeleton::SkeletonDocument;
use skeleton_clust::{Linkage, Result, Seed, SkeletonClustering};

fn main() -> Result<()> {
    let ds = gen_ring(2, Seed(1))?;
    let mut cfg = SkeletonClustering::new(2);
    cfg.kmeans = KMeansConfig {
        restarts: 10,
        seed: Seed(2),
        ..KMeansConfig::default()
    };
    let run = cfg.fit(&ds.data)?;

    let dir = std::env::temp_dir().join("skeleton-export");
    std::fs::create_dir_all(&dir)?;
    let json = dir.join("skeleton.json");
    run.skeleton
        .to_document()
        .write_json(BufWriter::new(File::create(&json)?))?;
    write_svg_plot(
        &ds.data,
        &run.result.labels,
        Some(&run.skeleton),
        BufWriter::new(File::create(dir.join("plot.svg"))?),
    )?;

    let doc = SkeletonDocument::read_json(File::open(&json)?)?;
    let dist = similarity_to_distance(doc.k(), &doc.edge_list(), &doc.weights)?;
    for linkage in Linkage::ALL {
        let dendro = hierarchical_cluster(&dist, linkage)?;
        let groups = cut_dendrogram(&dendro, 3)?;
        let mut sizes = vec![0; 3];
        for g in groups {
            sizes[g] += 1;
        }
        println!("{:>8}, S=3: knots per group {sizes:?}", linkage.as_str());
    }
    println!("wrote {} and plot.svg", json.display());
    Ok(())
}
