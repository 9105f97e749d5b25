use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ari::adjusted_rand_index;
use super::denoise::knn_density_denoise;
use super::generators::{add_noise_points, generate, GeneratorKind, GeneratorSpec, LabeledDataset};
use crate::base::Seed;
use crate::error::{Result, SkeletonError};
use crate::knots::{kmeans_fit, KMeansAlgorithm, KMeansConfig, KnotCount};
use crate::pipeline::segment_knots;
use crate::segmentation::{assign_labels, cut_dendrogram, Linkage};
use crate::skeleton::WeightKind;
use crate::weights::{BandwidthRule, KernelKind, TubeRadius, TubeSpec, WeightParams};

/// Cartesian benchmark: generators x dims x repeats, and for each dataset
/// every method x linkage x S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generators: Vec<GeneratorKind>,
    pub dims: Vec<usize>,
    pub methods: Vec<WeightKind>,
    pub linkages: Vec<Linkage>,
    /// Values of `S`; empty means each generator's component count.
    pub clusters: Vec<usize>,
    pub k: KnotCount,
    pub algorithm: KMeansAlgorithm,
    pub restarts: usize,
    pub max_iters: usize,
    pub repeats: usize,
    /// Repeat `r` uses seed `seed + r`.
    pub seed: u64,
    /// Fraction of uniform noise points to add (0 = none). ARI is then
    /// computed on signal points only.
    pub noise_fraction: f64,
    /// Fraction of lowest-density points to drop before clustering (0 = none).
    pub denoise_fraction: f64,
    pub kernel: KernelKind,
    pub bandwidth_rate: f64,
    pub tube_radius: TubeRadius,
    pub tube_grid: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            generators: vec![GeneratorKind::Yinyang],
            dims: vec![10],
            methods: vec![WeightKind::Voronoi],
            linkages: vec![Linkage::Single],
            clusters: Vec::new(),
            k: KnotCount::Auto,
            algorithm: KMeansAlgorithm::default(),
            restarts: KMeansConfig::default().restarts,
            max_iters: KMeansConfig::default().max_iters,
            repeats: 1,
            seed: 1,
            noise_fraction: 0.0,
            denoise_fraction: 0.0,
            kernel: KernelKind::Gaussian,
            bandwidth_rate: -0.2,
            tube_radius: TubeRadius::Auto,
            tube_grid: 101,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| SkeletonError::invalid(format!("experiment needs at least one entry in '{name}'"));
        if self.generators.is_empty() {
            return Err(empty("generators"));
        }
        if self.dims.is_empty() {
            return Err(empty("dims"));
        }
        if self.methods.is_empty() {
            return Err(empty("methods"));
        }
        if self.linkages.is_empty() {
            return Err(empty("linkages"));
        }
        if self.repeats == 0 {
            return Err(SkeletonError::invalid("repeats must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.noise_fraction) {
            return Err(SkeletonError::invalid("noise_fraction must be in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.denoise_fraction) {
            return Err(SkeletonError::invalid("denoise_fraction must be in [0, 1)"));
        }
        self.weight_params().bandwidth.validate()
    }

    pub fn weight_params(&self) -> WeightParams {
        WeightParams {
            kernel: self.kernel,
            bandwidth: BandwidthRule::SilvermanRate {
                rate_exponent: self.bandwidth_rate,
            },
            tube: TubeSpec {
                radius: self.tube_radius,
                grid_points: self.tube_grid,
            },
        }
    }

    fn clusters_for(&self, g: GeneratorKind) -> Vec<usize> {
        if self.clusters.is_empty() {
            vec![g.default_clusters()]
        } else {
            self.clusters.clone()
        }
    }
}

/// One line of the report. `ari` is NaN and `error` set when the run failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub seed: u64,
    pub generator: GeneratorKind,
    pub d: usize,
    pub method: WeightKind,
    pub linkage: Linkage,
    pub k: usize,
    #[serde(rename = "S")]
    pub s: usize,
    pub ari: f64,
    pub wall_ms: u64,
    #[serde(skip)]
    pub error: Option<String>,
}

pub const REPORT_HEADER: &str = "seed,generator,d,method,linkage,k,S,ari,wall_ms";

/// Dataset for one repeat, with the configured noise and denoising applied.
/// Returns the dataset and the indices (into it) on which ARI is scored.
pub fn prepare_dataset(
    generator: GeneratorKind,
    d: usize,
    seed: u64,
    noise_fraction: f64,
    denoise_fraction: f64,
) -> Result<(LabeledDataset, Vec<usize>)> {
    let base = Seed(seed);
    let mut ds = generate(&GeneratorSpec::new(generator, d, base))?;
    if noise_fraction > 0.0 {
        ds = add_noise_points(&ds, noise_fraction, base.derive(1))?;
    }
    if denoise_fraction > 0.0 {
        ds = knn_density_denoise(&ds, denoise_fraction)?.dataset;
    }
    let scored = ds.signal_indices();
    Ok((ds, scored))
}

fn ari_on(scored: &[usize], truth: &[usize], labels: &[usize]) -> Result<f64> {
    let t: Vec<usize> = scored.iter().map(|&i| truth[i]).collect();
    let p: Vec<usize> = scored.iter().map(|&i| labels[i]).collect();
    adjusted_rand_index(&t, &p)
}

fn run_one_dataset(cfg: &ExperimentConfig, generator: GeneratorKind, d: usize, seed: u64) -> Vec<ReportRow> {
    let clusters = cfg.clusters_for(generator);
    let mut rows = Vec::new();
    let failed = |method, linkage, k, s, msg: String| ReportRow {
        seed,
        generator,
        d,
        method,
        linkage,
        k,
        s,
        ari: f64::NAN,
        wall_ms: 0,
        error: Some(msg),
    };

    let start = Instant::now();
    let prepared =
        prepare_dataset(generator, d, seed, cfg.noise_fraction, cfg.denoise_fraction).and_then(|(ds, scored)| {
            let km = KMeansConfig {
                k: cfg.k,
                algorithm: cfg.algorithm,
                restarts: cfg.restarts,
                max_iters: cfg.max_iters,
                tol: KMeansConfig::default().tol,
                seed: Seed(seed).derive(2),
            };
            let fit = kmeans_fit(&ds.data, &km)?;
            Ok((ds, scored, fit.knots))
        });
    let knot_ms = start.elapsed().as_millis() as u64;
    let (ds, scored, knots) = match prepared {
        Ok(v) => v,
        Err(e) => {
            for &method in &cfg.methods {
                for &linkage in &cfg.linkages {
                    for &s in &clusters {
                        rows.push(failed(method, linkage, 0, s, e.to_string()));
                    }
                }
            }
            return rows;
        }
    };
    let k = knots.k();
    let params = cfg.weight_params();

    for &method in &cfg.methods {
        for &linkage in &cfg.linkages {
            let t0 = Instant::now();
            // S = first value builds the skeleton and dendrogram; other S reuse them
            let base = segment_knots(&ds.data, knots.clone(), method, &params, linkage, 1);
            let base_ms = t0.elapsed().as_millis() as u64;
            for &s in &clusters {
                let t1 = Instant::now();
                let outcome = base.as_ref().map_err(|e| e.to_string()).and_then(|run| {
                    let groups = cut_dendrogram(&run.dendrogram, s).map_err(|e| e.to_string())?;
                    let labels = assign_labels(&groups, &run.skeleton.knots).map_err(|e| e.to_string())?;
                    ari_on(&scored, &ds.truth, &labels.labels).map_err(|e| e.to_string())
                });
                let wall_ms = knot_ms + base_ms + t1.elapsed().as_millis() as u64;
                rows.push(match outcome {
                    Ok(ari) => ReportRow {
                        seed,
                        generator,
                        d,
                        method,
                        linkage,
                        k,
                        s,
                        ari,
                        wall_ms,
                        error: None,
                    },
                    Err(msg) => failed(method, linkage, k, s, msg),
                });
            }
        }
    }
    rows
}

/// Runs every configured combination. Rows come back sorted by generator,
/// dimension, seed, method, linkage and `S`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &g in &cfg.generators {
        for &d in &cfg.dims {
            for r in 0..cfg.repeats {
                tasks.push((g, d, cfg.seed + r as u64));
            }
        }
    }
    let mut rows: Vec<ReportRow> = tasks
        .par_iter()
        .flat_map_iter(|&(g, d, seed)| run_one_dataset(cfg, g, d, seed))
        .collect();
    let gpos = |g: GeneratorKind| GeneratorKind::ALL.iter().position(|&x| x == g);
    let mpos = |m: WeightKind| WeightKind::ALL.iter().position(|&x| x == m);
    let lpos = |l: Linkage| Linkage::ALL.iter().position(|&x| x == l);
    rows.sort_by_key(|r| (gpos(r.generator), r.d, r.seed, mpos(r.method), lpos(r.linkage), r.s));
    Ok(rows)
}

pub fn write_report<W: Write>(rows: &[ReportRow], mut w: W) -> Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.6},{}",
            r.seed, r.generator, r.d, r.method, r.linkage, r.k, r.s, r.ari, r.wall_ms
        )?;
    }
    Ok(())
}

/// Median ARI per (generator, d, method, linkage, S).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub generator: GeneratorKind,
    pub d: usize,
    pub method: WeightKind,
    pub linkage: Linkage,
    #[serde(rename = "S")]
    pub s: usize,
    pub runs: usize,
    pub failures: usize,
    pub median_ari: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn summarize(rows: &[ReportRow]) -> Vec<SummaryRow> {
    type Key = (usize, usize, usize, usize, usize);
    let mut groups: BTreeMap<Key, (ReportRow, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let key = (
            GeneratorKind::ALL.iter().position(|&x| x == r.generator).unwrap_or(0),
            r.d,
            WeightKind::ALL.iter().position(|&x| x == r.method).unwrap_or(0),
            Linkage::ALL.iter().position(|&x| x == r.linkage).unwrap_or(0),
            r.s,
        );
        groups
            .entry(key)
            .or_insert_with(|| (r.clone(), Vec::new()))
            .1
            .push(r.ari);
    }
    groups
        .into_values()
        .map(|(r, aris)| SummaryRow {
            generator: r.generator,
            d: r.d,
            method: r.method,
            linkage: r.linkage,
            s: r.s,
            runs: aris.len(),
            failures: aris.iter().filter(|a| a.is_nan()).count(),
            median_ari: median(&aris),
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], mut w: W) -> Result<()> {
    writeln!(w, "generator,d,method,linkage,S,runs,failures,median_ari")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.6}",
            r.generator, r.d, r.method, r.linkage, r.s, r.runs, r.failures, r.median_ari
        )?;
    }
    Ok(())
}
