//! Command-line front end: `gen`, `cluster`, `eval`, `bench` and `denoise`.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 degenerate geometry.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::base::{DataMatrix, Seed};
use crate::bench::{
    add_noise_points, adjusted_rand_index, generate, knn_density_denoise, run_experiment, summarize, write_report,
    write_summary, ExperimentConfig, GeneratorKind, GeneratorSpec, LabeledDataset,
};
use crate::error::{Result, SkeletonError};
use crate::io::{
    read_numeric_csv, write_dataset_csv, write_knot_sizes_csv, write_labels_csv, write_matrix_csv, write_svg_plot,
    TruthColumn,
};
use crate::knots::{KMeansAlgorithm, KMeansConfig, KnotCount};
use crate::pipeline::SkeletonClustering;
use crate::segmentation::Linkage;
use crate::skeleton::WeightKind;
use crate::weights::{BandwidthRule, KernelKind, TubeRadius, TubeSpec, WeightParams};

#[derive(Debug, Parser)]
#[command(
    name = "skeleton",
    version,
    about = "Skeleton clustering for multivariate and high-dimensional data"
)]
pub struct Cli {
    /// Master random seed (overrides config files).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SKELETON_THREADS")]
    pub threads: Option<usize>,
    /// Output directory for `cluster` and `bench` (overrides config files).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a benchmark dataset as CSV (features then truth column).
    Gen(GenArgs),
    /// Cluster a CSV file or a generated dataset.
    Cluster(ClusterArgs),
    /// Adjusted Rand index between the last columns of two CSV files.
    Eval(EvalArgs),
    /// Run a benchmark experiment described by a TOML file.
    Bench(BenchArgs),
    /// Drop the lowest-density observations (sqrt(n)-NN density).
    Denoise(DenoiseArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// yinyang, mickey, manifold_mixture, ring or mix_mickey.
    pub generator: String,
    /// Ambient dimension (default: the shape's intrinsic dimension).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Append this fraction of uniform noise points.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Flat TOML file with pipeline settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Cluster a generated dataset instead of a file.
    #[arg(long)]
    pub generator: Option<GeneratorKind>,
    /// Ambient dimension for --generator.
    #[arg(long)]
    pub dim: Option<usize>,
    /// auto, last or none.
    #[arg(long)]
    pub truth_column: Option<TruthColumn>,
    /// Number of knots or "auto" (round(sqrt(n))).
    #[arg(long)]
    pub k: Option<KnotCount>,
    /// k-means local search: hartigan or lloyd.
    #[arg(long)]
    pub algorithm: Option<KMeansAlgorithm>,
    /// voronoi, face, tube or avgdist.
    #[arg(long)]
    pub weight: Option<WeightKind>,
    /// gaussian or uniform.
    #[arg(long)]
    pub kernel: Option<KernelKind>,
    /// Bandwidth rate exponent in [-1/3, -1/10].
    #[arg(long, allow_hyphen_values = true)]
    pub bandwidth_rate: Option<f64>,
    /// Fixed bandwidth, replacing the rate rule.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Tube radius or "auto".
    #[arg(long)]
    pub tube_radius: Option<TubeRadius>,
    /// Grid points along the central line for tube density.
    #[arg(long)]
    pub tube_grid: Option<usize>,
    /// single, average or complete.
    #[arg(long)]
    pub linkage: Option<Linkage>,
    /// Final number of clusters S.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// k-means restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Lloyd iterations per restart.
    #[arg(long)]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted labels (last column used).
    pub pred: PathBuf,
    /// Truth labels (last column used).
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Experiment TOML file.
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Fraction of observations to drop, in [0, 1).
    #[arg(long)]
    pub fraction: f64,
    /// auto, last or none.
    #[arg(long, default_value = "auto")]
    pub truth_column: TruthColumn,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings of one `cluster` run. Serialized verbatim into the output
/// directory so the run can be repeated with `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub generator: Option<GeneratorKind>,
    pub dim: Option<usize>,
    pub truth_column: TruthColumn,
    pub k: KnotCount,
    pub algorithm: KMeansAlgorithm,
    pub weight: WeightKind,
    pub kernel: KernelKind,
    pub bandwidth_rate: f64,
    pub bandwidth: Option<f64>,
    pub tube_radius: TubeRadius,
    pub tube_grid: usize,
    pub linkage: Linkage,
    pub clusters: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let km = KMeansConfig::default();
        Self {
            input: None,
            generator: None,
            dim: None,
            truth_column: TruthColumn::Auto,
            k: KnotCount::Auto,
            algorithm: KMeansAlgorithm::default(),
            weight: WeightKind::Voronoi,
            kernel: KernelKind::Gaussian,
            bandwidth_rate: -0.2,
            bandwidth: None,
            tube_radius: TubeRadius::Auto,
            tube_grid: TubeSpec::default().grid_points,
            linkage: Linkage::Single,
            clusters: 2,
            restarts: km.restarts,
            max_iters: km.max_iters,
            seed: 1,
            out_dir: PathBuf::from("skeleton-out"),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SkeletonError::invalid(format!("bad config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| SkeletonError::invalid(format!("cannot serialize config: {e}")))
    }

    fn apply(&mut self, a: &ClusterArgs) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = a.$field.clone() {
                    self.$field = v;
                }
            )*};
        }
        set!(
            truth_column,
            k,
            algorithm,
            weight,
            kernel,
            bandwidth_rate,
            tube_radius,
            tube_grid,
            linkage,
            clusters,
            restarts,
            max_iters
        );
        if a.input.is_some() {
            self.input = a.input.clone();
            self.generator = None;
        }
        if a.generator.is_some() {
            self.generator = a.generator;
            self.input = None;
        }
        if a.dim.is_some() {
            self.dim = a.dim;
        }
        if a.bandwidth.is_some() {
            self.bandwidth = a.bandwidth;
        }
    }

    pub fn pipeline(&self) -> Result<SkeletonClustering> {
        let bandwidth = match self.bandwidth {
            Some(h) => BandwidthRule::Fixed { h },
            None => BandwidthRule::SilvermanRate {
                rate_exponent: self.bandwidth_rate,
            },
        };
        bandwidth.validate()?;
        if self.restarts == 0 {
            return Err(SkeletonError::invalid("restarts must be at least 1"));
        }
        Ok(SkeletonClustering {
            kmeans: KMeansConfig {
                k: self.k,
                algorithm: self.algorithm,
                restarts: self.restarts,
                max_iters: self.max_iters,
                seed: Seed(self.seed).derive(2),
                ..KMeansConfig::default()
            },
            weight: self.weight,
            params: WeightParams {
                kernel: self.kernel,
                bandwidth,
                tube: TubeSpec {
                    radius: self.tube_radius,
                    grid_points: self.tube_grid,
                },
            },
            linkage: self.linkage,
            clusters: self.clusters,
        })
    }

    /// Loads the input file or generates the dataset. Truth is returned when known.
    pub fn load(&self) -> Result<(DataMatrix, Option<Vec<usize>>)> {
        match (&self.input, self.generator) {
            (Some(path), None) => read_numeric_csv(BufReader::new(open(path)?))?.into_features(self.truth_column),
            (None, Some(g)) => {
                let d = self.dim.unwrap_or(g.intrinsic_dim());
                let ds = generate(&GeneratorSpec::new(g, d, Seed(self.seed)))?;
                Ok((ds.data, Some(ds.truth)))
            }
            (Some(_), Some(_)) => Err(SkeletonError::invalid(
                "give either an input file or a generator, not both",
            )),
            (None, None) => Err(SkeletonError::invalid("cluster needs --input or --generator")),
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| SkeletonError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path)
        .map_err(|e| SkeletonError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(BufWriter::new(f))
}

/// Runs `body` against the file at `path`, or stdout when `path` is `None`.
fn with_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli, &mut io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command. Human-readable summaries go to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(SkeletonError::invalid("--threads must be at least 1"));
        }
        // a pool may already exist when called more than once in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match &cli.command {
        Command::Gen(a) => cmd_gen(&cli, a, out),
        Command::Cluster(a) => cmd_cluster(&cli, a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Bench(a) => cmd_bench(&cli, a, out),
        Command::Denoise(a) => cmd_denoise(a, out),
    }
}

fn cmd_gen(cli: &Cli, a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let g: GeneratorKind = a.generator.parse()?;
    let d = a.dim.unwrap_or(g.intrinsic_dim());
    let seed = Seed(cli.seed.unwrap_or(1));
    let mut ds = generate(&GeneratorSpec::new(g, d, seed))?;
    if let Some(frac) = a.noise {
        ds = add_noise_points(&ds, frac, seed.derive(1))?;
    }
    with_output(a.out.as_deref(), |w| write_dataset_csv(&ds, w))?;
    let line = format!("n={} d={} histogram={:?}", ds.n(), ds.data.cols(), ds.histogram());
    // keep stdout pure CSV when the data goes there
    if a.out.is_some() {
        writeln!(out, "{line}")?;
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

/// Resolves the effective configuration: defaults, then the config file,
/// then flags, then global options.
pub fn resolve_cluster_config(cli: &Cli, a: &ClusterArgs) -> Result<PipelineConfig> {
    let mut cfg = match &a.config {
        Some(p) => PipelineConfig::from_toml(&fs::read_to_string(p).map_err(SkeletonError::Io)?)?,
        None => PipelineConfig::default(),
    };
    cfg.apply(a);
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    Ok(cfg)
}

fn cmd_cluster(cli: &Cli, a: &ClusterArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve_cluster_config(cli, a)?;
    let pipeline = cfg.pipeline()?;
    let (data, truth) = cfg.load()?;
    let n = data.rows();
    if let KnotCount::Fixed(k) = cfg.k {
        if k > n {
            return Err(SkeletonError::invalid(format!(
                "k = {k} exceeds the number of observations n = {n}"
            )));
        }
    }
    let start = Instant::now();
    let run = pipeline.fit(&data)?;
    let wall_ms = start.elapsed().as_millis();

    let dir = &cfg.out_dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let mut w = create(&dir.join("labels.csv"))?;
    write_labels_csv(&run.result.labels, &mut w)?;
    w.flush()?;
    let mut w = create(&dir.join("skeleton.json"))?;
    run.skeleton.to_document().write_json(&mut w)?;
    w.flush()?;
    let mut w = create(&dir.join("dendrogram.json"))?;
    run.dendrogram.write_json(&mut w)?;
    w.flush()?;
    let mut w = create(&dir.join("knot_sizes.csv"))?;
    write_knot_sizes_csv(&run.skeleton.knots, &mut w)?;
    w.flush()?;
    if data.cols() >= 2 {
        let mut w = create(&dir.join("plot.svg"))?;
        write_svg_plot(&data, &run.result.labels, Some(&run.skeleton), &mut w)?;
        w.flush()?;
    }

    let flagged = run.skeleton.warnings.iter().filter(|w| w.is_some()).count();
    if flagged > 0 {
        eprintln!("warning: {flagged} edge weight(s) flagged as degenerate; see skeleton.json");
    }
    write!(
        out,
        "n={n} d={} k={} edges={} S={} wall_ms={wall_ms}",
        data.cols(),
        run.skeleton.k(),
        run.skeleton.edges.len(),
        run.result.n_clusters
    )?;
    if let Some(t) = truth {
        write!(out, " ari={:.6}", adjusted_rand_index(&t, &run.result.labels)?)?;
    }
    writeln!(out)?;
    Ok(())
}

fn read_last_column(path: &Path) -> Result<Vec<usize>> {
    read_numeric_csv(BufReader::new(open(path)?))?.last_column_labels()
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let pred = read_last_column(&a.pred)?;
    let truth = read_last_column(&a.truth)?;
    writeln!(out, "{:.6}", adjusted_rand_index(&pred, &truth)?)?;
    Ok(())
}

fn cmd_bench(cli: &Cli, a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&a.config)?;
    let mut cfg: ExperimentConfig =
        toml::from_str(&text).map_err(|e| SkeletonError::invalid(format!("bad experiment config: {e}")))?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let rows = run_experiment(&cfg)?;
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: seed {} {} d={} {} {} S={} failed: {}",
            r.seed,
            r.generator,
            r.d,
            r.method,
            r.linkage,
            r.s,
            r.error.as_deref().unwrap_or_default()
        );
    }
    let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let mut w = create(&dir.join("report.csv"))?;
    write_report(&rows, &mut w)?;
    w.flush()?;
    let summary = summarize(&rows);
    let mut w = create(&dir.join("summary.csv"))?;
    write_summary(&summary, &mut w)?;
    w.flush()?;
    write_summary(&summary, &mut *out)?;
    Ok(())
}

fn cmd_denoise(a: &DenoiseArgs, out: &mut dyn Write) -> Result<()> {
    let (data, truth) = read_numeric_csv(BufReader::new(open(&a.input)?))?.into_features(a.truth_column)?;
    let has_truth = truth.is_some();
    let ds = LabeledDataset {
        truth: truth.unwrap_or_else(|| vec![0; data.rows()]),
        data,
        noise_label: None,
    };
    let kept = knn_density_denoise(&ds, a.fraction)?;
    let truth = has_truth.then_some(kept.dataset.truth.as_slice());
    with_output(a.out.as_deref(), |w| write_matrix_csv(&kept.dataset.data, truth, w))?;
    let line = format!("kept={} removed={}", kept.kept.len(), kept.removed.len());
    if a.out.is_some() {
        writeln!(out, "{line}")?;
    } else {
        eprintln!("{line}");
    }
    Ok(())
}
