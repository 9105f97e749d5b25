//! Synthetic benchmarks and evaluation: shape generators, uniform noise
//! injection, the adjusted Rand index, kNN-density denoising and the
//! repeated-experiment runner.

mod ari;
mod denoise;
mod experiment;
mod generators;
pub mod shapes;

pub use ari::adjusted_rand_index;
pub use denoise::{knn_density_denoise, knn_radius, Denoised};
pub use experiment::{
    median, prepare_dataset, run_experiment, summarize, write_report, write_summary, ExperimentConfig, ReportRow,
    SummaryRow, REPORT_HEADER,
};
pub use generators::{
    add_noise_points, add_noise_points_with_sd, gen_manifold_mixture, gen_mickey, gen_mix_mickey, gen_ring,
    gen_yinyang, generate, GeneratorKind, GeneratorSpec, LabeledDataset,
};
