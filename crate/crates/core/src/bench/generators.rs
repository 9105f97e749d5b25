use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::shapes;
use crate::base::{DataMatrix, Seed};
use crate::error::{Result, SkeletonError};

/// Observations with ground-truth component labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub data: DataMatrix,
    pub truth: Vec<usize>,
    /// Label carried by injected noise points, if any were added.
    pub noise_label: Option<usize>,
}

impl LabeledDataset {
    pub fn n(&self) -> usize {
        self.data.rows()
    }

    /// Count per truth label, index = label.
    pub fn histogram(&self) -> Vec<usize> {
        let m = self.truth.iter().max().map_or(0, |&v| v + 1);
        let mut h = vec![0; m];
        for &t in &self.truth {
            h[t] += 1;
        }
        h
    }

    /// Indices of non-noise observations.
    pub fn signal_indices(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| Some(self.truth[i]) != self.noise_label)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Yinyang,
    Mickey,
    ManifoldMixture,
    Ring,
    MixMickey,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Yinyang,
        GeneratorKind::Mickey,
        GeneratorKind::ManifoldMixture,
        GeneratorKind::Ring,
        GeneratorKind::MixMickey,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Yinyang => "yinyang",
            GeneratorKind::Mickey => "mickey",
            GeneratorKind::ManifoldMixture => "manifold_mixture",
            GeneratorKind::Ring => "ring",
            GeneratorKind::MixMickey => "mix_mickey",
        }
    }

    /// Number of signal dimensions before noise padding.
    pub fn intrinsic_dim(self) -> usize {
        match self {
            GeneratorKind::ManifoldMixture => 3,
            _ => 2,
        }
    }

    /// Number of true components, the usual choice of `S`.
    pub fn default_clusters(self) -> usize {
        match self {
            GeneratorKind::Yinyang => 5,
            GeneratorKind::Ring => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorKind {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        GeneratorKind::ALL
            .into_iter()
            .find(|g| g.as_str() == norm)
            .ok_or_else(|| {
                let names: Vec<&str> = GeneratorKind::ALL.iter().map(|g| g.as_str()).collect();
                SkeletonError::invalid(format!(
                    "unknown generator '{s}' (expected one of: {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: GeneratorKind,
    pub ambient_dim: usize,
    pub noise_sd: f64,
    pub seed: Seed,
}

impl GeneratorSpec {
    pub fn new(name: GeneratorKind, ambient_dim: usize, seed: Seed) -> Self {
        Self {
            name,
            ambient_dim,
            noise_sd: shapes::NOISE_SD,
            seed,
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<LabeledDataset> {
    let min_dim = spec.name.intrinsic_dim();
    if spec.name == GeneratorKind::MixMickey && spec.ambient_dim != 2 {
        return Err(SkeletonError::invalid("mix_mickey is two-dimensional"));
    }
    if spec.ambient_dim < min_dim {
        return Err(SkeletonError::invalid(format!(
            "{} needs at least {min_dim} dimensions, got {}",
            spec.name, spec.ambient_dim
        )));
    }
    if !(spec.noise_sd.is_finite() && spec.noise_sd >= 0.0) {
        return Err(SkeletonError::invalid(format!(
            "noise sd must be >= 0, got {}",
            spec.noise_sd
        )));
    }
    let mut rng = spec.seed.rng();
    let (signal, truth) = match spec.name {
        GeneratorKind::Yinyang => yinyang_signal(&mut rng),
        GeneratorKind::Mickey => mickey_signal(&mut rng),
        GeneratorKind::ManifoldMixture => manifold_signal(&mut rng),
        GeneratorKind::Ring => ring_signal(&mut rng),
        GeneratorKind::MixMickey => mix_mickey_signal(&mut rng),
    };
    let data = pad_with_noise(&signal, min_dim, spec.ambient_dim, spec.noise_sd, &mut rng)?;
    Ok(LabeledDataset {
        data,
        truth,
        noise_label: None,
    })
}

pub fn gen_yinyang(d: usize, seed: Seed) -> Result<LabeledDataset> {
    generate(&GeneratorSpec::new(GeneratorKind::Yinyang, d, seed))
}

pub fn gen_mickey(d: usize, seed: Seed) -> Result<LabeledDataset> {
    generate(&GeneratorSpec::new(GeneratorKind::Mickey, d, seed))
}

pub fn gen_manifold_mixture(d: usize, seed: Seed) -> Result<LabeledDataset> {
    generate(&GeneratorSpec::new(GeneratorKind::ManifoldMixture, d, seed))
}

pub fn gen_ring(d: usize, seed: Seed) -> Result<LabeledDataset> {
    generate(&GeneratorSpec::new(GeneratorKind::Ring, d, seed))
}

pub fn gen_mix_mickey(seed: Seed) -> Result<LabeledDataset> {
    generate(&GeneratorSpec::new(GeneratorKind::MixMickey, 2, seed))
}

fn std_normal() -> Normal<f64> {
    Normal::new(0.0, 1.0).expect("valid normal")
}

fn pad_with_noise<R: Rng>(signal: &[Vec<f64>], intrinsic: usize, d: usize, sd: f64, rng: &mut R) -> Result<DataMatrix> {
    let z = std_normal();
    let mut values = Vec::with_capacity(signal.len() * d);
    for row in signal {
        values.extend_from_slice(&row[..intrinsic]);
        for _ in intrinsic..d {
            values.push(sd * z.sample(rng));
        }
    }
    DataMatrix::new(signal.len(), d, values)
}

/// Point at angle `theta` on a circle of `radius` around `center`, with
/// Gaussian radial jitter.
fn jittered_arc_point<R: Rng>(rng: &mut R, center: [f64; 2], radius: f64, jitter: f64, theta: f64) -> Vec<f64> {
    let r = radius + jitter * std_normal().sample(rng);
    vec![center[0] + r * theta.cos(), center[1] + r * theta.sin()]
}

fn gaussian_point<R: Rng>(rng: &mut R, center: &[f64], sd: f64) -> Vec<f64> {
    let z = std_normal();
    center.iter().map(|c| c + sd * z.sample(rng)).collect()
}

fn uniform_disk_point<R: Rng>(rng: &mut R, center: [f64; 2], radius: f64) -> Vec<f64> {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    vec![center[0] + r * theta.cos(), center[1] + r * theta.sin()]
}

fn yinyang_signal<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, Vec<usize>) {
    use shapes::yinyang::*;
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for _ in 0..OUTER_N {
        let theta = 2.0 * PI * rng.random::<f64>();
        rows.push(jittered_arc_point(rng, [0.0, 0.0], OUTER_RADIUS, OUTER_JITTER, theta));
        truth.push(0);
    }
    // upper arc opens downward, lower arc opens upward
    for (label, center, start) in [(1, [0.0, ARC_OFFSET], 0.0), (2, [0.0, -ARC_OFFSET], PI)] {
        for _ in 0..ARC_N {
            let theta = start + PI * rng.random::<f64>();
            rows.push(jittered_arc_point(rng, center, ARC_RADIUS, ARC_JITTER, theta));
            truth.push(label);
        }
    }
    for (label, y) in [(3, ARC_OFFSET), (4, -ARC_OFFSET)] {
        for _ in 0..CLUMP_N {
            rows.push(gaussian_point(rng, &[0.0, y], CLUMP_SD));
            truth.push(label);
        }
    }
    (rows, truth)
}

fn mickey_signal<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, Vec<usize>) {
    use shapes::mickey::*;
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for _ in 0..HEAD_N {
        rows.push(uniform_disk_point(rng, [0.0, 0.0], HEAD_RADIUS));
        truth.push(0);
    }
    for (label, x) in [(1, -EAR_CENTER), (2, EAR_CENTER)] {
        for _ in 0..EAR_N {
            rows.push(uniform_disk_point(rng, [x, EAR_CENTER], EAR_RADIUS));
            truth.push(label);
        }
    }
    (rows, truth)
}

fn manifold_signal<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, Vec<usize>) {
    use shapes::manifold_mixture::*;
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for _ in 0..PLANE_N {
        let x = PLANE_SIDE * rng.random::<f64>();
        let y = PLANE_SIDE * rng.random::<f64>();
        rows.push(vec![x, y, 0.0]);
        truth.push(0);
    }
    for _ in 0..BLOB_N {
        rows.push(gaussian_point(rng, &BLOB_CENTER, BLOB_SD));
        truth.push(1);
    }
    for _ in 0..RING_N {
        let theta = 2.0 * PI * rng.random::<f64>();
        let mut p = jittered_arc_point(rng, RING_CENTER, RING_RADIUS, RING_JITTER, theta);
        p.push(0.0);
        rows.push(p);
        truth.push(2);
    }
    (rows, truth)
}

fn ring_signal<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, Vec<usize>) {
    use shapes::ring::*;
    let mut rows = Vec::with_capacity(N);
    let mut truth = Vec::with_capacity(N);
    for _ in 0..N {
        if rng.random::<f64>() < RING_PROB {
            let theta = 2.0 * PI * rng.random::<f64>();
            let base = [RING_RADIUS * theta.cos(), RING_RADIUS * theta.sin()];
            rows.push(gaussian_point(rng, &base, SD));
            truth.push(1);
        } else {
            rows.push(gaussian_point(rng, &[0.0, 0.0], SD));
            truth.push(0);
        }
    }
    (rows, truth)
}

fn mix_mickey_signal<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, Vec<usize>) {
    use shapes::mix_mickey::*;
    let sd = VARIANCE.sqrt();
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for _ in 0..BIG_N {
        rows.push(gaussian_point(rng, &BIG_CENTER, sd));
        truth.push(0);
    }
    for (label, c) in [(1, SMALL_CENTERS[0]), (2, SMALL_CENTERS[1])] {
        for _ in 0..SMALL_N {
            rows.push(gaussian_point(rng, &c, sd));
            truth.push(label);
        }
    }
    (rows, truth)
}

/// Appends `round(frac · n)` uniform noise points. The first two coordinates
/// are uniform over the (slightly widened) bounding box of the signal; the
/// remaining coordinates are Gaussian with the padding sd. Noise points get a
/// fresh label one past the largest signal label.
pub fn add_noise_points(ds: &LabeledDataset, frac: f64, seed: Seed) -> Result<LabeledDataset> {
    add_noise_points_with_sd(ds, frac, shapes::NOISE_SD, seed)
}

pub fn add_noise_points_with_sd(ds: &LabeledDataset, frac: f64, sd: f64, seed: Seed) -> Result<LabeledDataset> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(SkeletonError::invalid(format!(
            "noise fraction must be in (0, 1], got {frac}"
        )));
    }
    let n = ds.n();
    let m = (frac * n as f64).round() as usize;
    if m == 0 {
        return Ok(ds.clone());
    }
    let d = ds.data.cols();
    let box_dims = d.min(2);
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for r in ds.data.iter_rows() {
        for c in 0..box_dims {
            lo[c] = lo[c].min(r[c]);
            hi[c] = hi[c].max(r[c]);
        }
    }
    for c in 0..box_dims {
        let pad = shapes::NOISE_BOX_MARGIN * (hi[c] - lo[c]);
        lo[c] -= pad;
        hi[c] += pad;
    }
    let label = ds.truth.iter().max().map_or(0, |&v| v + 1);
    let label = ds.noise_label.map_or(label, |l| l.max(label));
    let mut rng = seed.rng();
    let z = std_normal();
    let mut values = ds.data.as_slice().to_vec();
    values.reserve(m * d);
    for _ in 0..m {
        for c in 0..d {
            let v = if c < box_dims {
                lo[c] + (hi[c] - lo[c]) * rng.random::<f64>()
            } else {
                sd * z.sample(&mut rng)
            };
            values.push(v);
        }
    }
    let mut truth = ds.truth.clone();
    truth.extend(std::iter::repeat_n(label, m));
    Ok(LabeledDataset {
        data: DataMatrix::new(n + m, d, values)?,
        truth,
        noise_label: Some(label),
    })
}
