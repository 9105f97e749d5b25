//! Knot construction by restarted, overfitted k-means.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::base::{DataMatrix, Seed};
use crate::error::{Result, SkeletonError};
use crate::nn::{sq_dist, two_nearest_knots};

/// Knot centers together with every observation's nearest and
/// second-nearest knot.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet {
    pub centers: DataMatrix,
    pub assign1: Vec<usize>,
    /// Second-nearest knot. With a single knot this repeats `assign1`.
    pub assign2: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl KnotSet {
    pub fn from_centers(data: &DataMatrix, centers: DataMatrix) -> Result<Self> {
        if data.cols() != centers.cols() {
            return Err(SkeletonError::DimensionMismatch {
                expected: centers.cols(),
                got: data.cols(),
            });
        }
        let (assign1, assign2) = if centers.rows() == 1 {
            (vec![0; data.rows()], vec![0; data.rows()])
        } else {
            two_nearest_knots(data, &centers)?
        };
        let mut sizes = vec![0; centers.rows()];
        for &a in &assign1 {
            sizes[a] += 1;
        }
        Ok(Self {
            centers,
            assign1,
            assign2,
            sizes,
        })
    }

    pub fn k(&self) -> usize {
        self.centers.rows()
    }

    pub fn n(&self) -> usize {
        self.assign1.len()
    }

    pub fn center(&self, j: usize) -> &[f64] {
        self.centers.row(j)
    }

    /// Observation indices grouped by nearest knot, ascending within each cell.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut cells: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &a) in self.assign1.iter().enumerate() {
            cells[a].push(i);
        }
        cells
    }

    /// Within-cluster sum of squared distances to the nearest knot.
    pub fn objective(&self, data: &DataMatrix) -> f64 {
        data.iter_rows()
            .zip(&self.assign1)
            .map(|(x, &a)| sq_dist(x, self.centers.row(a)))
            .sum()
    }
}

/// `k = [√n]`, rounded to the nearest integer and never below one.
pub fn reference_knot_count(n: usize) -> usize {
    ((n as f64).sqrt().round() as usize).max(1)
}

/// Number of knots: explicit, or the `[√n]` reference rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KnotCount {
    #[default]
    Auto,
    Fixed(usize),
}

impl KnotCount {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            KnotCount::Auto => reference_knot_count(n),
            KnotCount::Fixed(k) => k,
        }
    }
}

impl fmt::Display for KnotCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotCount::Auto => f.write_str("auto"),
            KnotCount::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for KnotCount {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(KnotCount::Auto);
        }
        s.parse::<usize>()
            .map(KnotCount::Fixed)
            .map_err(|_| SkeletonError::invalid(format!("knot count must be 'auto' or an integer, got '{s}'")))
    }
}

impl Serialize for KnotCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KnotCount::Auto => s.serialize_str("auto"),
            KnotCount::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for KnotCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(KnotCount::Fixed(k)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Local search run by every restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KMeansAlgorithm {
    /// Batch mean updates only.
    Lloyd,
    /// Lloyd, then Hartigan single-point transfers until no transfer lowers
    /// the objective. Lloyd alone favours keeping points in small clusters
    /// (a point's squared distance to its own centroid is shrunk by a factor
    /// `(m − 1) / m`), which leaves tiny knots behind in high dimension.
    #[default]
    Hartigan,
}

impl FromStr for KMeansAlgorithm {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lloyd" => Ok(KMeansAlgorithm::Lloyd),
            "hartigan" => Ok(KMeansAlgorithm::Hartigan),
            _ => Err(SkeletonError::invalid(format!(
                "unknown k-means algorithm '{s}' (expected lloyd or hartigan)"
            ))),
        }
    }
}

impl fmt::Display for KMeansAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KMeansAlgorithm::Lloyd => "lloyd",
            KMeansAlgorithm::Hartigan => "hartigan",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: KnotCount,
    #[serde(default)]
    pub algorithm: KMeansAlgorithm,
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative change of the objective below which a restart stops.
    pub tol: f64,
    pub seed: Seed,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            k: KnotCount::Auto,
            algorithm: KMeansAlgorithm::default(),
            restarts: 1000,
            max_iters: 100,
            tol: 1e-6,
            seed: Seed(0),
        }
    }
}

impl KMeansConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k: KnotCount::Fixed(k),
            ..Self::default()
        }
    }
}

/// Best restart of a k-means fit.
#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub knots: KnotSet,
    pub objective: f64,
    pub best_restart: usize,
    pub restart_objectives: Vec<f64>,
}

/// One Lloyd run from a given initialization.
#[derive(Debug, Clone)]
pub(crate) struct LloydRun {
    pub centers: Vec<f64>,
    pub objective: f64,
    /// Objective after every assignment step.
    #[cfg_attr(not(test), allow(dead_code))]
    pub history: Vec<f64>,
}

/// Runs restarted k-means and returns the knots of the best restart.
pub fn kmeans(data: &DataMatrix, cfg: &KMeansConfig) -> Result<KnotSet> {
    kmeans_fit(data, cfg).map(|f| f.knots)
}

pub fn kmeans_fit(data: &DataMatrix, cfg: &KMeansConfig) -> Result<KMeansFit> {
    let n = data.rows();
    let k = cfg.k.resolve(n);
    if k == 0 {
        return Err(SkeletonError::invalid("k must be at least 1"));
    }
    if k > n {
        return Err(SkeletonError::invalid(format!(
            "k = {k} exceeds the number of observations n = {n}"
        )));
    }
    if cfg.restarts == 0 {
        return Err(SkeletonError::invalid("restarts must be at least 1"));
    }
    if cfg.max_iters == 0 {
        return Err(SkeletonError::invalid("max_iters must be at least 1"));
    }
    if k > 1 && count_distinct_rows(data, k) < k {
        return Err(SkeletonError::DegenerateInput(format!(
            "fewer than {k} distinct observations"
        )));
    }

    let runs: Vec<LloydRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = cfg.seed.derive(r as u64).rng();
            let init = kmeans_plus_plus(data, k, &mut rng);
            let run = lloyd(data, k, init, cfg.max_iters, cfg.tol);
            match cfg.algorithm {
                KMeansAlgorithm::Lloyd => run,
                KMeansAlgorithm::Hartigan => hartigan(data, k, run, cfg.max_iters),
            }
        })
        .collect();

    let (best_restart, best) = runs
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.objective.total_cmp(&b.objective).then(ia.cmp(ib)))
        .expect("restarts >= 1");
    let centers = DataMatrix::new(k, data.cols(), best.centers.clone())?;
    let knots = KnotSet::from_centers(data, centers)?;
    let objective = knots.objective(data);
    Ok(KMeansFit {
        knots,
        objective,
        best_restart,
        restart_objectives: runs.iter().map(|r| r.objective).collect(),
    })
}

/// Knot sizes as `(knot index, size)` pairs in knot order.
pub fn knot_size_histogram(knots: &KnotSet) -> Vec<(usize, usize)> {
    knots.sizes.iter().copied().enumerate().collect()
}

fn count_distinct_rows(data: &DataMatrix, cap: usize) -> usize {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for r in data.iter_rows() {
        // -0.0 and 0.0 are the same point
        seen.insert(r.iter().map(|v| (v + 0.0).to_bits()).collect());
        if seen.len() >= cap {
            break;
        }
    }
    seen.len()
}

pub(crate) fn kmeans_plus_plus<R: Rng>(data: &DataMatrix, k: usize, rng: &mut R) -> Vec<f64> {
    let n = data.rows();
    let mut centers = Vec::with_capacity(k * data.cols());
    let first = rng.random_range(0..n);
    centers.extend_from_slice(data.row(first));
    let mut d2: Vec<f64> = data.iter_rows().map(|x| sq_dist(x, data.row(first))).collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            // rounding can leave target just above the final partial sum
            chosen.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap_or(n - 1))
        } else {
            rng.random_range(0..n)
        };
        let c = data.row(pick);
        centers.extend_from_slice(c);
        for (i, x) in data.iter_rows().enumerate() {
            let d = sq_dist(x, c);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centers
}

fn nearest(x: &[f64], centers: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.chunks_exact(d).enumerate() {
        let v = sq_dist(x, c);
        if v < best.1 {
            best = (j, v);
        }
    }
    best
}

pub(crate) fn lloyd(data: &DataMatrix, k: usize, mut centers: Vec<f64>, max_iters: usize, tol: f64) -> LloydRun {
    let n = data.rows();
    let d = data.cols();
    let mut labels = vec![0usize; n];
    let mut dist = vec![0.0f64; n];
    let mut sizes = vec![0usize; k];
    let mut history = Vec::new();
    let mut iter = 0;

    loop {
        sizes.iter_mut().for_each(|s| *s = 0);
        for (i, x) in data.iter_rows().enumerate() {
            let (j, v) = nearest(x, &centers, d);
            labels[i] = j;
            dist[i] = v;
            sizes[j] += 1;
        }
        let has_empty = sizes.contains(&0);
        if has_empty {
            repair_empty(data, &mut centers, &mut labels, &mut dist, &mut sizes);
        }
        let objective: f64 = dist.iter().sum();
        let converged = match history.last() {
            Some(&prev) => prev - objective <= tol * prev,
            None => objective == 0.0,
        };
        history.push(objective);
        iter += 1;
        if (converged && !has_empty) || iter >= max_iters {
            break;
        }
        update_means(data, &mut centers, &labels, &sizes);
    }

    let objective = *history.last().expect("at least one assignment");
    LloydRun {
        centers,
        objective,
        history,
    }
}

/// Hartigan transfers starting from a Lloyd solution. A point leaves
/// cluster `a` for `b` when `n_b/(n_b+1)·‖x−c_b‖² < n_a/(n_a−1)·‖x−c_a‖²`,
/// which is exactly when the move lowers the within-cluster sum of squares.
/// Means are updated after every move; each pass ends with an exact
/// recomputation so rounding does not accumulate.
pub(crate) fn hartigan(data: &DataMatrix, k: usize, run: LloydRun, max_passes: usize) -> LloydRun {
    let d = data.cols();
    let LloydRun {
        mut centers,
        mut history,
        ..
    } = run;
    let mut labels: Vec<usize> = data.iter_rows().map(|x| nearest(x, &centers, d).0).collect();
    let mut sizes = vec![0usize; k];
    for &j in &labels {
        sizes[j] += 1;
    }
    if sizes.contains(&0) {
        // leave a Lloyd result with unresolved empties to the caller unchanged
        let objective = history.last().copied().unwrap_or(f64::INFINITY);
        return LloydRun {
            centers,
            objective,
            history,
        };
    }
    update_means(data, &mut centers, &labels, &sizes);
    for _ in 0..max_passes {
        let mut moved = false;
        for (i, x) in data.iter_rows().enumerate() {
            let a = labels[i];
            let na = sizes[a];
            if na == 1 {
                continue;
            }
            let stay = na as f64 / (na - 1) as f64 * sq_dist(x, &centers[a * d..(a + 1) * d]);
            let mut best = (a, stay);
            for (b, c) in centers.chunks_exact(d).enumerate() {
                if b == a {
                    continue;
                }
                let nb = sizes[b] as f64;
                let cost = nb / (nb + 1.0) * sq_dist(x, c);
                if cost < best.1 {
                    best = (b, cost);
                }
            }
            let b = best.0;
            if b == a {
                continue;
            }
            let (fa, fb) = (na as f64, sizes[b] as f64);
            for (t, &xv) in x.iter().enumerate() {
                let ca = &mut centers[a * d + t];
                *ca = (fa * *ca - xv) / (fa - 1.0);
                let cb = &mut centers[b * d + t];
                *cb = (fb * *cb + xv) / (fb + 1.0);
            }
            sizes[a] -= 1;
            sizes[b] += 1;
            labels[i] = b;
            moved = true;
        }
        update_means(data, &mut centers, &labels, &sizes);
        let objective: f64 = data
            .iter_rows()
            .zip(&labels)
            .map(|(x, &j)| sq_dist(x, &centers[j * d..(j + 1) * d]))
            .sum();
        history.push(objective);
        if !moved {
            break;
        }
    }
    // final nearest-center assignment can only lower the objective further
    let objective: f64 = data.iter_rows().map(|x| nearest(x, &centers, d).1).sum();
    history.push(objective);
    LloydRun {
        centers,
        objective,
        history,
    }
}

fn update_means(data: &DataMatrix, centers: &mut [f64], labels: &[usize], sizes: &[usize]) {
    let d = data.cols();
    centers.iter_mut().for_each(|c| *c = 0.0);
    for (x, &j) in data.iter_rows().zip(labels) {
        let c = &mut centers[j * d..(j + 1) * d];
        for (cv, xv) in c.iter_mut().zip(x) {
            *cv += xv;
        }
    }
    for (j, &s) in sizes.iter().enumerate() {
        let inv = 1.0 / s as f64;
        centers[j * d..(j + 1) * d].iter_mut().for_each(|c| *c *= inv);
    }
}

/// Moves each empty center onto the point farthest from its own center,
/// taking donors only from clusters with at least two points.
fn repair_empty(data: &DataMatrix, centers: &mut [f64], labels: &mut [usize], dist: &mut [f64], sizes: &mut [usize]) {
    let d = data.cols();
    for j in 0..sizes.len() {
        if sizes[j] != 0 {
            continue;
        }
        let donor = (0..labels.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)));
        let Some(i) = donor else { break };
        sizes[labels[i]] -= 1;
        labels[i] = j;
        sizes[j] = 1;
        dist[i] = 0.0;
        centers[j * d..(j + 1) * d].copy_from_slice(data.row(i));
    }
}
