//! Density-based edge weights.
//!
//! * **Voronoi density**: fraction of observations whose two nearest knots are
//!   the edge's endpoints, divided by the knot distance.
//! * **Face density**: observations of the two cells are projected onto the
//!   line through the knots; a 1-D kernel estimate at the midpoint
//!   approximates the probability mass on the shared Voronoi face.
//! * **Tube density**: the same projected estimate restricted to points within
//!   radius `R` of the line, minimized over positions along the segment.
//! * **Average distance**: inverse mean distance between the two cells. No
//!   density information; kept as a baseline.
//!
//! Face and tube estimates normalize by the total sample size `n`, not by the
//! number of points that contribute.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::base::DataMatrix;
use crate::error::{Result, SkeletonError};
use crate::knots::KnotSet;
use crate::nn::sq_dist;
use crate::skeleton::{EdgeList, SkeletonGraph, WeightKind, WeightWarning};

/// Smoothing kernel for the projected 1-D estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[default]
    Gaussian,
    /// `1/2` on `[-1, 1]`.
    Uniform,
}

impl KernelKind {
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            KernelKind::Gaussian => (-0.5 * u * u).exp() / (2.0 * PI).sqrt(),
            KernelKind::Uniform => {
                if u.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }
}

impl FromStr for KernelKind {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(KernelKind::Gaussian),
            "uniform" => Ok(KernelKind::Uniform),
            _ => Err(SkeletonError::invalid(format!(
                "unknown kernel '{s}' (expected gaussian or uniform)"
            ))),
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Gaussian => "gaussian",
            KernelKind::Uniform => "uniform",
        })
    }
}

/// Per-edge bandwidth: normal-scale rule `h = (4/3) σ̂ n_loc^rate`, or fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BandwidthRule {
    SilvermanRate { rate_exponent: f64 },
    Fixed { h: f64 },
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule::SilvermanRate { rate_exponent: -0.2 }
    }
}

impl BandwidthRule {
    pub const MIN_RATE: f64 = -1.0 / 3.0;
    pub const MAX_RATE: f64 = -0.1;

    pub fn validate(&self) -> Result<()> {
        match *self {
            BandwidthRule::SilvermanRate { rate_exponent } => {
                // small slack so -1/3 and -1/10 typed as decimals still pass
                if !(Self::MIN_RATE - 1e-9..=Self::MAX_RATE + 1e-9).contains(&rate_exponent) {
                    return Err(SkeletonError::invalid(format!(
                        "bandwidth rate exponent {rate_exponent} outside [-1/3, -1/10]"
                    )));
                }
            }
            BandwidthRule::Fixed { h } => {
                if !(h.is_finite() && h > 0.0) {
                    return Err(SkeletonError::invalid(format!(
                        "fixed bandwidth must be positive, got {h}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Tube radius: one global value for all edges.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TubeRadius {
    /// Root mean within-cell squared deviation, see [`tube_radius_rule`].
    #[default]
    Auto,
    Fixed(f64),
}

impl FromStr for TubeRadius {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(TubeRadius::Auto);
        }
        match s.parse::<f64>() {
            Ok(r) if r.is_finite() && r > 0.0 => Ok(TubeRadius::Fixed(r)),
            _ => Err(SkeletonError::invalid(format!(
                "tube radius must be 'auto' or a positive number, got '{s}'"
            ))),
        }
    }
}

impl fmt::Display for TubeRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TubeRadius::Auto => f.write_str("auto"),
            TubeRadius::Fixed(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for TubeRadius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TubeRadius::Auto => s.serialize_str("auto"),
            TubeRadius::Fixed(r) => s.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for TubeRadius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => r.to_string().parse().map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeSpec {
    pub radius: TubeRadius,
    /// Number of equally spaced positions on `[0, 1]` searched for the minimum.
    pub grid_points: usize,
}

impl Default for TubeSpec {
    fn default() -> Self {
        Self {
            radius: TubeRadius::Auto,
            grid_points: 101,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightParams {
    pub kernel: KernelKind,
    pub bandwidth: BandwidthRule,
    pub tube: TubeSpec,
}

/// A single edge weight, zero with a warning when the estimate is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeEstimate {
    pub value: f64,
    pub warning: Option<WeightWarning>,
}

impl EdgeEstimate {
    fn ok(value: f64) -> Self {
        Self { value, warning: None }
    }

    fn flagged(w: WeightWarning) -> Self {
        Self {
            value: 0.0,
            warning: Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeEstimate {
    pub value: f64,
    /// Grid position of the minimum (smallest `t` on ties).
    pub argmin_t: f64,
    pub points_in_tube: usize,
    pub warning: Option<WeightWarning>,
}

/// Tube radius actually used, and whether the zero-spread fallback kicked in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate {
    pub value: f64,
    pub substituted: bool,
}

/// Central line through two knots, parameterized as `c_j + t (c_ℓ − c_j)`.
struct CentralLine<'a> {
    origin: &'a [f64],
    dir: Vec<f64>,
    len2: f64,
}

impl<'a> CentralLine<'a> {
    fn new(cj: &'a [f64], cl: &[f64], j: usize, l: usize) -> Result<Self> {
        let dir: Vec<f64> = cl.iter().zip(cj).map(|(b, a)| b - a).collect();
        let len2: f64 = dir.iter().map(|v| v * v).sum();
        if len2 == 0.0 {
            return Err(SkeletonError::DegenerateKnots(j, l));
        }
        Ok(Self { origin: cj, dir, len2 })
    }

    fn len(&self) -> f64 {
        self.len2.sqrt()
    }

    /// `(t, ‖x − Π(x)‖)`.
    fn project(&self, x: &[f64]) -> (f64, f64) {
        let dot: f64 = x
            .iter()
            .zip(self.origin)
            .zip(&self.dir)
            .map(|((xv, o), u)| (xv - o) * u)
            .sum();
        let t = dot / self.len2;
        let perp2: f64 = x
            .iter()
            .zip(self.origin)
            .zip(&self.dir)
            .map(|((xv, o), u)| {
                let r = xv - o - t * u;
                r * r
            })
            .sum();
        (t, perp2.sqrt())
    }
}

/// Projection parameter `t` with `Π(x) = c_j + t (c_ℓ − c_j)`, and the
/// distance from `x` to its projection.
pub fn project_to_central_line(x: &[f64], cj: &[f64], cl: &[f64]) -> Result<(f64, f64)> {
    if x.len() != cj.len() || cj.len() != cl.len() {
        return Err(SkeletonError::DimensionMismatch {
            expected: cj.len(),
            got: if x.len() != cj.len() { x.len() } else { cl.len() },
        });
    }
    Ok(CentralLine::new(cj, cl, 0, 1)?.project(x))
}

/// `h = (4/3) σ̂ n_loc^rate` under the rate rule; the fixed value otherwise.
pub fn silverman_bandwidth(sigma_hat: f64, n_loc: usize, rule: &BandwidthRule) -> Result<f64> {
    match *rule {
        BandwidthRule::Fixed { h } => {
            rule.validate()?;
            Ok(h)
        }
        BandwidthRule::SilvermanRate { rate_exponent } => {
            if n_loc < 2 {
                return Err(SkeletonError::DegenerateSample(format!(
                    "bandwidth needs at least 2 points, got {n_loc}"
                )));
            }
            if !(sigma_hat.is_finite() && sigma_hat > 0.0) {
                return Err(SkeletonError::DegenerateSample(format!(
                    "bandwidth needs a positive spread, got {sigma_hat}"
                )));
            }
            Ok(4.0 / 3.0 * sigma_hat * (n_loc as f64).powf(rate_exponent))
        }
    }
}

/// Sample standard deviation (n − 1 denominator).
fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Bandwidth for a set of projected positions, mapping degenerate samples to
/// a warning.
fn bandwidth_for(positions: &[f64], rule: &BandwidthRule) -> std::result::Result<f64, WeightWarning> {
    if let BandwidthRule::Fixed { h } = *rule {
        return Ok(h);
    }
    if positions.len() < 2 {
        return Err(WeightWarning::TooFewPoints);
    }
    silverman_bandwidth(sample_sd(positions), positions.len(), rule).map_err(|_| WeightWarning::ZeroSpread)
}

/// `(1 / (n h)) Σ K((s_i − at) / h)`.
fn kde_at(positions: &[f64], at: f64, h: f64, n: usize, kernel: KernelKind) -> f64 {
    let sum: f64 = positions.iter().map(|&s| kernel.eval((s - at) / h)).sum();
    sum / (n as f64 * h)
}

/// Voronoi density `P̂ₙ(A_{jℓ}) / ‖c_j − c_ℓ‖`.
pub fn voronoi_density(j: usize, l: usize, knots: &KnotSet, edges: &EdgeList) -> Result<f64> {
    let dist = sq_dist(knots.center(j), knots.center(l)).sqrt();
    if dist == 0.0 {
        return Err(SkeletonError::DegenerateKnots(j, l));
    }
    let count = edges.evidence_for(j, l);
    Ok(count as f64 / knots.n() as f64 / dist)
}

/// Face density of edge `(j, ℓ)`.
pub fn face_density(
    j: usize,
    l: usize,
    data: &DataMatrix,
    knots: &KnotSet,
    kernel: KernelKind,
    bandwidth: &BandwidthRule,
) -> Result<EdgeEstimate> {
    let cells: Vec<usize> = (0..knots.n())
        .filter(|&i| knots.assign1[i] == j || knots.assign1[i] == l)
        .collect();
    face_density_on(j, l, &cells, data, knots, kernel, bandwidth)
}

fn face_density_on(
    j: usize,
    l: usize,
    cells: &[usize],
    data: &DataMatrix,
    knots: &KnotSet,
    kernel: KernelKind,
    bandwidth: &BandwidthRule,
) -> Result<EdgeEstimate> {
    let line = CentralLine::new(knots.center(j), knots.center(l), j, l)?;
    let len = line.len();
    let positions: Vec<f64> = cells.iter().map(|&i| line.project(data.row(i)).0 * len).collect();
    let h = match bandwidth_for(&positions, bandwidth) {
        Ok(h) => h,
        Err(w) => return Ok(EdgeEstimate::flagged(w)),
    };
    Ok(EdgeEstimate::ok(kde_at(&positions, 0.5 * len, h, knots.n(), kernel)))
}

/// Global tube radius: `sqrt( (1/k) Σ_j mean_{i ∈ C_j} ‖X_i − c_j‖² )`.
///
/// When every point sits on its knot the radius would be zero; 0.1 times the
/// smallest positive knot distance is used instead and flagged.
pub fn tube_radius_rule(knots: &KnotSet, data: &DataMatrix) -> Result<RadiusEstimate> {
    let k = knots.k();
    let mut sums = vec![0.0f64; k];
    for (x, &a) in data.iter_rows().zip(&knots.assign1) {
        sums[a] += sq_dist(x, knots.center(a));
    }
    let mut acc = 0.0;
    for (j, (&s, &size)) in sums.iter().zip(&knots.sizes).enumerate() {
        if size == 0 {
            return Err(SkeletonError::DegenerateInput(format!("knot {j} has no observations")));
        }
        acc += s / size as f64;
    }
    let r = (acc / k as f64).sqrt();
    if r > 0.0 {
        return Ok(RadiusEstimate {
            value: r,
            substituted: false,
        });
    }
    let mut min_pos = f64::INFINITY;
    for a in 0..k {
        for b in a + 1..k {
            let d = sq_dist(knots.center(a), knots.center(b)).sqrt();
            if d > 0.0 && d < min_pos {
                min_pos = d;
            }
        }
    }
    if !min_pos.is_finite() {
        return Err(SkeletonError::DegenerateInput(
            "zero within-cell spread and no two distinct knots".into(),
        ));
    }
    Ok(RadiusEstimate {
        value: 0.1 * min_pos,
        substituted: true,
    })
}

/// Projected positions (distance along the line from `c_j`) of every
/// observation within perpendicular distance `radius` of the central line.
fn tube_positions(line: &CentralLine<'_>, data: &DataMatrix, radius: f64) -> Vec<f64> {
    let len = line.len();
    data.iter_rows()
        .filter_map(|x| {
            let (t, perp) = line.project(x);
            (perp <= radius).then_some(t * len)
        })
        .collect()
}

/// Estimated disk density along the segment at `grid_points` equally spaced
/// positions `t = g / (grid_points − 1)`. Empty when the tube has no points
/// or the bandwidth is undefined.
#[allow(clippy::too_many_arguments)]
pub fn tube_profile(
    j: usize,
    l: usize,
    data: &DataMatrix,
    knots: &KnotSet,
    kernel: KernelKind,
    bandwidth: &BandwidthRule,
    radius: f64,
    grid_points: usize,
) -> Result<Vec<f64>> {
    let line = CentralLine::new(knots.center(j), knots.center(l), j, l)?;
    let positions = tube_positions(&line, data, radius);
    let Ok(h) = bandwidth_for(&positions, bandwidth) else {
        return Ok(Vec::new());
    };
    Ok(profile(&positions, line.len(), h, knots.n(), kernel, grid_points))
}

fn profile(positions: &[f64], len: f64, h: f64, n: usize, kernel: KernelKind, m: usize) -> Vec<f64> {
    (0..m)
        .map(|g| {
            let t = g as f64 / (m - 1) as f64;
            kde_at(positions, t * len, h, n, kernel)
        })
        .collect()
}

/// Tube density of edge `(j, ℓ)`: the minimum of [`tube_profile`].
#[allow(clippy::too_many_arguments)]
pub fn tube_density(
    j: usize,
    l: usize,
    data: &DataMatrix,
    knots: &KnotSet,
    kernel: KernelKind,
    bandwidth: &BandwidthRule,
    radius: f64,
    grid_points: usize,
) -> Result<TubeEstimate> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(SkeletonError::invalid(format!(
            "tube radius must be positive, got {radius}"
        )));
    }
    if grid_points < 2 {
        return Err(SkeletonError::invalid("tube grid needs at least 2 points"));
    }
    let line = CentralLine::new(knots.center(j), knots.center(l), j, l)?;
    let positions = tube_positions(&line, data, radius);
    let flagged = |w| TubeEstimate {
        value: 0.0,
        argmin_t: 0.0,
        points_in_tube: positions.len(),
        warning: Some(w),
    };
    if positions.is_empty() {
        return Ok(flagged(WeightWarning::EmptyTube));
    }
    let h = match bandwidth_for(&positions, bandwidth) {
        Ok(h) => h,
        Err(w) => return Ok(flagged(w)),
    };
    let prof = profile(&positions, line.len(), h, knots.n(), kernel, grid_points);
    let (g, &value) = prof
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("grid has at least two points");
    Ok(TubeEstimate {
        value,
        argmin_t: g as f64 / (grid_points - 1) as f64,
        points_in_tube: positions.len(),
        warning: None,
    })
}

/// Inverse of the mean distance over all cross pairs of the two cells.
pub fn avgdist_similarity(j: usize, l: usize, data: &DataMatrix, knots: &KnotSet) -> EdgeEstimate {
    let members = |c: usize| -> Vec<usize> { (0..knots.n()).filter(|&i| knots.assign1[i] == c).collect() };
    avgdist_on(&members(j), &members(l), data)
}

fn avgdist_on(a: &[usize], b: &[usize], data: &DataMatrix) -> EdgeEstimate {
    if a.is_empty() || b.is_empty() {
        return EdgeEstimate::flagged(WeightWarning::EmptyCell);
    }
    let mut total = 0.0;
    for &x in a {
        for &y in b {
            total += sq_dist(data.row(x), data.row(y)).sqrt();
        }
    }
    let mean = total / (a.len() * b.len()) as f64;
    if mean == 0.0 {
        return EdgeEstimate::flagged(WeightWarning::CoincidentKnots);
    }
    EdgeEstimate::ok(1.0 / mean)
}

/// Weights every edge with the chosen estimator, in edge order.
pub fn weight_skeleton(
    edges: &EdgeList,
    data: &DataMatrix,
    knots: &KnotSet,
    kind: WeightKind,
    params: &WeightParams,
) -> Result<SkeletonGraph> {
    if data.rows() != knots.n() {
        return Err(SkeletonError::DimensionMismatch {
            expected: knots.n(),
            got: data.rows(),
        });
    }
    if data.cols() != knots.centers.cols() {
        return Err(SkeletonError::DimensionMismatch {
            expected: knots.centers.cols(),
            got: data.cols(),
        });
    }
    if let Some(&(_, b)) = edges.pairs.iter().max_by_key(|p| p.1) {
        if b >= knots.k() {
            return Err(SkeletonError::invalid(format!("edge endpoint {b} out of range")));
        }
    }
    if matches!(kind, WeightKind::Face | WeightKind::Tube) {
        params.bandwidth.validate()?;
    }
    let radius = if kind == WeightKind::Tube {
        if params.tube.grid_points < 2 {
            return Err(SkeletonError::invalid("tube grid needs at least 2 points"));
        }
        match params.tube.radius {
            TubeRadius::Auto => tube_radius_rule(knots, data)?.value,
            TubeRadius::Fixed(r) if r.is_finite() && r > 0.0 => r,
            TubeRadius::Fixed(r) => {
                return Err(SkeletonError::invalid(format!("tube radius must be positive, got {r}")))
            }
        }
    } else {
        0.0
    };
    let members = knots.members();

    let estimates: Vec<EdgeEstimate> = edges
        .pairs
        .par_iter()
        .map(|&(j, l)| {
            let est = match kind {
                WeightKind::Voronoi => voronoi_density(j, l, knots, edges).map(EdgeEstimate::ok),
                WeightKind::Face => {
                    let mut cells = members[j].clone();
                    cells.extend_from_slice(&members[l]);
                    face_density_on(j, l, &cells, data, knots, params.kernel, &params.bandwidth)
                }
                WeightKind::Tube => tube_density(
                    j,
                    l,
                    data,
                    knots,
                    params.kernel,
                    &params.bandwidth,
                    radius,
                    params.tube.grid_points,
                )
                .map(|t| EdgeEstimate {
                    value: t.value,
                    warning: t.warning,
                }),
                WeightKind::AvgDist => Ok(avgdist_on(&members[j], &members[l], data)),
            };
            match est {
                Ok(e) => Ok(e),
                Err(SkeletonError::DegenerateKnots(..)) => Ok(EdgeEstimate::flagged(WeightWarning::CoincidentKnots)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    Ok(SkeletonGraph {
        knots: knots.clone(),
        edges: edges.clone(),
        weights: estimates.iter().map(|e| e.value).collect(),
        warnings: estimates.iter().map(|e| e.warning).collect(),
        weight_kind: kind,
    })
}
