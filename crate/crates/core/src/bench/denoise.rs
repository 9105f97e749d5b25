use rayon::prelude::*;

use super::generators::LabeledDataset;
use crate::base::DataMatrix;
use crate::error::{Result, SkeletonError};
use crate::nn::sq_dist;

#[derive(Debug, Clone)]
pub struct Denoised {
    pub dataset: LabeledDataset,
    /// Original row indices that were kept, ascending.
    pub kept: Vec<usize>,
    /// Original row indices that were dropped, ascending.
    pub removed: Vec<usize>,
}

/// Distance from each observation to its `m`-th nearest other observation.
pub fn knn_radius(data: &DataMatrix, m: usize) -> Vec<f64> {
    let n = data.rows();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = data.row(i);
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| sq_dist(xi, data.row(j))).collect();
            let (_, kth, _) = d.select_nth_unstable_by(m - 1, f64::total_cmp);
            kth.sqrt()
        })
        .collect()
}

/// Drops the `⌈frac · n⌉` observations with the lowest `⌈√n⌉`-NN density,
/// i.e. the largest distance to their `⌈√n⌉`-th nearest neighbor.
pub fn knn_density_denoise(ds: &LabeledDataset, frac: f64) -> Result<Denoised> {
    if !(0.0..1.0).contains(&frac) {
        return Err(SkeletonError::invalid(format!(
            "denoise fraction must be in [0, 1), got {frac}"
        )));
    }
    let n = ds.n();
    // guard against frac * n landing a hair above an integer
    let remove = ((frac * n as f64) - 1e-9).ceil().max(0.0) as usize;
    if remove == 0 || n < 2 {
        return Ok(Denoised {
            dataset: ds.clone(),
            kept: (0..n).collect(),
            removed: Vec::new(),
        });
    }
    let m = ((n as f64).sqrt().ceil() as usize).clamp(1, n - 1);
    let radius = knn_radius(&ds.data, m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| radius[b].total_cmp(&radius[a]).then(a.cmp(&b)));
    let mut removed: Vec<usize> = order[..remove].to_vec();
    removed.sort_unstable();
    let mut drop = vec![false; n];
    for &i in &removed {
        drop[i] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !drop[i]).collect();
    let dataset = LabeledDataset {
        data: ds.data.select_rows(&kept)?,
        truth: kept.iter().map(|&i| ds.truth[i]).collect(),
        noise_label: ds.noise_label,
    };
    Ok(Denoised { dataset, kept, removed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Seed;
    use rand::Rng;

    fn uniform(n: usize, d: usize, seed: u64) -> LabeledDataset {
        let mut rng = Seed(seed).rng();
        let v: Vec<f64> = (0..n * d).map(|_| rng.random()).collect();
        LabeledDataset {
            data: DataMatrix::new(n, d, v).unwrap(),
            truth: vec![0; n],
            noise_label: None,
        }
    }

    #[test]
    fn zero_fraction_is_identity() {
        let ds = uniform(50, 2, 1);
        let out = knn_density_denoise(&ds, 0.0).unwrap();
        assert_eq!(out.dataset, ds);
        assert!(out.removed.is_empty());
    }

    #[test]
    fn outlier_goes_first() {
        let mut ds = uniform(99, 2, 2);
        let mut v = ds.data.as_slice().to_vec();
        v.extend_from_slice(&[50.0, 50.0]);
        ds.data = DataMatrix::new(100, 2, v).unwrap();
        ds.truth.push(1);
        let out = knn_density_denoise(&ds, 1.0 / 100.0).unwrap();
        assert_eq!(out.removed, vec![99]);
    }

    #[test]
    fn removes_exact_count() {
        let ds = uniform(205, 3, 3);
        let out = knn_density_denoise(&ds, 0.1).unwrap();
        assert_eq!(out.removed.len(), 21);
        assert_eq!(out.dataset.n(), 184);
        assert!(knn_density_denoise(&ds, 1.0).is_err());
    }
}
