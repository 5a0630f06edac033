use ndarray::Array2;

use super::{squared_distance, Classifier};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// k-nearest neighbours under Euclidean distance.
#[derive(Debug, Clone)]
pub struct Knn {
    features: Array2<f64>,
    labels: Vec<usize>,
    k: usize,
}

pub fn train_knn(train: &Dataset, k: usize) -> Result<Knn> {
    if train.n_instances() == 0 {
        return Err(Error::invalid("knn needs a non-empty training set"));
    }
    if k == 0 || k > train.n_instances() {
        return Err(Error::invalid(format!(
            "knn k = {k} must be in 1..={}",
            train.n_instances()
        )));
    }
    Ok(Knn {
        features: train.features.as_standard_layout().to_owned(),
        labels: train.labels.clone(),
        k,
    })
}

/// The `k` nearest rows of `features` to `x` as `(squared distance, row)`,
/// nearest first; equal distances are ordered by row index.
pub(crate) fn nearest(features: &Array2<f64>, x: &[f64], k: usize) -> Vec<(f64, usize)> {
    let p = features.ncols();
    let data = features.as_slice().expect("standard layout");
    let mut d: Vec<(f64, usize)> = data
        .chunks_exact(p)
        .enumerate()
        .map(|(i, row)| (squared_distance(row, x), i))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < d.len() {
        d.select_nth_unstable_by(k - 1, cmp);
        d.truncate(k);
    }
    d.sort_by(cmp);
    d
}

impl Knn {
    pub fn k(&self) -> usize {
        self.k
    }
}

impl Classifier for Knn {
    fn predict_one(&self, x: &[f64]) -> usize {
        let neighbours = nearest(&self.features, x, self.k);
        let mut votes = [0usize; 2];
        let mut dist_sum = [0.0f64; 2];
        for &(d2, i) in &neighbours {
            let c = self.labels[i];
            votes[c] += 1;
            dist_sum[c] += d2.sqrt();
        }
        if votes[0] != votes[1] {
            return usize::from(votes[1] > votes[0]);
        }
        usize::from(dist_sum[1] < dist_sum[0])
    }
}
