use std::f64::consts::PI;

use super::{argmax, Classifier};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Relative variance smoothing added to every per-class variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

/// Gaussian naive Bayes.
#[derive(Debug, Clone)]
pub struct GaussianNb {
    log_priors: [f64; 2],
    means: [Vec<f64>; 2],
    variances: [Vec<f64>; 2],
}

pub fn train_gnb(train: &Dataset) -> Result<GaussianNb> {
    let n = train.n_instances();
    let p = train.n_features();
    let counts = train.class_counts();
    for (c, &count) in counts.iter().enumerate() {
        if count == 0 {
            return Err(Error::InsufficientClass {
                class: train.class_names[c].clone(),
                count,
                required: 1,
            });
        }
    }
    let mut means = [vec![0.0; p], vec![0.0; p]];
    for i in 0..n {
        let c = train.labels[i];
        for (m, v) in means[c].iter_mut().zip(train.row(i)) {
            *m += v;
        }
    }
    for c in 0..2 {
        means[c].iter_mut().for_each(|m| *m /= counts[c] as f64);
    }
    let mut variances = [vec![0.0; p], vec![0.0; p]];
    for i in 0..n {
        let c = train.labels[i];
        for ((s, v), m) in variances[c].iter_mut().zip(train.row(i)).zip(&means[c]) {
            *s += (v - m) * (v - m);
        }
    }
    for c in 0..2 {
        variances[c].iter_mut().for_each(|s| *s /= counts[c] as f64);
    }

    // largest population variance over the whole training set
    let max_var = (0..p)
        .map(|j| {
            let col = train.features.column(j);
            let mean = col.sum() / n as f64;
            col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64
        })
        .fold(0.0_f64, f64::max);
    let epsilon = if max_var > 0.0 { VAR_SMOOTHING * max_var } else { VAR_SMOOTHING };
    for v in variances.iter_mut().flatten() {
        *v += epsilon;
    }

    let log_priors = [
        (counts[0] as f64 / n as f64).ln(),
        (counts[1] as f64 / n as f64).ln(),
    ];
    Ok(GaussianNb {
        log_priors,
        means,
        variances,
    })
}

impl GaussianNb {
    /// Unnormalized log posterior per class.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> [f64; 2] {
        let mut out = self.log_priors;
        for (c, o) in out.iter_mut().enumerate() {
            for ((v, m), var) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                *o -= 0.5 * (2.0 * PI * var).ln() + (v - m) * (v - m) / (2.0 * var);
            }
        }
        out
    }
}

impl Classifier for GaussianNb {
    fn predict_one(&self, x: &[f64]) -> usize {
        argmax(&self.joint_log_likelihood(x))
    }
}
