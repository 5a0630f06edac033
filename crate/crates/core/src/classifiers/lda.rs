//! Linear discriminant analysis with a pooled, ridge-regularized covariance.

use super::{argmax, dot, Classifier};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Ridge added to the pooled covariance diagonal, relative to `trace / p`.
pub const RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Lda {
    pub means: [Vec<f64>; 2],
    pub priors: [f64; 2],
    /// `Σ⁻¹ μ_c` per class.
    pub coefficients: [Vec<f64>; 2],
    /// `−½ μ_c·Σ⁻¹μ_c + ln π_c` per class.
    pub intercepts: [f64; 2],
}

impl Lda {
    /// Linear discriminant score per class.
    pub fn scores(&self, x: &[f64]) -> [f64; 2] {
        [
            dot(x, &self.coefficients[0]) + self.intercepts[0],
            dot(x, &self.coefficients[1]) + self.intercepts[1],
        ]
    }

    /// Discriminant direction `Σ⁻¹(μ₁ − μ₀)`.
    pub fn direction(&self) -> Vec<f64> {
        self.coefficients[1]
            .iter()
            .zip(&self.coefficients[0])
            .map(|(a, b)| a - b)
            .collect()
    }
}

impl Classifier for Lda {
    fn predict_one(&self, x: &[f64]) -> usize {
        argmax(&self.scores(x))
    }
}

/// Solves `a · x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major `n × n`. Returns `None` for a numerically singular matrix.
pub(crate) fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()).then(j.cmp(&i)))?;
        if a[pivot * n + col] == 0.0 || !a[pivot * n + col].is_finite() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * b[k]).sum();
        b[row] = (b[row] - s) / a[row * n + row];
    }
    b.iter().all(|v| v.is_finite()).then_some(b)
}

pub fn train_lda(train: &Dataset) -> Result<Lda> {
    let counts = train.class_counts();
    for (class, &count) in counts.iter().enumerate() {
        if count < 2 {
            return Err(Error::InsufficientClass {
                class: train.class_names[class].clone(),
                count,
                required: 2,
            });
        }
    }
    let n = train.n_instances();
    let p = train.n_features();
    let mut means = [vec![0.0; p], vec![0.0; p]];
    for i in 0..n {
        let c = train.labels[i];
        for (m, v) in means[c].iter_mut().zip(train.row(i)) {
            *m += v;
        }
    }
    for c in 0..2 {
        for m in &mut means[c] {
            *m /= counts[c] as f64;
        }
    }

    let mut cov = vec![0.0; p * p];
    let mut centred = vec![0.0; p];
    for i in 0..n {
        let mean = &means[train.labels[i]];
        for ((c, v), m) in centred.iter_mut().zip(train.row(i)).zip(mean) {
            *c = v - m;
        }
        for a in 0..p {
            for b in a..p {
                cov[a * p + b] += centred[a] * centred[b];
            }
        }
    }
    let denom = (n - 2) as f64;
    for a in 0..p {
        for b in a..p {
            let v = cov[a * p + b] / denom;
            cov[a * p + b] = v;
            cov[b * p + a] = v;
        }
    }
    let trace: f64 = (0..p).map(|a| cov[a * p + a]).sum();
    let ridge = if trace > 0.0 && trace.is_finite() {
        RIDGE * trace / p as f64
    } else {
        RIDGE
    };
    for a in 0..p {
        cov[a * p + a] += ridge;
    }

    let mut coefficients = [Vec::new(), Vec::new()];
    let mut intercepts = [0.0; 2];
    let mut priors = [0.0; 2];
    for c in 0..2 {
        let w = solve(cov.clone(), means[c].clone())
            .ok_or_else(|| Error::invalid("pooled covariance is singular"))?;
        priors[c] = counts[c] as f64 / n as f64;
        intercepts[c] = -0.5 * dot(&means[c], &w) + priors[c].ln();
        coefficients[c] = w;
    }
    Ok(Lda {
        means,
        priors,
        coefficients,
        intercepts,
    })
}
