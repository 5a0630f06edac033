use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{dot, Classifier};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceptronParams {
    pub max_iter: usize,
    pub tol: f64,
    /// Consecutive epochs without an improvement larger than `tol` before
    /// training stops.
    pub n_iter_no_change: usize,
    pub seed: u64,
}

impl Default for PerceptronParams {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-3,
            n_iter_no_change: 10,
            seed: 0,
        }
    }
}

/// Linear threshold unit: class 1 when `w·x + b ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perceptron {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Epochs actually run.
    pub epochs: usize,
    /// Total weight updates made.
    pub updates: usize,
    /// Training error rate after the last epoch.
    pub training_error: f64,
}

impl Perceptron {
    /// The constant-zero model, which predicts class 1 everywhere.
    pub fn zeros(n_features: usize) -> Self {
        Self {
            weights: vec![0.0; n_features],
            bias: 0.0,
            epochs: 0,
            updates: 0,
            training_error: 0.0,
        }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

impl Classifier for Perceptron {
    fn predict_one(&self, x: &[f64]) -> usize {
        usize::from(self.decision(x) >= 0.0)
    }
}

/// Trains on the rows `indices` of `data` (repetitions allowed, as in a
/// bootstrap sample).
pub(crate) fn train_perceptron_on(data: &Dataset, indices: &[usize], params: PerceptronParams) -> Perceptron {
    let mut model = Perceptron::zeros(data.n_features());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = indices.to_vec();
    let n = indices.len() as f64;
    let mut best = f64::INFINITY;
    let mut stale = 0;
    for _ in 0..params.max_iter {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = data.row(i);
            let y = data.labels[i];
            let sign = if y == 1 { 1.0 } else { -1.0 };
            if model.predict_one(x) != y {
                for (w, v) in model.weights.iter_mut().zip(x) {
                    *w += sign * v;
                }
                model.bias += sign;
                model.updates += 1;
            }
        }
        model.epochs += 1;
        let errors = indices
            .iter()
            .filter(|&&i| model.predict_one(data.row(i)) != data.labels[i])
            .count();
        model.training_error = errors as f64 / n;
        if errors == 0 {
            break;
        }
        if model.training_error > best - params.tol {
            stale += 1;
        } else {
            stale = 0;
        }
        best = best.min(model.training_error);
        if stale >= params.n_iter_no_change.max(1) {
            break;
        }
    }
    model
}

/// Classic perceptron (learning rate 1, zero initial weights) with seeded
/// per-epoch shuffling. Training stops at zero training error, once
/// `n_iter_no_change` epochs in a row fail to lower the training error by
/// more than `tol` below the best seen, or after `max_iter` epochs.
pub fn train_perceptron(train: &Dataset, params: PerceptronParams) -> Result<Perceptron> {
    if train.n_instances() == 0 {
        return Err(Error::invalid("perceptron needs a non-empty training set"));
    }
    let all: Vec<usize> = (0..train.n_instances()).collect();
    Ok(train_perceptron_on(train, &all, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn ds(rows: &[[f64; 2]], labels: &[usize]) -> Dataset {
        Dataset::new(
            "p",
            Array2::from_shape_vec((rows.len(), 2), rows.iter().flatten().copied().collect()).unwrap(),
            labels.to_vec(),
            1,
            ["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    const SQUARE: [[f64; 2]; 4] = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];

    #[test]
    fn learns_and() {
        for seed in 0..200 {
            let m = train_perceptron(&ds(&SQUARE, &[0, 0, 0, 1]), PerceptronParams { seed, ..Default::default() }).unwrap();
            assert_eq!(m.training_error, 0.0, "seed {seed}");
            let d = ds(&SQUARE, &[0, 0, 0, 1]);
            assert_eq!(m.predict(&d.features), vec![0, 0, 0, 1]);
        }
    }

    #[test]
    fn cannot_learn_xor() {
        let m = train_perceptron(&ds(&SQUARE, &[0, 1, 1, 0]), PerceptronParams::default()).unwrap();
        assert!(m.training_error > 0.0);
    }

    #[test]
    fn single_class_data() {
        // all class 1: the zero model is already right, so nothing changes
        let m = train_perceptron(&ds(&SQUARE, &[1, 1, 1, 1]), PerceptronParams::default()).unwrap();
        assert_eq!((m.updates, m.epochs), (0, 1));
        assert_eq!(m.predict_one(&[5.0, -3.0]), 1);

        // all class 0 on positive features: updates happen only in the first epoch
        let rows = [[1.0, 2.0], [2.0, 1.0], [3.0, 3.0], [0.5, 0.5]];
        let d = ds(&rows, &[0, 0, 0, 0]);
        let m = train_perceptron(&d, PerceptronParams::default()).unwrap();
        assert_eq!(m.epochs, 1);
        assert!(m.updates >= 1);
        assert_eq!(m.predict(&d.features), vec![0, 0, 0, 0]);
    }

    #[test]
    fn seeded_training_is_reproducible() {
        let rows: Vec<[f64; 2]> = (0..40).map(|i| [(i % 7) as f64, (i % 5) as f64 - 2.0]).collect();
        let labels: Vec<usize> = (0..40).map(|i| usize::from(i % 3 == 0)).collect();
        let d = ds(&rows, &labels);
        let p = PerceptronParams { seed: 42, ..Default::default() };
        assert_eq!(train_perceptron(&d, p).unwrap(), train_perceptron(&d, p).unwrap());
    }
}
