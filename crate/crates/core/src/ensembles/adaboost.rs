use crate::classifiers::tree::build_tree;
use crate::classifiers::{Classifier, DecisionTree, TreeParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Weight given to a stump with zero weighted error.
pub const ALPHA_CAP: f64 = 10.0;

/// Discrete two-class AdaBoost over decision stumps.
#[derive(Debug, Clone)]
pub struct AdaBoost {
    pub stumps: Vec<DecisionTree>,
    pub alphas: Vec<f64>,
    /// Weighted error of each kept stump.
    pub errors: Vec<f64>,
    /// Instance weights after the last kept round.
    pub final_weights: Vec<f64>,
}

impl AdaBoost {
    /// `Σ α_t · h_t(x)` with `h_t ∈ {−1, +1}`.
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.stumps
            .iter()
            .zip(&self.alphas)
            .map(|(s, a)| if s.predict_one(x) == 1 { *a } else { -*a })
            .sum()
    }
}

impl Classifier for AdaBoost {
    fn predict_one(&self, x: &[f64]) -> usize {
        usize::from(self.margin(x) > 0.0)
    }
}

pub fn train_adaboost(train: &Dataset, n_rounds: usize) -> Result<AdaBoost> {
    let n = train.n_instances();
    let counts = train.class_counts();
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::invalid("AdaBoost needs both classes in the training set"));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut w = vec![1.0 / n as f64; n];
    let stump = TreeParams {
        max_depth: Some(1),
        max_features: None,
    };
    let mut model = AdaBoost {
        stumps: Vec::new(),
        alphas: Vec::new(),
        errors: Vec::new(),
        final_weights: w.clone(),
    };
    for _ in 0..n_rounds {
        let h = build_tree::<rand_chacha::ChaCha8Rng>(train, &all, &w, stump, None);
        let wrong: Vec<bool> = (0..n).map(|i| h.predict_one(train.row(i)) != train.labels[i]).collect();
        let total: f64 = w.iter().sum();
        let eps: f64 = w.iter().zip(&wrong).filter(|(_, &m)| m).map(|(v, _)| v).sum::<f64>() / total;
        if eps >= 0.5 {
            break;
        }
        if eps <= 0.0 {
            model.stumps.push(h);
            model.alphas.push(ALPHA_CAP);
            model.errors.push(0.0);
            break;
        }
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        let (up, down) = (alpha.exp(), (-alpha).exp());
        for (v, &m) in w.iter_mut().zip(&wrong) {
            *v *= if m { up } else { down };
        }
        let s: f64 = w.iter().sum();
        for v in &mut w {
            *v /= s;
        }
        model.stumps.push(h);
        model.alphas.push(alpha);
        model.errors.push(eps);
        model.final_weights = w.clone();
    }
    Ok(model)
}
