//! Monolithic classifiers. Every model predicts class indices in `{0, 1}`
//! and breaks ties towards the lower index.

mod gnb;
pub(crate) mod knn;
mod lda;
pub(crate) mod perceptron;
pub mod tree;

use ndarray::Array2;

pub use gnb::{train_gnb, GaussianNb};
pub use knn::{train_knn, Knn};
pub use lda::{train_lda, Lda};
pub use perceptron::{train_perceptron, Perceptron, PerceptronParams};
pub use tree::{train_tree, DecisionTree, TreeParams};

/// A trained binary predictor.
pub trait Classifier: Send + Sync {
    fn predict_one(&self, x: &[f64]) -> usize;

    fn predict(&self, features: &Array2<f64>) -> Vec<usize> {
        features
            .rows()
            .into_iter()
            .map(|r| match r.as_slice() {
                Some(s) => self.predict_one(s),
                None => self.predict_one(&r.to_vec()),
            })
            .collect()
    }
}

/// Any of the monolithic models.
#[derive(Debug, Clone)]
pub enum TrainedModel {
    Knn(Knn),
    GaussianNb(GaussianNb),
    Perceptron(Perceptron),
    Tree(DecisionTree),
    Lda(Lda),
}

impl Classifier for TrainedModel {
    fn predict_one(&self, x: &[f64]) -> usize {
        match self {
            TrainedModel::Knn(m) => m.predict_one(x),
            TrainedModel::GaussianNb(m) => m.predict_one(x),
            TrainedModel::Perceptron(m) => m.predict_one(x),
            TrainedModel::Tree(m) => m.predict_one(x),
            TrainedModel::Lda(m) => m.predict_one(x),
        }
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of the largest score; ties go to the lower index.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}
