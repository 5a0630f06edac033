//! Static ensembles and dynamic selection over a shared pool.
//!
//! Bagging, Random Forest and AdaBoost are static: every member votes on
//! every query. OLA, LCA, MCB, KNORA-E and KNORA-U pick members per query
//! from the neighbourhood of the query in the selection set (DSEL).

mod adaboost;
mod bagging;
mod dynamic;
mod forest;

use rand::Rng;

pub use adaboost::{train_adaboost, AdaBoost, ALPHA_CAP};
pub use bagging::{bootstrap_indices, train_bagging, BaggingParams, MAX_BOOTSTRAP_RETRIES};
pub use dynamic::{
    knora_e_selection, knora_u_votes, lca_competences, mcb_select, ola_competences, predict_knora_e,
    predict_knora_u, predict_lca, predict_mcb, predict_ola, region_of_competence, select_best,
    DynamicMethod, DynamicSelector, RegionOfCompetence, MCB_DIFF_THRESHOLD, MCB_SIMILARITY_THRESHOLD,
};
pub use forest::{train_random_forest, ForestParams, RandomForest};

use crate::classifiers::{Classifier, TrainedModel};
use crate::error::{Error, Result};
use ndarray::Array2;

/// Default neighbourhood size for dynamic selection.
pub const DEFAULT_K_ROC: usize = 7;

/// Majority vote over class indices; a tie goes to class 0.
pub fn majority_vote(votes: impl IntoIterator<Item = usize>) -> usize {
    let mut count = [0usize; 2];
    for v in votes {
        count[v] += 1;
    }
    usize::from(count[1] > count[0])
}

/// Ordered base models plus the selection set used to judge them locally.
#[derive(Debug, Clone)]
pub struct Pool {
    pub base_models: Vec<TrainedModel>,
    pub dsel_features: Array2<f64>,
    pub dsel_labels: Vec<usize>,
    pub k_roc: usize,
    /// `dsel_predictions[i][j]`: model `i` on DSEL row `j`.
    dsel_predictions: Vec<Vec<usize>>,
}

impl Pool {
    pub fn new(
        base_models: Vec<TrainedModel>,
        dsel_features: Array2<f64>,
        dsel_labels: Vec<usize>,
        k_roc: usize,
    ) -> Result<Pool> {
        if base_models.is_empty() {
            return Err(Error::invalid("pool needs at least one base model"));
        }
        if dsel_features.nrows() != dsel_labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dsel_features.nrows(),
                found: dsel_labels.len(),
            });
        }
        if k_roc == 0 || k_roc > dsel_labels.len() {
            return Err(Error::invalid(format!(
                "k_roc must lie in 1..={}, got {k_roc}",
                dsel_labels.len()
            )));
        }
        let dsel_features = dsel_features.as_standard_layout().to_owned();
        let dsel_predictions = base_models.iter().map(|m| m.predict(&dsel_features)).collect();
        Ok(Pool {
            base_models,
            dsel_features,
            dsel_labels,
            k_roc,
            dsel_predictions,
        })
    }

    pub fn len(&self) -> usize {
        self.base_models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_models.is_empty()
    }

    /// Whether model `i` classifies DSEL row `j` correctly.
    pub fn correct(&self, model: usize, row: usize) -> bool {
        self.dsel_predictions[model][row] == self.dsel_labels[row]
    }

    pub(crate) fn dsel_prediction(&self, model: usize, row: usize) -> usize {
        self.dsel_predictions[model][row]
    }

    /// Every base model's prediction for `x`, in pool order.
    pub fn base_predictions(&self, x: &[f64]) -> Vec<usize> {
        self.base_models.iter().map(|m| m.predict_one(x)).collect()
    }
}

/// Plain majority vote of the whole pool.
pub fn predict_majority(pool: &Pool, x: &[f64]) -> usize {
    majority_vote(pool.base_models.iter().map(|m| m.predict_one(x)))
}

impl Classifier for Pool {
    fn predict_one(&self, x: &[f64]) -> usize {
        predict_majority(self, x)
    }
}

/// Bootstrap with rows drawn uniformly with replacement.
pub(crate) fn draw_bootstrap<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}
