//! Dynamic classifier and ensemble selection.

use std::sync::Arc;

use super::{majority_vote, Pool};
use crate::classifiers::knn::nearest;
use crate::classifiers::Classifier;

/// Minimum BKS similarity for a neighbour to stay in the MCB region.
pub const MCB_SIMILARITY_THRESHOLD: f64 = 0.7;
/// Competence lead the MCB winner needs over the runner-up.
pub const MCB_DIFF_THRESHOLD: f64 = 0.1;

/// The `k_roc` DSEL rows nearest to a query, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOfCompetence {
    pub indices: Vec<usize>,
    pub labels: Vec<usize>,
    /// `predictions[i][j]`: model `i` on neighbour `j`.
    pub predictions: Vec<Vec<usize>>,
    /// `correct[i][j]`: whether model `i` is right on neighbour `j`.
    pub correct: Vec<Vec<bool>>,
}

impl RegionOfCompetence {
    /// Builds a region from explicit bits (predictions follow from labels).
    pub fn from_correctness(labels: Vec<usize>, correct: Vec<Vec<bool>>) -> Self {
        let predictions = correct
            .iter()
            .map(|row| row.iter().zip(&labels).map(|(&c, &y)| if c { y } else { 1 - y }).collect())
            .collect();
        Self {
            indices: (0..labels.len()).collect(),
            labels,
            predictions,
            correct,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn pool_size(&self) -> usize {
        self.correct.len()
    }
}

pub fn region_of_competence(pool: &Pool, x: &[f64]) -> RegionOfCompetence {
    let indices: Vec<usize> = nearest(&pool.dsel_features, x, pool.k_roc)
        .into_iter()
        .map(|(_, i)| i)
        .collect();
    let labels: Vec<usize> = indices.iter().map(|&j| pool.dsel_labels[j]).collect();
    let predictions: Vec<Vec<usize>> = (0..pool.len())
        .map(|m| indices.iter().map(|&j| pool.dsel_prediction(m, j)).collect())
        .collect();
    let correct = predictions
        .iter()
        .map(|row: &Vec<usize>| row.iter().zip(&labels).map(|(p, y)| p == y).collect())
        .collect();
    RegionOfCompetence {
        indices,
        labels,
        predictions,
        correct,
    }
}

/// Index of the largest value; ties go to the lower index.
pub fn select_best(competences: &[f64]) -> usize {
    let mut best = 0;
    for (i, &c) in competences.iter().enumerate() {
        if c > competences[best] {
            best = i;
        }
    }
    best
}

/// Accuracy of every model over the whole region.
pub fn ola_competences(roc: &RegionOfCompetence) -> Vec<f64> {
    roc.correct
        .iter()
        .map(|row| {
            if row.is_empty() {
                0.0
            } else {
                row.iter().filter(|&&c| c).count() as f64 / row.len() as f64
            }
        })
        .collect()
}

/// For model `i` predicting class `w` on the query: the fraction of region
/// rows labelled `w` that model `i` also predicts as `w`.
pub fn lca_competences(roc: &RegionOfCompetence, base_predictions: &[usize]) -> Vec<f64> {
    base_predictions
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let mut hit = 0;
            let mut total = 0;
            for (j, &y) in roc.labels.iter().enumerate() {
                if y == w {
                    total += 1;
                    hit += usize::from(roc.predictions[i][j] == w);
                }
            }
            if total == 0 {
                0.0
            } else {
                hit as f64 / total as f64
            }
        })
        .collect()
}

/// Model chosen by MCB, or `None` when no model leads clearly and the
/// whole pool should vote.
pub fn mcb_select(roc: &RegionOfCompetence, base_predictions: &[usize]) -> Option<usize> {
    let pool_size = base_predictions.len();
    let keep: Vec<usize> = (0..roc.len())
        .filter(|&j| {
            let same = (0..pool_size)
                .filter(|&i| roc.predictions[i][j] == base_predictions[i])
                .count();
            same as f64 / pool_size as f64 >= MCB_SIMILARITY_THRESHOLD
        })
        .collect();
    let cols: Vec<usize> = if keep.is_empty() { (0..roc.len()).collect() } else { keep };
    let competences: Vec<f64> = roc
        .correct
        .iter()
        .map(|row| cols.iter().filter(|&&j| row[j]).count() as f64 / cols.len() as f64)
        .collect();
    let best = select_best(&competences);
    let runner_up = competences
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &c)| c)
        .fold(f64::NEG_INFINITY, f64::max);
    (competences[best] - runner_up > MCB_DIFF_THRESHOLD).then_some(best)
}

/// Models correct on every one of the `k` nearest neighbours, for the
/// largest `k` at which any exist. Falls back to the whole pool.
pub fn knora_e_selection(roc: &RegionOfCompetence) -> Vec<usize> {
    for k in (1..=roc.len()).rev() {
        let oracles: Vec<usize> = roc
            .correct
            .iter()
            .enumerate()
            .filter(|(_, row)| row[..k].iter().all(|&c| c))
            .map(|(i, _)| i)
            .collect();
        if !oracles.is_empty() {
            return oracles;
        }
    }
    (0..roc.pool_size()).collect()
}

/// Vote totals per class: each model votes for its query prediction once per
/// region row it classifies correctly. Unweighted whole-pool votes when no
/// model is correct anywhere.
pub fn knora_u_votes(roc: &RegionOfCompetence, base_predictions: &[usize]) -> [usize; 2] {
    let mut votes = [0usize; 2];
    for (row, &p) in roc.correct.iter().zip(base_predictions) {
        votes[p] += row.iter().filter(|&&c| c).count();
    }
    if votes == [0, 0] {
        for &p in base_predictions {
            votes[p] += 1;
        }
    }
    votes
}

pub fn predict_ola(pool: &Pool, x: &[f64]) -> usize {
    let roc = region_of_competence(pool, x);
    let best = select_best(&ola_competences(&roc));
    pool.base_models[best].predict_one(x)
}

pub fn predict_lca(pool: &Pool, x: &[f64]) -> usize {
    let roc = region_of_competence(pool, x);
    let preds = pool.base_predictions(x);
    preds[select_best(&lca_competences(&roc, &preds))]
}

pub fn predict_mcb(pool: &Pool, x: &[f64]) -> usize {
    let roc = region_of_competence(pool, x);
    let preds = pool.base_predictions(x);
    match mcb_select(&roc, &preds) {
        Some(i) => preds[i],
        None => majority_vote(preds.iter().copied()),
    }
}

pub fn predict_knora_e(pool: &Pool, x: &[f64]) -> usize {
    let roc = region_of_competence(pool, x);
    let chosen = knora_e_selection(&roc);
    majority_vote(chosen.iter().map(|&i| pool.base_models[i].predict_one(x)))
}

pub fn predict_knora_u(pool: &Pool, x: &[f64]) -> usize {
    let roc = region_of_competence(pool, x);
    let votes = knora_u_votes(&roc, &pool.base_predictions(x));
    usize::from(votes[1] > votes[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DynamicMethod {
    Ola,
    Lca,
    Mcb,
    KnoraE,
    KnoraU,
}

impl DynamicMethod {
    pub const ALL: [DynamicMethod; 5] = [
        DynamicMethod::Ola,
        DynamicMethod::Lca,
        DynamicMethod::Mcb,
        DynamicMethod::KnoraE,
        DynamicMethod::KnoraU,
    ];

    pub fn predict(self, pool: &Pool, x: &[f64]) -> usize {
        match self {
            DynamicMethod::Ola => predict_ola(pool, x),
            DynamicMethod::Lca => predict_lca(pool, x),
            DynamicMethod::Mcb => predict_mcb(pool, x),
            DynamicMethod::KnoraE => predict_knora_e(pool, x),
            DynamicMethod::KnoraU => predict_knora_u(pool, x),
        }
    }
}

/// A dynamic method bound to a (shared) pool.
#[derive(Debug, Clone)]
pub struct DynamicSelector {
    pub pool: Arc<Pool>,
    pub method: DynamicMethod,
}

impl DynamicSelector {
    pub fn new(pool: Arc<Pool>, method: DynamicMethod) -> Self {
        Self { pool, method }
    }
}

impl Classifier for DynamicSelector {
    fn predict_one(&self, x: &[f64]) -> usize {
        self.method.predict(&self.pool, x)
    }
}
