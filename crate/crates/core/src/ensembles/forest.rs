use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{draw_bootstrap, majority_vote};
use crate::classifiers::tree::build_tree;
use crate::classifiers::{Classifier, DecisionTree, TreeParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `⌈√p⌉`.
    pub max_features: Option<usize>,
    /// `false` trains every tree on the training set itself.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: None,
            bootstrap: true,
        }
    }
}

/// `⌈√p⌉`, at least 1.
pub fn sqrt_features(p: usize) -> usize {
    let mut m = (p as f64).sqrt().ceil() as usize;
    while m > 1 && (m - 1) * (m - 1) >= p {
        m -= 1;
    }
    while m * m < p {
        m += 1;
    }
    m.max(1)
}

#[derive(Debug, Clone)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub max_features: usize,
}

impl Classifier for RandomForest {
    fn predict_one(&self, x: &[f64]) -> usize {
        majority_vote(self.trees.iter().map(|t| t.predict_one(x)))
    }
}

/// Fully grown trees on bootstrap samples, each split drawing a random
/// feature subset. Tree `i` is seeded with `seed ^ i`.
pub fn train_random_forest(train: &Dataset, params: ForestParams, seed: u64) -> Result<RandomForest> {
    let n = train.n_instances();
    if n == 0 {
        return Err(Error::invalid("random forest needs a non-empty training set"));
    }
    if params.n_trees == 0 {
        return Err(Error::invalid("forest needs at least one tree"));
    }
    let p = train.n_features();
    let max_features = params.max_features.unwrap_or_else(|| sqrt_features(p)).clamp(1, p);
    let weights = vec![1.0; n];
    let identity: Vec<usize> = (0..n).collect();
    let tree_params = TreeParams {
        max_depth: None,
        max_features: Some(max_features),
    };
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            let sample = if params.bootstrap {
                draw_bootstrap(n, &mut rng)
            } else {
                identity.clone()
            };
            build_tree(train, &sample, &weights, tree_params, Some(&mut rng))
        })
        .collect();
    Ok(RandomForest { trees, max_features })
}
