//! CART classification tree on (weighted) Gini impurity.
//!
//! Candidate thresholds are midpoints between consecutive distinct values of
//! a feature. Equal impurity decreases are resolved by lower feature index,
//! then lower threshold, so the fitted partition only depends on the value
//! order inside each feature.
//!
//! A split remembers the two training values around its threshold. A query
//! lying (up to rounding) exactly on the midpoint goes left, decided from its
//! relative position between those values rather than by comparing with the
//! rounded midpoint, so positive affine rescaling of the features cannot flip
//! it.

use rand::seq::SliceRandom;
use rand::Rng;

use super::Classifier;
use crate::dataset::Dataset;
use crate::error::Result;

/// Smallest impurity decrease accepted as a split.
const MIN_DECREASE: f64 = 1e-12;
/// Relative band around a midpoint treated as "on" the threshold.
const MIDPOINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    /// Features examined per split; `None` examines all of them.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Largest training value sent left.
        below: f64,
        /// Smallest training value sent right.
        above: f64,
        /// Index of the `x <= threshold` child.
        left: usize,
        right: usize,
    },
}

/// `x <= threshold` for the split between `below` and `above`, with exact
/// midpoint ties going left.
pub fn goes_left(x: f64, below: f64, above: f64) -> bool {
    if x <= below {
        true
    } else if x >= above {
        false
    } else {
        (x - below) - (above - x) <= MIDPOINT_TOLERANCE * (above - below)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

impl Classifier for DecisionTree {
    fn predict_one(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    below,
                    above,
                    left,
                    right,
                    ..
                } => i = if goes_left(x[feature], below, above) { left } else { right },
            }
        }
    }
}

/// Gini impurity of a two-class weight vector.
pub fn gini(w: [f64; 2]) -> f64 {
    let total = w[0] + w[1];
    if total <= 0.0 {
        return 0.0;
    }
    let (a, b) = (w[0] / total, w[1] / total);
    1.0 - a * a - b * b
}

fn majority(w: [f64; 2]) -> usize {
    usize::from(w[1] > w[0])
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    decrease: f64,
    feature: usize,
    threshold: f64,
    below: f64,
    above: f64,
}

impl Candidate {
    fn beats(&self, other: &Option<Candidate>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.decrease > o.decrease
                    || (self.decrease == o.decrease
                        && (self.feature, self.threshold) < (o.feature, o.threshold))
            }
        }
    }
}

struct Builder<'a, R> {
    data: &'a Dataset,
    weights: &'a [f64],
    params: TreeParams,
    rng: Option<&'a mut R>,
    nodes: Vec<Node>,
}

impl<R: Rng> Builder<'_, R> {
    fn class_weights(&self, idx: &[usize]) -> [f64; 2] {
        let mut w = [0.0; 2];
        for &i in idx {
            w[self.data.labels[i]] += self.weights[i];
        }
        w
    }

    /// Best threshold on one feature, or `None` when the feature is constant
    /// over `idx`. The flag reports whether the feature was non-constant.
    fn best_on_feature(&self, idx: &mut [usize], feature: usize, parent: [f64; 2]) -> (bool, Option<Candidate>) {
        let p = self.data.n_features();
        let x = self.data.features.as_slice().expect("standard layout");
        let value = |i: usize| x[i * p + feature];
        idx.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let first = value(idx[0]);
        let last = value(idx[idx.len() - 1]);
        if first == last {
            return (false, None);
        }
        let total = parent[0] + parent[1];
        let parent_imp = gini(parent);
        let mut left = [0.0; 2];
        let mut best: Option<Candidate> = None;
        for pos in 0..idx.len() - 1 {
            let i = idx[pos];
            left[self.data.labels[i]] += self.weights[i];
            let (a, b) = (value(i), value(idx[pos + 1]));
            if a == b {
                continue;
            }
            let right = [parent[0] - left[0], parent[1] - left[1]];
            let wl = left[0] + left[1];
            let wr = right[0] + right[1];
            let decrease = parent_imp - (wl / total) * gini(left) - (wr / total) * gini(right);
            let mut threshold = a / 2.0 + b / 2.0;
            if threshold >= b || threshold < a {
                threshold = a;
            }
            let cand = Candidate {
                decrease,
                feature,
                threshold,
                below: a,
                above: b,
            };
            // thresholds ascend along the sweep, so strict improvement keeps the lowest
            if best.as_ref().is_none_or(|b| cand.decrease > b.decrease) {
                best = Some(cand);
            }
        }
        (true, best)
    }

    fn find_split(&mut self, idx: &mut [usize], parent: [f64; 2]) -> Option<Candidate> {
        let p = self.data.n_features();
        let mut order: Vec<usize> = (0..p).collect();
        let limit = match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < p => {
                order.shuffle(rng);
                m.max(1)
            }
            _ => p,
        };
        let mut best: Option<Candidate> = None;
        let mut visited = 0;
        for &f in &order {
            if visited >= limit && best.is_some_and(|b| b.decrease > MIN_DECREASE) {
                break;
            }
            let (informative, cand) = self.best_on_feature(idx, f, parent);
            if informative {
                visited += 1;
            }
            if let Some(c) = cand {
                if c.beats(&best) {
                    best = Some(c);
                }
            }
        }
        best.filter(|b| b.decrease > MIN_DECREASE)
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let w = self.class_weights(idx);
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { class: majority(w) });
        let pure = w[0] == 0.0 || w[1] == 0.0;
        let depth_left = self.params.max_depth.is_none_or(|d| depth < d);
        if pure || !depth_left || idx.len() < 2 {
            return slot;
        }
        let Some(split) = self.find_split(idx, w) else {
            return slot;
        };
        let p = self.data.n_features();
        let x = self.data.features.as_slice().expect("standard layout");
        let (mut l, mut r): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| x[i * p + split.feature] <= split.below);
        let left = self.grow(&mut l, depth + 1);
        let right = self.grow(&mut r, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            below: split.below,
            above: split.above,
            left,
            right,
        };
        slot
    }
}

/// Grows a tree on rows `indices` of `data` with per-row `weights`
/// (indexed by row of `data`). A random source is needed only when
/// `params.max_features` restricts the candidate features.
pub(crate) fn build_tree<R: Rng>(
    data: &Dataset,
    indices: &[usize],
    weights: &[f64],
    params: TreeParams,
    rng: Option<&mut R>,
) -> DecisionTree {
    let mut b = Builder {
        data,
        weights,
        params,
        rng,
        nodes: Vec::new(),
    };
    let mut idx = indices.to_vec();
    if idx.is_empty() {
        return DecisionTree {
            nodes: vec![Node::Leaf { class: 0 }],
        };
    }
    b.grow(&mut idx, 0);
    DecisionTree { nodes: b.nodes }
}

/// Fully grown CART tree with unit weights.
pub fn train_tree(train: &Dataset) -> Result<DecisionTree> {
    let all: Vec<usize> = (0..train.n_instances()).collect();
    let weights = vec![1.0; train.n_instances()];
    Ok(build_tree::<rand_chacha::ChaCha8Rng>(
        train,
        &all,
        &weights,
        TreeParams::default(),
        None,
    ))
}
