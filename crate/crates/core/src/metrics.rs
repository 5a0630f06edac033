//! Confusion-matrix metrics for imbalanced binary problems.
//!
//! Any rate whose denominator is zero is reported as 0.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(predictions: &[usize], labels: &[usize], positive_class: usize) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::invalid("no instances to evaluate"));
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p == positive_class, y == positive_class) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn precision(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp, cm.tp + cm.fp)
}

/// Sensitivity, true positive rate.
pub fn recall(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp, cm.tp + cm.fn_)
}

/// True negative rate.
pub fn specificity(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tn, cm.tn + cm.fp)
}

/// `(1+β²)·TP / ((1+β²)·TP + β²·(FP+FN))`.
pub fn f_beta(cm: &ConfusionMatrix, beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    Ok(f_beta_unchecked(cm, beta))
}

fn f_beta_unchecked(cm: &ConfusionMatrix, beta: f64) -> f64 {
    let b2 = beta * beta;
    let num = (1.0 + b2) * cm.tp as f64;
    let den = num + b2 * (cm.fp + cm.fn_) as f64;
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn f1(cm: &ConfusionMatrix) -> f64 {
    f_beta_unchecked(cm, 1.0)
}

pub fn g_mean(cm: &ConfusionMatrix) -> f64 {
    (recall(cm) * specificity(cm)).sqrt()
}
