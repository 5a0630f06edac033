//! Feature-scaling benchmark toolkit for imbalanced binary classification.
//!
//! The crate covers the whole experimental pipeline:
//!
//! * [`keel`]: KEEL `.dat` parsing, pre-split fold loading, results CSV.
//! * [`dataset`]: categorical encoding, imbalance ratio, IR strata, folds.
//! * [`scaling`]: NS, MC, SS, PS, VS, MM, MA, RS and QT fitted per fold.
//! * [`classifiers`]: KNN, Gaussian NB, Perceptron, CART and LDA.
//! * [`ensembles`]: Bagging, Random Forest, AdaBoost and the dynamic
//!   selection methods OLA, LCA, MCB, KNORA-E and KNORA-U.
//! * [`metrics`]: confusion matrix, F-beta, F1 and G-Mean.
//! * [`stats`]: ranks, Friedman test, Nemenyi critical difference, wins.
//! * [`harness`]: the parallel experiment grid and its reports.

pub mod classifiers;
pub mod dataset;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod keel;
pub mod metrics;
pub mod scaling;
pub mod stats;

pub use error::{Error, Result};
