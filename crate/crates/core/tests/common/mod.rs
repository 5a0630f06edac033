#![allow(dead_code)]

use std::path::PathBuf;

use scalebench::dataset::FoldPair;
use scalebench::keel::load_fold_pairs;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/keel")
}

pub fn bundled_names() -> Vec<String> {
    scalebench::harness::discover_datasets(&data_dir()).expect("bundled data present")
}

pub fn folds(name: &str) -> Vec<FoldPair> {
    load_fold_pairs(&data_dir().join(name), name).expect("bundled folds load")
}
