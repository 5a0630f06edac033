mod common;

use scalebench::dataset::imbalance_ratio;
use scalebench::keel::{fold_file_name, parse_keel_document, parse_keel_file, split_document};

#[test]
fn every_bundled_fold_file_round_trips() {
    for name in common::bundled_names() {
        for fold in 1..=5 {
            for train in [true, false] {
                let path = common::data_dir().join(&name).join(fold_file_name(&name, fold, train));
                let doc = parse_keel_file(&path).unwrap();
                let again = parse_keel_document(&doc.to_keel_string()).unwrap();
                assert_eq!(doc, again, "{}", path.display());
            }
        }
    }
}

#[test]
fn folds_partition_the_dataset_and_keep_strata() {
    for name in common::bundled_names() {
        let folds = common::folds(&name);
        assert_eq!(folds.len(), 5);
        let whole = folds[0].train.concat(&folds[0].test).unwrap();
        let n = whole.n_instances();
        let counts = whole.class_counts();
        let mut test_total = 0;
        for f in &folds {
            assert_eq!(f.train.n_instances() + f.test.n_instances(), n, "{name}");
            assert_eq!(f.train.feature_names, f.test.feature_names);
            assert_eq!(f.train.class_names, f.test.class_names);
            assert_eq!(f.train.positive_class, whole.positive_class);
            test_total += f.test.n_instances();
            // each class is spread over the test folds within one row
            for c in 0..2 {
                let got = f.test.class_counts()[c] as f64;
                assert!((got - counts[c] as f64 / 5.0).abs() < 1.0 + 1e-9, "{name} fold {}", f.fold_index);
            }
        }
        assert_eq!(test_total, n, "{name}: test folds must cover every row once");
        assert!(imbalance_ratio(&whole).unwrap() >= 1.0);
    }
}

#[test]
fn regenerating_folds_reproduces_the_bundled_files() {
    let full = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/keel-full");
    for name in ["glass1", "ecoli-0-1_vs_5", "haberman"] {
        let doc = parse_keel_file(&full.join(format!("{name}.dat"))).unwrap();
        for (i, (train, test)) in split_document(&doc, 5, 20231001).unwrap().into_iter().enumerate() {
            let dir = common::data_dir().join(name);
            let read = |tra| std::fs::read_to_string(dir.join(fold_file_name(name, i + 1, tra))).unwrap();
            assert_eq!(train.to_keel_string(), read(true));
            assert_eq!(test.to_keel_string(), read(false));
        }
    }
}

// KEEL names the class of interest "positive" even where it is the
// majority, as in ecoli-0_vs_1 (143 positive, 77 negative).
#[test]
fn positive_class_follows_the_keel_name() {
    let mut majority_positive = Vec::new();
    for name in common::bundled_names() {
        let f = &common::folds(&name)[0];
        assert_eq!(f.train.class_names[f.train.positive_class], "positive", "{name}");
        let whole = f.train.concat(&f.test).unwrap();
        let c = whole.class_counts();
        if c[whole.positive_class] > c[1 - whole.positive_class] {
            majority_positive.push(name);
        }
    }
    assert_eq!(majority_positive, ["ecoli-0_vs_1"]);
}
