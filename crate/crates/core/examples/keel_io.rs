//! Parse a KEEL file by hand, encode it and compare with the bundled folds.
//!
//! cargo run --example keel_io

use std::path::PathBuf;

use scalebench::dataset::{clean_strings, imbalance_ratio, ir_stratum, one_hot_encode, PositiveClass};
use scalebench::keel::{load_fold_pairs, parse_keel};

const TOY: &str = "\
@relation toy
@attribute Sex {M, F, I}
@attribute Length real [0.0, 1.0]
@attribute Class { positive, negative}
@inputs Sex, Length
@outputs Class
@data
M, 0.45, negative
 F , 0.35, Positive
I, 0.53, negative
M, 0.44, negative
";

fn main() -> scalebench::Result<()> {
    let raw = clean_strings(parse_keel(TOY)?);
    let d = one_hot_encode(&raw, &PositiveClass::Auto)?;
    println!("features: {:?}", d.feature_names);
    println!("classes {:?}, positive = {}", d.class_names, d.positive_class);
    for i in 0..d.n_instances() {
        println!("  {:?} -> {}", d.row(i), d.labels[i]);
    }
    let ir = imbalance_ratio(&d)?;
    println!("IR {ir:.2} ({})\n", ir_stratum(ir));

    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/keel");
    for name in ["abalone9-18", "glass1", "abalone19"] {
        let folds = load_fold_pairs(&root.join(name), name)?;
        let whole = folds[0].train.concat(&folds[0].test)?;
        let ir = imbalance_ratio(&whole)?;
        let sizes: Vec<usize> = folds.iter().map(|f| f.test.n_instances()).collect();
        println!(
            "{name:<12} {} features, counts {:?}, IR {ir:.2} ({}), test sizes {sizes:?}",
            whole.n_features(),
            whole.class_counts(),
            ir_stratum(ir)
        );
    }
    Ok(())
}
