//! Static ensembles and the dynamic selection methods sharing one pool.
//!
//! cargo run --release --example ensembles [-- DATASET]

use std::path::PathBuf;
use std::sync::Arc;

use scalebench::classifiers::Classifier;
use scalebench::ensembles::{
    knora_e_selection, region_of_competence, train_adaboost, train_bagging, train_random_forest, BaggingParams,
    DynamicMethod, DynamicSelector, ForestParams,
};
use scalebench::harness::scale_fold;
use scalebench::keel::load_fold_pairs;
use scalebench::metrics::{confusion, f1, g_mean};
use scalebench::scaling::ScalerKind;

fn report(id: &str, m: &dyn Classifier, test: &scalebench::dataset::Dataset) -> scalebench::Result<()> {
    let cm = confusion(&m.predict(&test.features), &test.labels, test.positive_class)?;
    println!("  {id:<8} F1 {:.3}  G-Mean {:.3}", f1(&cm), g_mean(&cm));
    Ok(())
}

fn main() -> scalebench::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "glass6".into());
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/keel").join(&name);
    let fold = scale_fold(&load_fold_pairs(&dir, &name)?[0], ScalerKind::Standard)?;
    let (train, test) = (&fold.train, &fold.test);
    println!("{name} fold 1 (SS)");

    let pool = Arc::new(train_bagging(train, BaggingParams::default(), 7)?);
    report("bagging", pool.as_ref(), test)?;
    report("rf", &train_random_forest(train, ForestParams::default(), 7)?, test)?;
    report("adaboost", &train_adaboost(train, 100)?, test)?;
    for method in DynamicMethod::ALL {
        let sel = DynamicSelector::new(Arc::clone(&pool), method);
        report(&format!("{method:?}").to_lowercase(), &sel, test)?;
    }

    // a look inside one query
    let x = test.row(0);
    let roc = region_of_competence(&pool, x);
    let oracles = knora_e_selection(&roc);
    println!(
        "query 0: RoC labels {:?}, {} of {} perceptrons selected by KNORA-E",
        roc.labels,
        oracles.len(),
        pool.len()
    );
    Ok(())
}
