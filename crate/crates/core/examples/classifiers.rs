//! The five monolithic models on one fold, unscaled and standardised.
//!
//! cargo run --release --example classifiers [-- DATASET]

use std::path::PathBuf;

use scalebench::classifiers::{
    train_gnb, train_knn, train_lda, train_perceptron, train_tree, Classifier, PerceptronParams,
};
use scalebench::harness::scale_fold;
use scalebench::keel::load_fold_pairs;
use scalebench::metrics::{confusion, f1, g_mean};
use scalebench::scaling::ScalerKind;

fn main() -> scalebench::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ecoli1".into());
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/keel").join(&name);
    let folds = load_fold_pairs(&dir, &name)?;

    for kind in [ScalerKind::None, ScalerKind::Standard] {
        let fold = scale_fold(&folds[0], kind)?;
        let (train, test) = (&fold.train, &fold.test);
        let models: Vec<(&str, Box<dyn Classifier>)> = vec![
            ("knn", Box::new(train_knn(train, 5)?)),
            ("gnb", Box::new(train_gnb(train)?)),
            ("percep", Box::new(train_perceptron(train, PerceptronParams::default())?)),
            ("dt", Box::new(train_tree(train)?)),
            ("lda", Box::new(train_lda(train)?)),
        ];
        println!("{name} fold 1, scaler {kind}");
        for (id, m) in models {
            let cm = confusion(&m.predict(&test.features), &test.labels, test.positive_class)?;
            println!("  {id:<7} F1 {:.3}  G-Mean {:.3}", f1(&cm), g_mean(&cm));
        }
    }

    let tree = train_tree(&folds[0].train)?;
    println!("unscaled tree: depth {}, {} leaves", tree.depth(), tree.n_leaves());
    Ok(())
}
