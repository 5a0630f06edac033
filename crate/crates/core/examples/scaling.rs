//! Fit every scaler on one training fold and look at what it does to the
//! matching test fold.
//!
//! cargo run --example scaling [-- DATASET]

use std::path::PathBuf;

use ndarray::Axis;
use scalebench::keel::load_fold_pairs;
use scalebench::scaling::{fit, ScalerKind};

fn main() -> scalebench::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "glass1".into());
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/keel").join(&name);
    let folds = load_fold_pairs(&dir, &name)?;
    let fold = &folds[0];
    let feature = 0;
    println!(
        "{name}: {} train / {} test rows, feature `{}`",
        fold.train.n_instances(),
        fold.test.n_instances(),
        fold.train.feature_names[feature]
    );
    println!("{:<3} {:>10} {:>10} {:>10} {:>10}", "", "train min", "train max", "test min", "test max");

    let kinds = [
        ScalerKind::None,
        ScalerKind::MeanCentering,
        ScalerKind::Standard,
        ScalerKind::Pareto,
        ScalerKind::Vast,
        ScalerKind::MinMax { lower: 0.0, upper: 1.0 },
        ScalerKind::MaxAbs,
        ScalerKind::Robust,
        "QT".parse()?,
    ];
    for kind in kinds {
        // parameters come from the training rows only
        let scaler = fit(kind, &fold.train.features)?;
        let tr = scaler.transform(&fold.train.features)?;
        let te = scaler.transform(&fold.test.features)?;
        let col = |m: &ndarray::Array2<f64>| {
            let c = m.index_axis(Axis(1), feature);
            (c.fold(f64::INFINITY, |a, &b| a.min(b)), c.fold(f64::NEG_INFINITY, |a, &b| a.max(b)))
        };
        let (a, b) = col(&tr);
        let (c, d) = col(&te);
        println!("{:<3} {a:>10.4} {b:>10.4} {c:>10.4} {d:>10.4}", kind.code());
        if let Some((t, s)) = scaler.translation_scale() {
            println!("    T = {:.4}, S = {:.4}", t[feature], s[feature]);
        }
    }
    Ok(())
}
