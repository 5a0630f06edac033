//! Confusion matrix and the imbalance-aware scores.
//!
//! cargo run --example metrics

use scalebench::metrics::{confusion, f1, f_beta, g_mean, precision, recall, specificity, ConfusionMatrix};

fn main() -> scalebench::Result<()> {
    // 10 positives (class 1), 90 negatives
    let labels: Vec<usize> = (0..100).map(|i| usize::from(i < 10)).collect();
    let always_negative = vec![0; 100];
    let half_right: Vec<usize> = (0..100).map(|i| usize::from(i < 5 || (10..15).contains(&i))).collect();

    for (name, pred) in [("always negative", &always_negative), ("half right", &half_right)] {
        let cm = confusion(pred, &labels, 1)?;
        let acc = (cm.tp + cm.tn) as f64 / cm.total() as f64;
        println!("{name}: {cm:?}");
        println!(
            "  accuracy {acc:.2}  precision {:.3}  recall {:.3}  specificity {:.3}",
            precision(&cm),
            recall(&cm),
            specificity(&cm)
        );
        println!("  F1 {:.4}  F2 {:.4}  G-Mean {:.4}", f1(&cm), f_beta(&cm, 2.0)?, g_mean(&cm));
    }

    let cm = ConfusionMatrix::new(8, 2, 2, 88);
    println!("tp 8 fp 2 fn 2 tn 88: F1 {:.4}, G-Mean {:.4}", f1(&cm), g_mean(&cm));
    Ok(())
}
