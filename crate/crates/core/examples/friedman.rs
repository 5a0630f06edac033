//! Rank statistics on a small datasets × scalers score matrix.
//!
//! cargo run --example friedman

use scalebench::stats::{
    average_ranks, best_worst_range, chi2_sf, fractional_wins, friedman, nemenyi_cd, row_ranks, ScoreMatrix,
};

fn main() -> scalebench::Result<()> {
    let scalers: Vec<String> = ["NS", "SS", "MM", "MA", "RS", "QT"].map(String::from).to_vec();
    let rows = vec![
        vec![0.41, 0.62, 0.58, 0.57, 0.63, 0.60],
        vec![0.55, 0.71, 0.70, 0.70, 0.69, 0.72],
        vec![0.30, 0.52, 0.49, 0.47, 0.52, 0.50],
        vec![0.62, 0.66, 0.61, 0.64, 0.68, 0.67],
        vec![0.48, 0.59, 0.60, 0.55, 0.61, 0.58],
        vec![0.20, 0.44, 0.41, 0.40, 0.45, 0.47],
        vec![0.71, 0.74, 0.74, 0.72, 0.73, 0.75],
        vec![0.35, 0.50, 0.46, 0.48, 0.49, 0.51],
    ];
    let names: Vec<String> = (1..=rows.len()).map(|i| format!("d{i}")).collect();
    let m = ScoreMatrix::new(names, scalers.clone(), rows)?;

    println!("ranks of d2 (tie between MM and MA): {:?}", row_ranks(&m.rows()[1], true));
    let ranks = average_ranks(&m);
    let wins = fractional_wins(&m);
    for ((s, r), w) in scalers.iter().zip(&ranks).zip(&wins) {
        println!("  {s}: average rank {r:.3}, wins {w}");
    }
    let fr = friedman(&m);
    println!(
        "Friedman chi2 = {:.4}, df = {}, p = {:.5}, reject = {}",
        fr.statistic, fr.degrees_of_freedom, fr.p_value, fr.reject_at_0_05
    );
    let cd = nemenyi_cd(m.n_cols(), m.n_rows(), 0.05)?;
    println!("Nemenyi CD (k = 6, N = 8) = {cd:.4}");
    let r = best_worst_range(&m);
    println!("best minus worst per dataset {:?}, mean {:.4}", r.per_row, r.mean);
    println!("chi2_sf(11.07, 5) = {:.4}", chi2_sf(11.07, 5));
    Ok(())
}
