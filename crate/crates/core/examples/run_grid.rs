//! A small grid through the library API, then the reports.
//!
//! cargo run --release --example run_grid [-- OUT_DIR]

use std::path::PathBuf;

use scalebench::harness::{
    load_datasets, report_friedman, report_ranges_and_ranks, run_grid, ExperimentConfig, Metric, StratumFilter,
};

fn main() -> scalebench::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut cfg = ExperimentConfig::from_kv_str(
        "# any key of the config file works here
         datasets = glass1, pima, ecoli2, glass6, glass4, abalone9-18
         models = knn, percep, dt, rf
         seed = 7",
    )?;
    cfg.data_dir = root.join("data/keel");
    cfg.out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("scalebench-example"));

    let datasets = load_datasets(&cfg)?;
    for d in &datasets {
        println!("{:<12} IR {:>6.2} {}", d.name, d.imbalance_ratio, d.stratum);
    }
    let run = run_grid(&cfg, &datasets)?;
    println!("{} records", run.records.len());

    let table = run.score_table()?;
    for r in report_ranges_and_ranks(&table).iter().filter(|r| r.metric == Metric::F1) {
        println!("{:<7} F1 range {:.4}, average rank {:.2}", r.model, r.mean_range, r.average_rank);
    }
    let strata: Vec<_> = run.datasets.iter().map(|(n, _, s)| (n.clone(), *s)).collect();
    for r in report_friedman(&table, &strata, StratumFilter::All) {
        if let Some(t) = r.result {
            println!("{:<7} {:<6} p = {:.4}", r.model, r.metric.as_str(), t.p_value);
        }
    }
    for p in run.write_outputs(&cfg.out_dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
