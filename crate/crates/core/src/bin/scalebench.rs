use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use scalebench::harness::{run_experiment, ExperimentConfig};

/// Run the scaler × model grid over KEEL fold files and write the reports.
#[derive(Debug, Parser)]
#[command(name = "scalebench", version)]
struct Cli {
    /// Flat `key = value` config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory with one sub-directory of fold files per dataset.
    #[arg(long)]
    data_dir: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    /// Comma-separated model ids (knn,gnb,percep,dt,lda,bagging,rf,adaboost,ola,lca,mcb,knorae,knorau).
    #[arg(long)]
    models: Option<String>,
    /// Comma-separated scaler codes (NS,SS,MM,MA,RS,QT,MC,PS,VS).
    #[arg(long)]
    scalers: Option<String>,
    /// Comma-separated dataset names; default is every dataset in --data-dir.
    #[arg(long)]
    datasets: Option<String>,
    /// Comma-separated dataset names to skip.
    #[arg(long)]
    exclude: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<String>,
    /// IR stratum bounds `low_max,medium_max`.
    #[arg(long)]
    strata: Option<String>,
}

fn run(cli: Cli) -> scalebench::Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let flags = [
        ("data_dir", &cli.data_dir),
        ("out_dir", &cli.out_dir),
        ("models", &cli.models),
        ("scalers", &cli.scalers),
        ("datasets", &cli.datasets),
        ("exclude", &cli.exclude),
        ("seed", &cli.seed),
        ("jobs", &cli.jobs),
        ("strata", &cli.strata),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    let started = std::time::Instant::now();
    let run = run_experiment(&cfg)?;
    let written = run.write_outputs(&cfg.out_dir)?;
    eprintln!(
        "{} records from {} datasets in {:.1}s",
        run.records.len(),
        run.datasets.len(),
        started.elapsed().as_secs_f64()
    );
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
