//! Experiment runner: the dataset × fold × scaler × model grid and its
//! reports.

mod cd;
mod config;
mod reports;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

pub use cd::{cd_cliques, emit_cd_diagram, render_cd_svg};
pub use config::{ExperimentConfig, ModelId};
pub use reports::{
    format_friedman_csv, format_mean_table_csv, format_ranges_csv, format_wins_csv, report_friedman,
    report_mean_table, report_ranges_and_ranks, report_wins, FriedmanRow, MeanRow, Metric, RangeRankRow,
    ScoreTable, StratumFilter, WinsRow,
};

use crate::classifiers::{
    train_gnb, train_knn, train_lda, train_perceptron, train_tree, Classifier, PerceptronParams,
};
use crate::dataset::{imbalance_ratio_from_counts, FoldPair, IrStratum};
use crate::ensembles::{
    train_adaboost, train_bagging, train_random_forest, BaggingParams, DynamicMethod, DynamicSelector, ForestParams,
    Pool,
};
use crate::error::{Error, Result};
use crate::keel::{load_fold_pairs, sort_records, write_results_csv, ResultRecord};
use crate::metrics::{confusion, f1, g_mean};
use crate::scaling::{fit, ScalerKind};

/// Neighbours consulted by the KNN model.
pub const KNN_K: usize = 5;

/// Stable 64-bit seed for one cell: FNV-1a over the inputs, then a
/// splitmix64 finaliser.
pub fn cell_seed(master_seed: u64, dataset: &str, fold: usize, model: ModelId) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&master_seed.to_le_bytes());
    eat(dataset.as_bytes());
    eat(&[0xff]);
    eat(&(fold as u64).to_le_bytes());
    eat(model.seed_key().as_bytes());
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Train and test features of a fold after fitting `scaler` on train only.
pub fn scale_fold(fold: &FoldPair, scaler: ScalerKind) -> Result<FoldPair> {
    if scaler == ScalerKind::None {
        return Ok(fold.clone());
    }
    let fitted = fit(scaler, &fold.train.features)?;
    Ok(FoldPair {
        fold_index: fold.fold_index,
        train: fold.train.with_features(fitted.transform(&fold.train.features)?)?,
        test: fold.test.with_features(fitted.transform(&fold.test.features)?)?,
    })
}

fn train_model(fold: &FoldPair, model: ModelId, seed: u64, pool: Option<&Arc<Pool>>) -> Result<Box<dyn Classifier>> {
    let train = &fold.train;
    let pool = || -> Result<Arc<Pool>> {
        match pool {
            Some(p) => Ok(Arc::clone(p)),
            None => Ok(Arc::new(train_bagging(train, BaggingParams::default(), seed)?)),
        }
    };
    Ok(match model {
        ModelId::Knn => Box::new(train_knn(train, KNN_K.min(train.n_instances()))?),
        ModelId::Gnb => Box::new(train_gnb(train)?),
        ModelId::Percep => Box::new(train_perceptron(
            train,
            PerceptronParams {
                seed,
                ..Default::default()
            },
        )?),
        ModelId::Dt => Box::new(train_tree(train)?),
        ModelId::Lda => Box::new(train_lda(train)?),
        ModelId::Rf => Box::new(train_random_forest(train, ForestParams::default(), seed)?),
        ModelId::AdaBoost => Box::new(train_adaboost(train, 100)?),
        ModelId::Bagging => Box::new(PoolVote(pool()?)),
        ModelId::Ola => Box::new(DynamicSelector::new(pool()?, DynamicMethod::Ola)),
        ModelId::Lca => Box::new(DynamicSelector::new(pool()?, DynamicMethod::Lca)),
        ModelId::Mcb => Box::new(DynamicSelector::new(pool()?, DynamicMethod::Mcb)),
        ModelId::KnoraE => Box::new(DynamicSelector::new(pool()?, DynamicMethod::KnoraE)),
        ModelId::KnoraU => Box::new(DynamicSelector::new(pool()?, DynamicMethod::KnoraU)),
    })
}

struct PoolVote(Arc<Pool>);

impl Classifier for PoolVote {
    fn predict_one(&self, x: &[f64]) -> usize {
        self.0.predict_one(x)
    }
}

fn evaluate(fold: &FoldPair, model: ModelId, scaler: ScalerKind, clf: &dyn Classifier) -> Result<ResultRecord> {
    let preds = clf.predict(&fold.test.features);
    let cm = confusion(&preds, &fold.test.labels, fold.test.positive_class)?;
    Ok(ResultRecord {
        dataset: fold.train.name.clone(),
        fold: fold.fold_index,
        model: model.to_string(),
        scaler: scaler.code().to_string(),
        f1: f1(&cm),
        gmean: g_mean(&cm),
    })
}

fn with_context<'a>(fold: &'a FoldPair, model: &str, scaler: ScalerKind) -> impl Fn(Error) -> Error + 'a {
    let model = model.to_string();
    move |e| Error::Cell {
        dataset: fold.train.name.clone(),
        fold: fold.fold_index,
        model: model.clone(),
        scaler: scaler.code().to_string(),
        source: Box::new(e),
    }
}

/// Test-fold predictions of one model after leakage-safe scaling.
pub fn cell_predictions(fold: &FoldPair, scaler: ScalerKind, model: ModelId, seed: u64) -> Result<Vec<usize>> {
    let ctx = with_context(fold, model.as_str(), scaler);
    let scaled = scale_fold(fold, scaler).map_err(&ctx)?;
    let clf = train_model(&scaled, model, seed, None).map_err(&ctx)?;
    Ok(clf.predict(&scaled.test.features))
}

/// One grid cell: fit the scaler on the training part, train, score the
/// test part. For pool-based models `seed` seeds the Bagging pool.
pub fn run_cell(fold: &FoldPair, scaler: ScalerKind, model: ModelId, seed: u64) -> Result<ResultRecord> {
    let ctx = with_context(fold, model.as_str(), scaler);
    let scaled = scale_fold(fold, scaler).map_err(&ctx)?;
    let clf = train_model(&scaled, model, seed, None).map_err(&ctx)?;
    evaluate(&scaled, model, scaler, clf.as_ref()).map_err(&ctx)
}

/// Every model on one (fold, scaler), sharing a single Bagging pool.
fn run_unit(fold: &FoldPair, scaler: ScalerKind, models: &[ModelId], master_seed: u64) -> Result<Vec<ResultRecord>> {
    let name = &fold.train.name;
    let scaled = scale_fold(fold, scaler).map_err(with_context(fold, "*", scaler))?;
    let pool = if models.iter().any(|m| m.uses_pool()) {
        let seed = cell_seed(master_seed, name, fold.fold_index, ModelId::Bagging);
        let p = train_bagging(&scaled.train, BaggingParams::default(), seed)
            .map_err(with_context(fold, ModelId::Bagging.as_str(), scaler))?;
        Some(Arc::new(p))
    } else {
        None
    };
    models
        .iter()
        .map(|&m| {
            let ctx = with_context(fold, m.as_str(), scaler);
            let seed = cell_seed(master_seed, name, fold.fold_index, m);
            let clf = train_model(&scaled, m, seed, pool.as_ref()).map_err(&ctx)?;
            evaluate(&scaled, m, scaler, clf.as_ref()).map_err(&ctx)
        })
        .collect()
}

/// A loaded dataset with its whole-dataset class balance.
#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub name: String,
    pub folds: Vec<FoldPair>,
    pub class_counts: [usize; 2],
    pub imbalance_ratio: f64,
    pub stratum: IrStratum,
}

/// Sub-directories of `data_dir`, sorted by name.
pub fn discover_datasets(data_dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    let entries = std::fs::read_dir(data_dir).map_err(|e| Error::io(data_dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(data_dir, e))?;
        if entry.path().is_dir() {
            if let Some(n) = entry.file_name().to_str() {
                names.push(n.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

/// Loads the configured datasets (after include/exclude filtering).
pub fn load_datasets(cfg: &ExperimentConfig) -> Result<Vec<DatasetEntry>> {
    let available = discover_datasets(&cfg.data_dir)?;
    let mut names: Vec<String> = if cfg.datasets.is_empty() {
        available
    } else {
        let missing: Vec<&String> = cfg.datasets.iter().filter(|d| !available.contains(d)).collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "datasets not found in {}: {}",
                cfg.data_dir.display(),
                missing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )));
        }
        cfg.datasets.clone()
    };
    names.retain(|n| !cfg.exclude.contains(n));
    names.sort();
    names.dedup();
    if names.is_empty() {
        return Err(Error::Config("no datasets selected".into()));
    }
    names
        .into_par_iter()
        .map(|name| {
            let folds = load_fold_pairs(&cfg.data_dir.join(&name), &name)?;
            let a = folds[0].train.class_counts();
            let b = folds[0].test.class_counts();
            let class_counts = [a[0] + b[0], a[1] + b[1]];
            let imbalance_ratio = imbalance_ratio_from_counts(class_counts[0], class_counts[1])?;
            Ok(DatasetEntry {
                stratum: cfg.strata.classify(imbalance_ratio),
                name,
                folds,
                class_counts,
                imbalance_ratio,
            })
        })
        .collect()
}

/// Records of a finished grid plus the dataset facts the reports need.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    /// Sorted by (dataset, model, scaler, fold).
    pub records: Vec<ResultRecord>,
    /// `(name, IR, stratum)`, sorted by name.
    pub datasets: Vec<(String, f64, IrStratum)>,
}

/// Runs the grid over already loaded datasets on `cfg.jobs` threads.
pub fn run_grid(cfg: &ExperimentConfig, datasets: &[DatasetEntry]) -> Result<ExperimentRun> {
    cfg.validate()?;
    let units: Vec<(&FoldPair, ScalerKind)> = datasets
        .iter()
        .flat_map(|d| d.folds.iter())
        .flat_map(|f| cfg.scalers.iter().map(move |&s| (f, s)))
        .collect();
    let threads = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.jobs)))?;
    let chunks: Vec<Vec<ResultRecord>> = threads.install(|| {
        units
            .par_iter()
            .map(|&(fold, scaler)| run_unit(fold, scaler, &cfg.models, cfg.seed))
            .collect::<Result<_>>()
    })?;
    let mut records: Vec<ResultRecord> = chunks.into_iter().flatten().collect();
    sort_records(&mut records);
    let expected: usize = datasets.iter().map(|d| d.folds.len()).sum::<usize>() * cfg.scalers.len() * cfg.models.len();
    if records.len() != expected {
        return Err(Error::invalid(format!(
            "grid produced {} records, expected {expected}",
            records.len()
        )));
    }
    let mut info: Vec<(String, f64, IrStratum)> = datasets
        .iter()
        .map(|d| (d.name.clone(), d.imbalance_ratio, d.stratum))
        .collect();
    info.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(ExperimentRun {
        config: cfg.clone(),
        records,
        datasets: info,
    })
}

/// Loads the datasets and runs the whole grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    cfg.validate()?;
    let datasets = load_datasets(cfg)?;
    run_grid(cfg, &datasets)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

impl ExperimentRun {
    pub fn score_table(&self) -> Result<ScoreTable> {
        ScoreTable::from_records(&self.records)
    }

    /// Writes `results.csv`, the report tables, CD diagrams and the run
    /// manifest into `dir`. Returns the paths written, in order.
    pub fn write_outputs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        let results = dir.join("results.csv");
        write_results_csv(&self.records, &results)?;
        written.push(results);

        let table = self.score_table()?;
        let strata: Vec<(String, IrStratum)> = self.datasets.iter().map(|(n, _, s)| (n.clone(), *s)).collect();

        let mut put = |name: &str, text: String| -> Result<()> {
            let p = dir.join(name);
            write_text(&p, &text)?;
            written.push(p);
            Ok(())
        };
        put("mean_table.csv", format_mean_table_csv(&report_mean_table(&table)))?;
        let mut friedman = Vec::new();
        for filter in StratumFilter::ALL {
            friedman.extend(report_friedman(&table, &strata, filter));
        }
        put("friedman.csv", format_friedman_csv(&friedman))?;
        put("wins.csv", format_wins_csv(&table.scalers, &report_wins(&table, &strata)))?;
        put("ranges_ranks.csv", format_ranges_csv(&report_ranges_and_ranks(&table)))?;
        let mut ir = String::from("dataset,imbalance_ratio,stratum\n");
        for (n, r, s) in &self.datasets {
            ir.push_str(&format!("{n},{r:.2},{s}\n"));
        }
        put("datasets.csv", ir)?;

        let k = table.scalers.len();
        let n = table.datasets.len();
        if (2..=10).contains(&k) && n >= 2 {
            let cd = crate::stats::nemenyi_cd(k, n, 0.05)?;
            for model in &table.models {
                for metric in Metric::ALL {
                    let ranks = table.scaler_average_ranks(model, metric);
                    put(
                        &format!("cd_{}_{}.svg", model, metric.as_str()),
                        render_cd_svg(&table.scalers, &ranks, cd, &format!("{model} {}", metric.label())),
                    )?;
                }
            }
        }
        put("manifest.txt", self.manifest())?;
        Ok(written)
    }

    /// Text record of what produced the outputs.
    pub fn manifest(&self) -> String {
        let v = env!("CARGO_PKG_VERSION");
        let mut m = String::new();
        m.push_str(&format!("package = {} {v}\n", env!("CARGO_PKG_NAME")));
        for module in ["dataset", "keel", "scaling", "classifiers", "ensembles", "metrics", "stats", "harness"] {
            m.push_str(&format!("module.{module} = {v}\n"));
        }
        m.push_str("aggregation = mean over folds per dataset, then mean over datasets\n");
        m.push_str("folds = 5\n");
        m.push_str(&format!("records = {}\n", self.records.len()));
        m.push_str(&format!(
            "datasets.resolved = {}\n",
            self.datasets.iter().map(|d| d.0.as_str()).collect::<Vec<_>>().join(",")
        ));
        // jobs does not change any output, so it is left out to keep the manifest byte-stable
        for line in self.config.to_kv_string().lines() {
            if !line.starts_with("jobs ") {
                m.push_str("config.");
                m.push_str(line);
                m.push('\n');
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{stratified_folds, Dataset};
    use ndarray::Array2;

    fn toy(name: &str, n: usize, seed: u64) -> Vec<FoldPair> {
        let flat: Vec<f64> = (0..n * 3)
            .map(|i| ((i as u64 * 2654435761 + seed) % 1000) as f64 / 100.0)
            .collect();
        let labels: Vec<usize> = (0..n).map(|i| usize::from(i % 4 == 0)).collect();
        let mut d = Dataset::new(
            name,
            Array2::from_shape_vec((n, 3), flat).unwrap(),
            labels,
            1,
            ["neg".into(), "pos".into()],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        d.name = name.into();
        stratified_folds(&d, 5, seed).unwrap()
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a = cell_seed(1, "glass1", 1, ModelId::Rf);
        assert_eq!(a, cell_seed(1, "glass1", 1, ModelId::Rf));
        assert_ne!(a, cell_seed(2, "glass1", 1, ModelId::Rf));
        assert_ne!(a, cell_seed(1, "glass0", 1, ModelId::Rf));
        assert_ne!(a, cell_seed(1, "glass1", 2, ModelId::Rf));
        assert_ne!(a, cell_seed(1, "glass1", 1, ModelId::Percep));
        assert_eq!(cell_seed(1, "x", 1, ModelId::Ola), cell_seed(1, "x", 1, ModelId::Bagging));
    }

    #[test]
    fn tree_ignores_standard_scaling() {
        let folds = toy("t", 60, 3);
        for f in &folds {
            let ns = cell_predictions(f, ScalerKind::None, ModelId::Dt, 0).unwrap();
            let ss = cell_predictions(f, ScalerKind::Standard, ModelId::Dt, 0).unwrap();
            assert_eq!(ns, ss);
        }
    }

    #[test]
    fn cells_are_deterministic() {
        let folds = toy("t", 50, 9);
        for m in [ModelId::Percep, ModelId::Rf, ModelId::KnoraU] {
            let a = run_cell(&folds[0], ScalerKind::Standard, m, 17).unwrap();
            let b = run_cell(&folds[0], ScalerKind::Standard, m, 17).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unit_matches_single_cells() {
        let folds = toy("t", 50, 2);
        let models = [ModelId::Percep, ModelId::Bagging, ModelId::Ola, ModelId::Dt];
        let unit = run_unit(&folds[1], ScalerKind::MaxAbs, &models, 5).unwrap();
        for (m, r) in models.iter().zip(&unit) {
            let seed = cell_seed(5, "t", folds[1].fold_index, *m);
            assert_eq!(&run_cell(&folds[1], ScalerKind::MaxAbs, *m, seed).unwrap(), r);
        }
    }

    #[test]
    fn perfect_predictions_score_one() {
        // one feature equal to the label
        let n = 40;
        let labels: Vec<usize> = (0..n).map(|i| usize::from(i % 3 == 0)).collect();
        let flat: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let d = Dataset::new(
            "p",
            Array2::from_shape_vec((n, 1), flat).unwrap(),
            labels,
            1,
            ["a".into(), "b".into()],
            vec!["x".into()],
        )
        .unwrap();
        let folds = stratified_folds(&d, 5, 0).unwrap();
        let r = run_cell(&folds[0], ScalerKind::None, ModelId::Dt, 0).unwrap();
        assert_eq!((r.f1, r.gmean), (1.0, 1.0));
    }

    #[test]
    fn training_errors_carry_cell_context() {
        // LDA needs two rows per class in the training part
        let labels = vec![0, 0, 0, 0, 0, 1];
        let d = Dataset::new(
            "tiny",
            Array2::from_shape_vec((6, 1), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(),
            labels.clone(),
            1,
            ["a".into(), "b".into()],
            vec!["x".into()],
        )
        .unwrap();
        let fold = FoldPair {
            fold_index: 2,
            train: d.clone(),
            test: d,
        };
        let err = run_cell(&fold, ScalerKind::Standard, ModelId::Lda, 0).unwrap_err();
        match err {
            Error::Cell {
                dataset, fold, model, scaler, ..
            } => {
                assert_eq!((dataset.as_str(), fold, model.as_str(), scaler.as_str()), ("tiny", 2, "lda", "SS"));
            }
            other => panic!("{other}"),
        }
    }
}
