//! Aggregate tables over a finished grid. Every report works on per-dataset
//! fold means.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::config::ModelId;
use crate::dataset::IrStratum;
use crate::error::{Error, Result};
use crate::keel::ResultRecord;
use crate::stats::{friedman, row_ranks, row_wins, FriedmanResult, ScoreMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    F1,
    GMean,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::F1, Metric::GMean];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::F1 => "f1",
            Metric::GMean => "gmean",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::F1 => "F1",
            Metric::GMean => "G-Mean",
        }
    }

    fn index(self) -> usize {
        match self {
            Metric::F1 => 0,
            Metric::GMean => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StratumFilter {
    All,
    Only(IrStratum),
}

impl StratumFilter {
    pub const ALL: [StratumFilter; 4] = [
        StratumFilter::All,
        StratumFilter::Only(IrStratum::Low),
        StratumFilter::Only(IrStratum::Medium),
        StratumFilter::Only(IrStratum::High),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StratumFilter::All => "all",
            StratumFilter::Only(s) => s.as_str(),
        }
    }

    fn admits(self, s: Option<IrStratum>) -> bool {
        match self {
            StratumFilter::All => true,
            StratumFilter::Only(want) => s == Some(want),
        }
    }
}

const SCALER_ORDER: [&str; 9] = ["NS", "SS", "MM", "MA", "RS", "QT", "MC", "PS", "VS"];

fn model_rank(m: &str) -> (usize, String) {
    let pos = m
        .parse::<ModelId>()
        .ok()
        .and_then(|id| ModelId::ALL.iter().position(|&x| x == id))
        .unwrap_or(usize::MAX);
    (pos, m.to_string())
}

fn scaler_rank(s: &str) -> (usize, String) {
    (SCALER_ORDER.iter().position(|&x| x == s).unwrap_or(usize::MAX), s.to_string())
}

/// Fold-mean scores indexed by dataset, model and scaler.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    /// Sorted by name.
    pub datasets: Vec<String>,
    /// Grid order (knn, gnb, ... knorau), unknown names last.
    pub models: Vec<String>,
    /// NS, SS, MM, MA, RS, QT, ..., unknown codes last.
    pub scalers: Vec<String>,
    pub n_folds: usize,
    values: Vec<[f64; 2]>,
}

impl ScoreTable {
    /// Averages folds per (dataset, model, scaler). The records must cover
    /// the full product of the datasets, models, scalers and folds they
    /// mention; otherwise the missing keys are reported.
    pub fn from_records(records: &[ResultRecord]) -> Result<ScoreTable> {
        if records.is_empty() {
            return Err(Error::invalid("no records to aggregate"));
        }
        let datasets: Vec<String> = records.iter().map(|r| r.dataset.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let mut models: Vec<String> = records.iter().map(|r| r.model.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        models.sort_by_key(|m| model_rank(m));
        let mut scalers: Vec<String> = records.iter().map(|r| r.scaler.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        scalers.sort_by_key(|s| scaler_rank(s));
        let folds: BTreeSet<usize> = records.iter().map(|r| r.fold).collect();

        let mut seen: BTreeMap<(&str, &str, &str, usize), &ResultRecord> = BTreeMap::new();
        for r in records {
            let key = (r.dataset.as_str(), r.model.as_str(), r.scaler.as_str(), r.fold);
            if seen.insert(key, r).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate record {}/{}/{}/fold {}",
                    r.dataset, r.model, r.scaler, r.fold
                )));
            }
        }
        let mut missing = Vec::new();
        let mut values = Vec::with_capacity(datasets.len() * models.len() * scalers.len());
        for d in &datasets {
            for m in &models {
                for s in &scalers {
                    let mut sum = [0.0; 2];
                    for &f in &folds {
                        match seen.get(&(d.as_str(), m.as_str(), s.as_str(), f)) {
                            Some(r) => {
                                sum[0] += r.f1;
                                sum[1] += r.gmean;
                            }
                            None => missing.push(format!("{d}/{m}/{s}/fold {f}")),
                        }
                    }
                    let n = folds.len() as f64;
                    values.push([sum[0] / n, sum[1] / n]);
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::MissingCells { keys: missing });
        }
        Ok(ScoreTable {
            datasets,
            models,
            scalers,
            n_folds: folds.len(),
            values,
        })
    }

    fn idx(&self, d: usize, m: usize, s: usize) -> usize {
        (d * self.models.len() + m) * self.scalers.len() + s
    }

    /// Fold mean for `(dataset, model, scaler)` by position.
    pub fn get(&self, d: usize, m: usize, s: usize, metric: Metric) -> f64 {
        self.values[self.idx(d, m, s)][metric.index()]
    }

    /// Scores of one model on one dataset, in scaler order.
    pub fn scaler_row(&self, d: usize, m: usize, metric: Metric) -> Vec<f64> {
        (0..self.scalers.len()).map(|s| self.get(d, m, s, metric)).collect()
    }

    pub fn model_index(&self, model: &str) -> Option<usize> {
        self.models.iter().position(|m| m == model)
    }

    pub fn dataset_index(&self, dataset: &str) -> Option<usize> {
        self.datasets.iter().position(|d| d == dataset)
    }

    /// Average rank of each scaler for one model over all datasets
    /// (1 = best).
    pub fn scaler_average_ranks(&self, model: &str, metric: Metric) -> Vec<f64> {
        let m = self.model_index(model).expect("model present in table");
        let mut sums = vec![0.0; self.scalers.len()];
        for d in 0..self.datasets.len() {
            for (acc, r) in sums.iter_mut().zip(row_ranks(&self.scaler_row(d, m, metric), true)) {
                *acc += r;
            }
        }
        sums.iter().map(|s| s / self.datasets.len() as f64).collect()
    }

    fn datasets_in(&self, strata: &[(String, IrStratum)], filter: StratumFilter) -> Vec<usize> {
        (0..self.datasets.len())
            .filter(|&d| {
                let s = strata.iter().find(|(n, _)| *n == self.datasets[d]).map(|(_, s)| *s);
                filter.admits(s)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanRow {
    pub model: String,
    pub scaler: String,
    pub f1: f64,
    pub gmean: f64,
    pub best_f1: bool,
    pub best_gmean: bool,
}

/// Mean over datasets per (model, scaler); the first best scaler per model
/// and metric is flagged.
pub fn report_mean_table(table: &ScoreTable) -> Vec<MeanRow> {
    let nd = table.datasets.len() as f64;
    let mut rows = Vec::new();
    for (m, model) in table.models.iter().enumerate() {
        let means: Vec<[f64; 2]> = (0..table.scalers.len())
            .map(|s| {
                let mut acc = [0.0; 2];
                for d in 0..table.datasets.len() {
                    acc[0] += table.get(d, m, s, Metric::F1);
                    acc[1] += table.get(d, m, s, Metric::GMean);
                }
                [acc[0] / nd, acc[1] / nd]
            })
            .collect();
        let best = |k: usize| {
            let mut b = 0;
            for s in 0..means.len() {
                if means[s][k] > means[b][k] {
                    b = s;
                }
            }
            b
        };
        let (bf, bg) = (best(0), best(1));
        for (s, scaler) in table.scalers.iter().enumerate() {
            rows.push(MeanRow {
                model: model.clone(),
                scaler: scaler.clone(),
                f1: means[s][0],
                gmean: means[s][1],
                best_f1: s == bf,
                best_gmean: s == bg,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanRow {
    pub stratum: StratumFilter,
    pub model: String,
    pub metric: Metric,
    pub n_datasets: usize,
    /// `None` when fewer than two datasets (or scalers) are available.
    pub result: Option<FriedmanResult>,
}

/// Friedman test over scalers for every (model, metric), restricted to the
/// datasets admitted by `filter`.
pub fn report_friedman(table: &ScoreTable, strata: &[(String, IrStratum)], filter: StratumFilter) -> Vec<FriedmanRow> {
    let ds = table.datasets_in(strata, filter);
    let mut rows = Vec::new();
    for (m, model) in table.models.iter().enumerate() {
        for metric in Metric::ALL {
            let values: Vec<Vec<f64>> = ds.iter().map(|&d| table.scaler_row(d, m, metric)).collect();
            let result = ScoreMatrix::new(
                ds.iter().map(|&d| table.datasets[d].clone()).collect(),
                table.scalers.clone(),
                values,
            )
            .ok()
            .map(|sm| friedman(&sm));
            rows.push(FriedmanRow {
                stratum: filter,
                model: model.clone(),
                metric,
                n_datasets: ds.len(),
                result,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct WinsRow {
    pub metric: Metric,
    pub stratum: StratumFilter,
    pub n_datasets: usize,
    /// Per scaler, in table order.
    pub wins: Vec<f64>,
}

/// Fractional wins of each scaler per (metric, stratum), summed over
/// models: every (dataset, model) pair hands out one win.
pub fn report_wins(table: &ScoreTable, strata: &[(String, IrStratum)]) -> Vec<WinsRow> {
    let mut rows = Vec::new();
    for metric in Metric::ALL {
        for filter in StratumFilter::ALL {
            let ds = table.datasets_in(strata, filter);
            let mut wins = vec![0.0; table.scalers.len()];
            for &d in &ds {
                for m in 0..table.models.len() {
                    for (w, x) in wins.iter_mut().zip(row_wins(&table.scaler_row(d, m, metric))) {
                        *w += x;
                    }
                }
            }
            rows.push(WinsRow {
                metric,
                stratum: filter,
                n_datasets: ds.len(),
                wins,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeRankRow {
    pub model: String,
    pub metric: Metric,
    /// Mean over datasets of best minus worst scaler score.
    pub mean_range: f64,
    /// Mean rank among models, each scored by its best scaler (1 = best).
    pub average_rank: f64,
}

pub fn report_ranges_and_ranks(table: &ScoreTable) -> Vec<RangeRankRow> {
    let nd = table.datasets.len();
    let nm = table.models.len();
    let mut rows = Vec::new();
    for metric in Metric::ALL {
        let mut range_sum = vec![0.0; nm];
        let mut rank_sum = vec![0.0; nm];
        for d in 0..nd {
            let mut best = Vec::with_capacity(nm);
            for m in 0..nm {
                let row = table.scaler_row(d, m, metric);
                let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
                range_sum[m] += hi - lo;
                best.push(hi);
            }
            for (acc, r) in rank_sum.iter_mut().zip(row_ranks(&best, true)) {
                *acc += r;
            }
        }
        for m in 0..nm {
            rows.push(RangeRankRow {
                model: table.models[m].clone(),
                metric,
                mean_range: range_sum[m] / nd as f64,
                average_rank: rank_sum[m] / nd as f64,
            });
        }
    }
    rows
}

pub fn format_mean_table_csv(rows: &[MeanRow]) -> String {
    let mut out = String::from("model,scaler,f1,gmean,best_f1,best_gmean\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{},{}",
            r.model,
            r.scaler,
            r.f1,
            r.gmean,
            u8::from(r.best_f1),
            u8::from(r.best_gmean)
        );
    }
    out
}

pub fn format_friedman_csv(rows: &[FriedmanRow]) -> String {
    let mut out = String::from("stratum,model,metric,n_datasets,status,statistic,df,p_value,reject_0_05\n");
    for r in rows {
        let head = format!("{},{},{},{}", r.stratum.as_str(), r.model, r.metric.as_str(), r.n_datasets);
        match &r.result {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "{head},ok,{:.6},{},{:.6},{}",
                    f.statistic,
                    f.degrees_of_freedom,
                    f.p_value,
                    u8::from(f.reject_at_0_05)
                );
            }
            None => {
                let _ = writeln!(out, "{head},insufficient data,,,,");
            }
        }
    }
    out
}

pub fn format_wins_csv(scalers: &[String], rows: &[WinsRow]) -> String {
    let mut out = format!("metric,stratum,n_datasets,{},total\n", scalers.join(","));
    for r in rows {
        let cells: Vec<String> = r.wins.iter().map(|w| format!("{w:.6}")).collect();
        let total: f64 = r.wins.iter().sum();
        let _ = writeln!(
            out,
            "{},{},{},{},{total:.6}",
            r.metric.as_str(),
            r.stratum.as_str(),
            r.n_datasets,
            cells.join(",")
        );
    }
    out
}

pub fn format_ranges_csv(rows: &[RangeRankRow]) -> String {
    let mut out = String::from("model,metric,mean_range,average_rank\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.6},{:.6}", r.model, r.metric.as_str(), r.mean_range, r.average_rank);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(d: &str, fold: usize, m: &str, s: &str, f1: f64, g: f64) -> ResultRecord {
        ResultRecord {
            dataset: d.into(),
            fold,
            model: m.into(),
            scaler: s.into(),
            f1,
            gmean: g,
        }
    }

    /// One fold per cell; `scores[d][m][s]` used for both metrics.
    fn table(scores: &[&[&[f64]]], models: &[&str], scalers: &[&str]) -> ScoreTable {
        let mut rs = Vec::new();
        for (d, per_model) in scores.iter().enumerate() {
            for (m, per_scaler) in per_model.iter().enumerate() {
                for (s, &v) in per_scaler.iter().enumerate() {
                    rs.push(rec(&format!("d{d}"), 1, models[m], scalers[s], v, v));
                }
            }
        }
        ScoreTable::from_records(&rs).unwrap()
    }

    #[test]
    fn single_fold_table_is_raw() {
        let t = table(&[&[&[0.3, 0.7]]], &["dt"], &["NS", "SS"]);
        let rows = report_mean_table(&t);
        assert_eq!(rows[0].f1, 0.3);
        assert_eq!(rows[1].f1, 0.7);
        assert!(rows[1].best_f1 && !rows[0].best_f1);
    }

    #[test]
    fn means_over_datasets_and_folds() {
        let rs = vec![
            rec("a", 1, "dt", "NS", 0.2, 0.0),
            rec("a", 2, "dt", "NS", 0.6, 0.0),
            rec("b", 1, "dt", "NS", 0.6, 1.0),
            rec("b", 2, "dt", "NS", 0.6, 1.0),
        ];
        let t = ScoreTable::from_records(&rs).unwrap();
        assert_eq!(t.get(0, 0, 0, Metric::F1), 0.4);
        let rows = report_mean_table(&t);
        assert!((rows[0].f1 - 0.5).abs() < 1e-15);
        assert_eq!(rows[0].gmean, 0.5);
    }

    #[test]
    fn missing_cells_are_listed() {
        let rs = vec![
            rec("a", 1, "dt", "NS", 0.2, 0.0),
            rec("a", 1, "dt", "SS", 0.2, 0.0),
            rec("b", 1, "dt", "NS", 0.6, 1.0),
        ];
        match ScoreTable::from_records(&rs).unwrap_err() {
            Error::MissingCells { keys } => assert_eq!(keys, vec!["b/dt/SS/fold 1"]),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn canonical_orders() {
        let t = table(&[&[&[0.1, 0.2, 0.3], &[0.1, 0.2, 0.3]]], &["percep", "knn"], &["QT", "NS", "MA"]);
        assert_eq!(t.models, vec!["knn", "percep"]);
        assert_eq!(t.scalers, vec!["NS", "MA", "QT"]);
    }

    #[test]
    fn friedman_per_stratum() {
        let strata = vec![
            ("d0".to_string(), IrStratum::Low),
            ("d1".to_string(), IrStratum::Low),
            ("d2".to_string(), IrStratum::High),
        ];
        let t = table(
            &[&[&[0.5, 0.5, 0.5]], &[&[0.4, 0.4, 0.4]], &[&[0.1, 0.1, 0.1]]],
            &["dt"],
            &["NS", "SS", "RS"],
        );
        let all = report_friedman(&t, &strata, StratumFilter::All);
        let f = all[0].result.unwrap();
        assert_eq!((f.statistic, f.p_value, f.reject_at_0_05), (0.0, 1.0, false));
        let high = report_friedman(&t, &strata, StratumFilter::Only(IrStratum::High));
        assert_eq!(high[0].n_datasets, 1);
        assert!(high[0].result.is_none());
        let med = report_friedman(&t, &strata, StratumFilter::Only(IrStratum::Medium));
        assert_eq!(med[0].n_datasets, 0);
        assert!(format_friedman_csv(&med).contains("insufficient data"));
    }

    #[test]
    fn dominant_scaler_is_rejected() {
        let rows: Vec<Vec<f64>> = (0..12).map(|d| vec![0.1 + d as f64 * 0.01, 0.5, 0.3]).collect();
        let refs: Vec<Vec<&[f64]>> = rows.iter().map(|r| vec![r.as_slice()]).collect();
        let nested: Vec<&[&[f64]]> = refs.iter().map(|v| v.as_slice()).collect();
        let t = table(&nested, &["percep"], &["NS", "SS", "RS"]);
        let strata: Vec<(String, IrStratum)> = t.datasets.iter().map(|d| (d.clone(), IrStratum::Low)).collect();
        let f = report_friedman(&t, &strata, StratumFilter::All)[0].result.unwrap();
        // ranks (3, 1, 2) on every row: 12/(12·3·4)·(36² + 12² + 24²) − 3·12·4 = 24
        assert!((f.statistic - 24.0).abs() < 1e-9);
        assert!(f.p_value < 0.05 && f.reject_at_0_05);
    }

    #[test]
    fn wins_examples() {
        let strata = vec![("d0".to_string(), IrStratum::Low)];
        let t = table(&[&[&[0.2, 0.9, 0.1]]], &["dt"], &["NS", "SS", "MM"]);
        let w = report_wins(&t, &strata);
        assert_eq!(w[0].wins, vec![0.0, 1.0, 0.0]);
        let t = table(&[&[&[0.5, 0.5, 0.5]]], &["dt"], &["NS", "SS", "MM"]);
        let w = report_wins(&t, &strata);
        assert_eq!(w[0].wins, vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn wins_are_conserved() {
        let strata = vec![
            ("d0".to_string(), IrStratum::Low),
            ("d1".to_string(), IrStratum::High),
            ("d2".to_string(), IrStratum::High),
        ];
        let t = table(
            &[
                &[&[0.1, 0.2, 0.2], &[0.3, 0.3, 0.3]],
                &[&[0.9, 0.2, 0.1], &[0.0, 0.5, 0.5]],
                &[&[0.4, 0.4, 0.6], &[0.7, 0.1, 0.7]],
            ],
            &["dt", "knn"],
            &["NS", "SS", "MM"],
        );
        for row in report_wins(&t, &strata) {
            let total: f64 = row.wins.iter().sum();
            assert!((total - (row.n_datasets * 2) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn ranges_and_ranks_fixture() {
        // models a, b, c over two datasets and scalers (NS, SS)
        // d0: a (0.9, 0.5) b (0.6, 0.6) c (0.2, 0.8)
        // d1: a (0.4, 0.7) b (0.7, 0.1) c (0.3, 0.3)
        let t = table(
            &[&[&[0.9, 0.5], &[0.6, 0.6], &[0.2, 0.8]], &[&[0.4, 0.7], &[0.7, 0.1], &[0.3, 0.3]]],
            &["a", "b", "c"],
            &["NS", "SS"],
        );
        let rows = report_ranges_and_ranks(&t);
        let get = |m: &str| rows.iter().find(|r| r.model == m && r.metric == Metric::F1).unwrap();
        // ranges: a (0.4 + 0.3)/2, b (0 + 0.6)/2, c (0.6 + 0)/2
        assert!((get("a").mean_range - 0.35).abs() < 1e-12);
        assert!((get("b").mean_range - 0.3).abs() < 1e-12);
        assert!((get("c").mean_range - 0.3).abs() < 1e-12);
        // best scores d0 (0.9, 0.6, 0.8) → ranks (1, 3, 2); d1 (0.7, 0.7, 0.3) → (1.5, 1.5, 3)
        assert_eq!(get("a").average_rank, 1.25);
        assert_eq!(get("b").average_rank, 2.25);
        assert_eq!(get("c").average_rank, 2.5);
    }

    #[test]
    fn invariant_model_has_zero_range_and_dominant_model_rank_one() {
        let t = table(
            &[&[&[0.5, 0.5], &[0.9, 0.8]], &[&[0.2, 0.2], &[0.3, 0.6]]],
            &["dt", "rf"],
            &["NS", "SS"],
        );
        let rows = report_ranges_and_ranks(&t);
        let dt = rows.iter().find(|r| r.model == "dt" && r.metric == Metric::F1).unwrap();
        let rf = rows.iter().find(|r| r.model == "rf" && r.metric == Metric::F1).unwrap();
        assert_eq!(dt.mean_range, 0.0);
        assert_eq!((rf.average_rank, dt.average_rank), (1.0, 2.0));
    }
}
