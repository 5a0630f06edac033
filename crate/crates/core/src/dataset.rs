//! In-memory datasets: raw attribute tables, categorical encoding, class
//! imbalance and stratified fold construction.

use std::collections::BTreeSet;
use std::fmt;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    Numeric,
    Categorical(Vec<String>),
    /// The output attribute; holds the declared class names.
    Class(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
}

impl Cell {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Number(_) => None,
        }
    }
}

/// A parsed attribute table prior to encoding. Exactly one column is the
/// class column.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub relation: String,
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<Vec<Cell>>,
}

impl RawTable {
    pub fn class_column(&self) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| matches!(c.kind, ColumnKind::Class(_)))
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Class name per row, as stored (no cleaning applied).
    pub fn class_values(&self) -> Vec<String> {
        let Some(ci) = self.class_column() else {
            return Vec::new();
        };
        self.rows
            .iter()
            .map(|r| match &r[ci] {
                Cell::Text(s) => s.clone(),
                Cell::Number(v) => v.to_string(),
            })
            .collect()
    }
}

fn clean_token(s: &str) -> String {
    s.trim().to_lowercase()
}

fn dedup_keep_order(values: &[String]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    values
        .iter()
        .filter(|v| seen.insert((*v).clone()))
        .cloned()
        .collect()
}

/// Trims and lower-cases every categorical and class value, both in the data
/// cells and in the declared value lists (which are then de-duplicated).
/// Numeric columns are left untouched.
pub fn clean_strings(mut raw: RawTable) -> RawTable {
    for col in &mut raw.columns {
        match &mut col.kind {
            ColumnKind::Categorical(values) | ColumnKind::Class(values) => {
                let cleaned: Vec<String> = values.iter().map(|v| clean_token(v)).collect();
                *values = dedup_keep_order(&cleaned);
            }
            ColumnKind::Numeric => {}
        }
    }
    let textual: Vec<bool> = raw
        .columns
        .iter()
        .map(|c| !matches!(c.kind, ColumnKind::Numeric))
        .collect();
    for row in &mut raw.rows {
        for (cell, &is_text) in row.iter_mut().zip(&textual) {
            if let (true, Cell::Text(s)) = (is_text, &mut *cell) {
                *s = clean_token(s);
            }
        }
    }
    raw
}

/// How the positive class is chosen when encoding labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PositiveClass {
    /// A class literally named "positive" if present, otherwise the minority
    /// class of the table being encoded (count ties go to the lexicographically
    /// smaller name).
    #[default]
    Auto,
    /// Use the class with this (cleaned) name.
    Named(String),
}

impl PositiveClass {
    /// Resolves the positive class name from the class names and per-row
    /// class values of the full dataset.
    pub fn resolve(&self, class_names: &[String], values: &[String]) -> Result<String> {
        match self {
            PositiveClass::Named(n) => {
                if class_names.iter().any(|c| c == n) {
                    Ok(n.clone())
                } else {
                    Err(Error::invalid(format!("positive class `{n}` is not a declared class")))
                }
            }
            PositiveClass::Auto => {
                if let Some(p) = class_names.iter().find(|c| c.as_str() == "positive") {
                    return Ok(p.clone());
                }
                let mut sorted: Vec<&String> = class_names.iter().collect();
                sorted.sort();
                let count = |name: &str| values.iter().filter(|v| v.as_str() == name).count();
                sorted
                    .into_iter()
                    .min_by_key(|n| count(n))
                    .cloned()
                    .ok_or_else(|| Error::invalid("no class names"))
            }
        }
    }
}

/// Binary-labelled numeric dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    /// `n_instances × n_features`, row-major.
    pub features: Array2<f64>,
    /// Class index per row, in `{0, 1}`.
    pub labels: Vec<usize>,
    pub positive_class: usize,
    /// Class names in index order (lexicographically sorted).
    pub class_names: [String; 2],
    pub feature_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, checking the shape and label invariants.
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<usize>,
        positive_class: usize,
        class_names: [String; 2],
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                found: labels.len(),
            });
        }
        if features.ncols() == 0 {
            return Err(Error::invalid("dataset needs at least one feature"));
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::DimensionMismatch {
                expected: features.ncols(),
                found: feature_names.len(),
            });
        }
        if labels.iter().any(|&l| l > 1) || positive_class > 1 {
            return Err(Error::invalid("labels must be 0 or 1"));
        }
        let features = if features.is_standard_layout() {
            features
        } else {
            features.as_standard_layout().to_owned()
        };
        Ok(Self {
            name: name.into(),
            features,
            labels,
            positive_class,
            class_names,
            feature_names,
        })
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.features.as_slice().expect("standard layout")[i * p..(i + 1) * p]
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            positive_class: self.positive_class,
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Same labels and metadata with a replacement feature matrix.
    pub fn with_features(&self, features: Array2<f64>) -> Result<Dataset> {
        if features.dim() != self.features.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: features.ncols(),
            });
        }
        Ok(Dataset {
            features: features.as_standard_layout().to_owned(),
            ..self.clone()
        })
    }

    /// Concatenates rows of `self` and `other` (same schema).
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.feature_names != other.feature_names || self.class_names != other.class_names {
            return Err(Error::invalid("cannot concatenate datasets with different schemas"));
        }
        let features = ndarray::concatenate(Axis(0), &[self.features.view(), other.features.view()])
            .map_err(|e| Error::invalid(e.to_string()))?;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Dataset::new(
            self.name.clone(),
            features,
            labels,
            self.positive_class,
            self.class_names.clone(),
            self.feature_names.clone(),
        )
    }
}

/// One cross-validation fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPair {
    /// 1-based.
    pub fold_index: usize,
    pub train: Dataset,
    pub test: Dataset,
}

/// Encodes a cleaned table into a numeric dataset.
///
/// Categorical columns with `n` declared values become `n − 1` indicator
/// columns; the lexicographically smallest value is dropped. Numeric columns
/// pass through. Class names are sorted and mapped to indices 0 and 1.
pub fn one_hot_encode(raw: &RawTable, positive: &PositiveClass) -> Result<Dataset> {
    let ci = raw
        .class_column()
        .ok_or_else(|| Error::invalid("table has no class column"))?;
    let class_spec = &raw.columns[ci];
    let ColumnKind::Class(declared) = &class_spec.kind else {
        unreachable!()
    };
    let mut class_names: Vec<String> = dedup_keep_order(declared);
    class_names.sort();
    if class_names.len() != 2 {
        return Err(Error::ClassCount {
            column: class_spec.name.clone(),
            count: class_names.len(),
        });
    }
    let values = raw.class_values();
    for v in &values {
        if !class_names.contains(v) {
            return Err(Error::UnknownCategory {
                column: class_spec.name.clone(),
                value: v.clone(),
            });
        }
    }
    let positive_name = positive.resolve(&class_names, &values)?;
    let positive_class = class_names.iter().position(|c| *c == positive_name).unwrap();

    // (source column, optional category) per output feature
    let mut plan: Vec<(usize, Option<String>)> = Vec::new();
    let mut feature_names = Vec::new();
    for (j, col) in raw.columns.iter().enumerate() {
        match &col.kind {
            ColumnKind::Numeric => {
                plan.push((j, None));
                feature_names.push(col.name.clone());
            }
            ColumnKind::Categorical(vals) => {
                let mut sorted: Vec<String> = dedup_keep_order(vals);
                sorted.sort();
                for v in sorted.into_iter().skip(1) {
                    feature_names.push(format!("{}_{}", col.name, v));
                    plan.push((j, Some(v)));
                }
            }
            ColumnKind::Class(_) => {}
        }
    }

    let n = raw.rows.len();
    let p = plan.len();
    let mut data = Vec::with_capacity(n * p);
    for row in &raw.rows {
        for (j, category) in &plan {
            let cell = &row[*j];
            let v = match (category, cell) {
                (None, Cell::Number(x)) => *x,
                (None, Cell::Text(s)) => {
                    return Err(Error::invalid(format!(
                        "column `{}` is numeric but holds `{s}`",
                        raw.columns[*j].name
                    )))
                }
                (Some(cat), Cell::Text(s)) => {
                    if s == cat {
                        1.0
                    } else {
                        0.0
                    }
                }
                (Some(_), Cell::Number(x)) => {
                    return Err(Error::invalid(format!(
                        "column `{}` is categorical but holds {x}",
                        raw.columns[*j].name
                    )))
                }
            };
            data.push(v);
        }
    }
    // every categorical cell must be declared
    for (j, col) in raw.columns.iter().enumerate() {
        if let ColumnKind::Categorical(vals) = &col.kind {
            for row in &raw.rows {
                if let Cell::Text(s) = &row[j] {
                    if !vals.contains(s) {
                        return Err(Error::UnknownCategory {
                            column: col.name.clone(),
                            value: s.clone(),
                        });
                    }
                }
            }
        }
    }
    let labels = values
        .iter()
        .map(|v| class_names.iter().position(|c| c == v).unwrap())
        .collect();
    let features = Array2::from_shape_vec((n, p), data).map_err(|e| Error::invalid(e.to_string()))?;
    Dataset::new(
        raw.relation.clone(),
        features,
        labels,
        positive_class,
        [class_names[0].clone(), class_names[1].clone()],
        feature_names,
    )
}

/// Majority count over minority count.
pub fn imbalance_ratio(d: &Dataset) -> Result<f64> {
    let [a, b] = d.class_counts();
    imbalance_ratio_from_counts(a, b)
}

pub fn imbalance_ratio_from_counts(a: usize, b: usize) -> Result<f64> {
    let (lo, hi) = (a.min(b), a.max(b));
    if lo == 0 {
        return Err(Error::InsufficientClass {
            class: "minority".into(),
            count: 0,
            required: 1,
        });
    }
    Ok(hi as f64 / lo as f64)
}

/// Imbalance-ratio band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IrStratum {
    Low,
    Medium,
    High,
}

impl IrStratum {
    pub const ALL: [IrStratum; 3] = [IrStratum::Low, IrStratum::Medium, IrStratum::High];

    pub fn as_str(self) -> &'static str {
        match self {
            IrStratum::Low => "low",
            IrStratum::Medium => "medium",
            IrStratum::High => "high",
        }
    }
}

impl fmt::Display for IrStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Upper bounds (inclusive) of the Low and Medium bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratumBounds {
    pub low_max: f64,
    pub medium_max: f64,
}

impl Default for StratumBounds {
    fn default() -> Self {
        Self {
            low_max: 3.0,
            medium_max: 9.0,
        }
    }
}

impl StratumBounds {
    pub fn classify(&self, ir: f64) -> IrStratum {
        if ir <= self.low_max {
            IrStratum::Low
        } else if ir <= self.medium_max {
            IrStratum::Medium
        } else {
            IrStratum::High
        }
    }
}

/// Low for IR ≤ 3, Medium for 3 < IR ≤ 9, High above.
pub fn ir_stratum(ir: f64) -> IrStratum {
    StratumBounds::default().classify(ir)
}

/// Splits `d` into `k` stratified folds.
///
/// Each class's rows are shuffled with a seeded generator and dealt
/// round-robin over the folds; the second class continues the deal where the
/// first stopped so fold sizes stay within one row of each other. Rows keep
/// their original relative order inside each train and test part.
pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<Vec<FoldPair>> {
    let fold_of = stratified_assignment(&d.labels, &d.class_names, k, seed)?;
    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..d.n_instances()).partition(|&i| fold_of[i] == f);
            FoldPair {
                fold_index: f + 1,
                train: d.select(&train),
                test: d.select(&test),
            }
        })
        .collect())
}

/// Zero-based fold per row for binary `labels`.
pub(crate) fn stratified_assignment(
    labels: &[usize],
    class_names: &[String],
    k: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    for class in 0..2 {
        let count = labels.iter().filter(|&&l| l == class).count();
        if count < k {
            return Err(Error::InsufficientClass {
                class: class_names.get(class).cloned().unwrap_or_else(|| class.to_string()),
                count,
                required: k,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; labels.len()];
    let mut next = 0usize;
    for class in 0..2 {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            fold_of[i] = next % k;
            next += 1;
        }
    }
    Ok(fold_of)
}
