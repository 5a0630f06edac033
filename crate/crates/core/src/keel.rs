//! KEEL `.dat` reader/writer, pre-split fold discovery and results CSV.
//!
//! The reader accepts the header keywords `@relation`, `@attribute`,
//! `@inputs`, `@outputs` (singular forms too) and `@data`, matched
//! case-insensitively. Lines starting with `%` are comments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dataset::{
    clean_strings, one_hot_encode, Cell, ColumnKind, ColumnSpec, FoldPair, PositiveClass, RawTable,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeType {
    Real(Option<(f64, f64)>),
    Integer(Option<(f64, f64)>),
    Nominal(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDecl {
    pub name: String,
    pub ty: AttributeType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeelHeader {
    pub relation: String,
    pub attributes: Vec<AttributeDecl>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// A parsed file: header plus the table built from it.
#[derive(Debug, Clone, PartialEq)]
pub struct KeelDocument {
    pub header: KeelHeader,
    pub table: RawTable,
}

/// Parses KEEL text into a raw table.
pub fn parse_keel(text: &str) -> Result<RawTable> {
    parse_keel_document(text).map(|d| d.table)
}

pub fn parse_keel_file(path: &Path) -> Result<KeelDocument> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_keel_document(&text)
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

fn parse_range(rest: &str, line: usize) -> Result<Option<(f64, f64)>> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Ok(None);
    }
    let inner = rest
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("malformed range `{rest}`"),
        })?;
    let bounds: Vec<&str> = inner.split(',').map(str::trim).collect();
    match bounds.as_slice() {
        [lo, hi] => {
            let lo = lo.parse::<f64>();
            let hi = hi.parse::<f64>();
            match (lo, hi) {
                (Ok(lo), Ok(hi)) => Ok(Some((lo, hi))),
                _ => Err(Error::Parse {
                    line,
                    message: format!("malformed range `{rest}`"),
                }),
            }
        }
        _ => Err(Error::Parse {
            line,
            message: format!("malformed range `{rest}`"),
        }),
    }
}

fn parse_attribute(body: &str, line: usize) -> Result<AttributeDecl> {
    let body = body.trim();
    let name_end = body
        .find(|c: char| c.is_whitespace() || c == '{')
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("attribute `{body}` has no type"),
        })?;
    let name = body[..name_end].trim_matches('\'').to_string();
    let rest = body[name_end..].trim();
    if let Some(inner) = rest.strip_prefix('{') {
        let inner = inner.strip_suffix('}').ok_or_else(|| Error::Parse {
            line,
            message: format!("unterminated value set for `{name}`"),
        })?;
        return Ok(AttributeDecl {
            name,
            ty: AttributeType::Nominal(split_list(inner)),
        });
    }
    let (ty, range) = match rest.find(|c: char| c.is_whitespace() || c == '[') {
        Some(i) => (&rest[..i], &rest[i..]),
        None => (rest, ""),
    };
    let ty = match ty.to_ascii_lowercase().as_str() {
        "real" | "numeric" => AttributeType::Real(parse_range(range, line)?),
        "integer" => AttributeType::Integer(parse_range(range, line)?),
        other => {
            return Err(Error::Parse {
                line,
                message: format!("unknown attribute type `{other}` for `{name}`"),
            })
        }
    };
    Ok(AttributeDecl { name, ty })
}

/// Parses KEEL text, keeping the header.
///
/// When `@outputs` is absent the last attribute is the class; when `@inputs`
/// is absent every other attribute is an input. Attributes that are neither
/// inputs nor the output are dropped from the table.
pub fn parse_keel_document(text: &str) -> Result<KeelDocument> {
    let mut relation = String::new();
    let mut attributes: Vec<AttributeDecl> = Vec::new();
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut data_lines: Vec<(usize, &str)> = Vec::new();
    let mut in_data = false;

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            data_lines.push((line_no, line));
            continue;
        }
        if !line.starts_with('@') {
            return Err(Error::Parse {
                line: line_no,
                message: "data row before @data".into(),
            });
        }
        let (keyword, body) = match line.find(char::is_whitespace) {
            Some(i) => (&line[..i], line[i..].trim()),
            None => (line, ""),
        };
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => relation = body.to_string(),
            "@attribute" => attributes.push(parse_attribute(body, line_no)?),
            "@inputs" | "@input" => inputs = Some(split_list(body)),
            "@outputs" | "@output" => outputs = Some(split_list(body)),
            "@data" => in_data = true,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown header keyword `{other}`"),
                })
            }
        }
    }
    if attributes.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no @attribute declarations".into(),
        });
    }
    let outputs = outputs.unwrap_or_else(|| vec![attributes.last().unwrap().name.clone()]);
    if outputs.len() != 1 {
        return Err(Error::Parse {
            line: 0,
            message: format!("expected exactly one output attribute, found {}", outputs.len()),
        });
    }
    let inputs = inputs.unwrap_or_else(|| {
        attributes
            .iter()
            .map(|a| a.name.clone())
            .filter(|n| *n != outputs[0])
            .collect()
    });
    for name in inputs.iter().chain(&outputs) {
        if !attributes.iter().any(|a| a.name == *name) {
            return Err(Error::Parse {
                line: 0,
                message: format!("`{name}` is not a declared attribute"),
            });
        }
    }

    // (position in file row, column spec)
    let mut kept: Vec<(usize, ColumnSpec)> = Vec::new();
    for (pos, attr) in attributes.iter().enumerate() {
        let is_output = attr.name == outputs[0];
        if !is_output && !inputs.contains(&attr.name) {
            continue;
        }
        let kind = match (&attr.ty, is_output) {
            (AttributeType::Nominal(v), true) => ColumnKind::Class(v.clone()),
            (AttributeType::Nominal(v), false) => ColumnKind::Categorical(v.clone()),
            (_, true) => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("output attribute `{}` must be nominal", attr.name),
                })
            }
            (_, false) => ColumnKind::Numeric,
        };
        kept.push((
            pos,
            ColumnSpec {
                name: attr.name.clone(),
                kind,
            },
        ));
    }

    let mut rows = Vec::with_capacity(data_lines.len());
    for (row_idx, (_, line)) in data_lines.iter().enumerate() {
        let row_no = row_idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != attributes.len() {
            return Err(Error::RowArity {
                row: row_no,
                expected: attributes.len(),
                found: cells.len(),
            });
        }
        let mut row = Vec::with_capacity(kept.len());
        for (pos, spec) in &kept {
            let cell = cells[*pos];
            if cell == "?" {
                return Err(Error::MissingValue {
                    column: spec.name.clone(),
                    row: row_no,
                });
            }
            row.push(match spec.kind {
                ColumnKind::Numeric => Cell::Number(cell.parse::<f64>().map_err(|_| Error::NumericCell {
                    column: spec.name.clone(),
                    row: row_no,
                    value: cell.to_string(),
                })?),
                _ => Cell::Text(cell.to_string()),
            });
        }
        rows.push(row);
    }

    Ok(KeelDocument {
        header: KeelHeader {
            relation: relation.clone(),
            attributes,
            inputs,
            outputs,
        },
        table: RawTable {
            relation,
            columns: kept.into_iter().map(|(_, c)| c).collect(),
            rows,
        },
    })
}

fn format_range(range: &Option<(f64, f64)>) -> String {
    match range {
        Some((lo, hi)) => format!(" [{lo:?}, {hi:?}]"),
        None => String::new(),
    }
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Number(v) => format!("{v}"),
        Cell::Text(s) => s.clone(),
    }
}

impl KeelDocument {
    /// Serializes header and rows back into KEEL text. The table's columns
    /// must correspond to the header's inputs followed by its output.
    pub fn to_keel_string(&self) -> String {
        let mut out = String::new();
        let h = &self.header;
        let _ = writeln!(out, "@relation {}", h.relation);
        for a in &h.attributes {
            let ty = match &a.ty {
                AttributeType::Real(r) => format!("real{}", format_range(r)),
                AttributeType::Integer(r) => format!("integer{}", format_range(r)),
                AttributeType::Nominal(v) => format!("{{{}}}", v.join(", ")),
            };
            let _ = writeln!(out, "@attribute {} {}", a.name, ty);
        }
        let _ = writeln!(out, "@inputs {}", h.inputs.join(", "));
        let _ = writeln!(out, "@outputs {}", h.outputs.join(", "));
        out.push_str("@data\n");
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            out.push_str(&cells.join(", "));
            out.push('\n');
        }
        out
    }

    /// Same header, different rows.
    pub fn with_rows(&self, rows: Vec<Vec<Cell>>) -> KeelDocument {
        KeelDocument {
            header: self.header.clone(),
            table: RawTable {
                rows,
                ..self.table.clone()
            },
        }
    }
}

/// Header rendered for a table; numeric columns become `real` with no range.
pub fn header_for_table(table: &RawTable) -> KeelHeader {
    let attributes = table
        .columns
        .iter()
        .map(|c| AttributeDecl {
            name: c.name.clone(),
            ty: match &c.kind {
                ColumnKind::Numeric => AttributeType::Real(None),
                ColumnKind::Categorical(v) | ColumnKind::Class(v) => AttributeType::Nominal(v.clone()),
            },
        })
        .collect();
    let outputs: Vec<String> = table
        .columns
        .iter()
        .filter(|c| matches!(c.kind, ColumnKind::Class(_)))
        .map(|c| c.name.clone())
        .collect();
    let inputs = table
        .columns
        .iter()
        .filter(|c| !matches!(c.kind, ColumnKind::Class(_)))
        .map(|c| c.name.clone())
        .collect();
    KeelHeader {
        relation: table.relation.clone(),
        attributes,
        inputs,
        outputs,
    }
}

/// File name of one half of a pre-split fold.
pub fn fold_file_name(dataset: &str, fold: usize, train: bool) -> String {
    format!("{dataset}-5-{fold}{}.dat", if train { "tra" } else { "tst" })
}

fn union_values(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for v in b {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// Gives both tables the union of their declared categorical and class
/// value sets, column by column.
fn share_vocabulary(train: &mut RawTable, test: &mut RawTable) -> Result<()> {
    if train.columns.len() != test.columns.len()
        || train.columns.iter().zip(&test.columns).any(|(a, b)| a.name != b.name)
    {
        return Err(Error::invalid("train and test files declare different attributes"));
    }
    for (a, b) in train.columns.iter_mut().zip(test.columns.iter_mut()) {
        match (&mut a.kind, &mut b.kind) {
            (ColumnKind::Categorical(va), ColumnKind::Categorical(vb))
            | (ColumnKind::Class(va), ColumnKind::Class(vb)) => {
                let u = union_values(va, vb);
                *va = u.clone();
                *vb = u;
            }
            (ColumnKind::Numeric, ColumnKind::Numeric) => {}
            _ => {
                return Err(Error::invalid(format!(
                    "attribute `{}` has different kinds in train and test",
                    a.name
                )))
            }
        }
    }
    Ok(())
}

/// Loads the five pre-split folds `<name>-5-<i>tra.dat` / `<name>-5-<i>tst.dat`.
///
/// Each pair is cleaned and encoded against a shared vocabulary so train
/// and test have identical columns. The positive class is resolved once from
/// the union of the first pair (train + test = the whole dataset).
pub fn load_fold_pairs(directory: &Path, dataset_name: &str) -> Result<Vec<FoldPair>> {
    let expected: Vec<(usize, bool, String)> = (1..=5)
        .flat_map(|i| [(i, true), (i, false)])
        .map(|(i, tra)| (i, tra, fold_file_name(dataset_name, i, tra)))
        .collect();
    let missing: Vec<String> = expected
        .iter()
        .filter(|(_, _, f)| !directory.join(f).is_file())
        .map(|(_, _, f)| f.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingFoldFiles { files: missing });
    }

    let mut pairs = Vec::with_capacity(5);
    let mut positive: Option<PositiveClass> = None;
    for fold in 1..=5 {
        let read = |train: bool| -> Result<RawTable> {
            let path = directory.join(fold_file_name(dataset_name, fold, train));
            Ok(clean_strings(parse_keel_file(&path)?.table))
        };
        let mut train = read(true)?;
        let mut test = read(false)?;
        share_vocabulary(&mut train, &mut test)?;
        let rule = match &positive {
            Some(rule) => rule.clone(),
            None => {
                let ci = train.class_column().expect("class column");
                let ColumnKind::Class(names) = &train.columns[ci].kind else {
                    unreachable!()
                };
                let mut values = train.class_values();
                values.extend(test.class_values());
                let mut names = names.clone();
                names.sort();
                let rule = PositiveClass::Named(PositiveClass::Auto.resolve(&names, &values)?);
                positive = Some(rule.clone());
                rule
            }
        };
        let mut train = one_hot_encode(&train, &rule)?;
        let mut test = one_hot_encode(&test, &rule)?;
        if train.feature_names != test.feature_names || train.class_names != test.class_names {
            return Err(Error::invalid(format!(
                "fold {fold}: train and test encodings differ"
            )));
        }
        train.name = dataset_name.to_string();
        test.name = dataset_name.to_string();
        pairs.push(FoldPair {
            fold_index: fold,
            train,
            test,
        });
    }
    Ok(pairs)
}

/// Splits a parsed document into `k` stratified train/test documents using
/// the class column, with the same assignment rule as
/// [`crate::dataset::stratified_folds`].
pub fn split_document(doc: &KeelDocument, k: usize, seed: u64) -> Result<Vec<(KeelDocument, KeelDocument)>> {
    let values = clean_strings(doc.table.clone()).class_values();
    let mut names: Vec<String> = values.clone();
    names.sort();
    names.dedup();
    if names.len() != 2 {
        return Err(Error::ClassCount {
            column: doc.header.outputs[0].clone(),
            count: names.len(),
        });
    }
    let labels: Vec<usize> = values.iter().map(|v| usize::from(*v == names[1])).collect();
    let fold_of = crate::dataset::stratified_assignment(&labels, &names, k, seed)?;
    Ok((0..k)
        .map(|f| {
            let pick = |in_test: bool| -> Vec<Vec<Cell>> {
                doc.table
                    .rows
                    .iter()
                    .zip(&fold_of)
                    .filter(|(_, &g)| (g == f) == in_test)
                    .map(|(r, _)| r.clone())
                    .collect()
            };
            (doc.with_rows(pick(false)), doc.with_rows(pick(true)))
        })
        .collect())
}

/// One observation of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub dataset: String,
    pub fold: usize,
    pub model: String,
    pub scaler: String,
    pub f1: f64,
    pub gmean: f64,
}

pub const RESULTS_HEADER: &str = "dataset,fold,model,scaler,f1,gmean";

/// Sorts by (dataset, model, scaler, fold).
pub fn sort_records(records: &mut [ResultRecord]) {
    records.sort_by(|a, b| {
        (&a.dataset, &a.model, &a.scaler, a.fold).cmp(&(&b.dataset, &b.model, &b.scaler, b.fold))
    });
}

/// Renders records in the results CSV layout.
pub fn format_results_csv(records: &[ResultRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::invalid("no records to write"));
    }
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut out = String::with_capacity(64 * sorted.len());
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in &sorted {
        for field in [&r.dataset, &r.model, &r.scaler] {
            if field.contains([',', '\n', '"']) {
                return Err(Error::invalid(format!("identifier `{field}` contains a separator")));
            }
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            r.dataset, r.fold, r.model, r.scaler, r.f1, r.gmean
        );
    }
    Ok(out)
}

pub fn write_results_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    let text = format_results_csv(records)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a results CSV written by [`write_results_csv`].
pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_results_csv(&text)
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RESULTS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{RESULTS_HEADER}`"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let bad = |m: &str| Error::Parse {
                line: i + 1,
                message: m.to_string(),
            };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            Ok(ResultRecord {
                dataset: f[0].to_string(),
                fold: f[1].parse().map_err(|_| bad("bad fold"))?,
                model: f[2].to_string(),
                scaler: f[3].to_string(),
                f1: f[4].parse().map_err(|_| bad("bad f1"))?,
                gmean: f[5].parse().map_err(|_| bad("bad gmean"))?,
            })
        })
        .collect()
}
