//! CSV ingestion: column roles, one-hot encoding, standardization.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use leakbench_core::{DataPoint, Dataset, Error, Provenance, Result, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnRole {
    Feature,
    TargetAttribute,
    Response,
    Ignore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnEncoding {
    #[default]
    Numeric,
    OneHot,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub name: String,
    pub role: ColumnRole,
    #[serde(default)]
    pub encoding: ColumnEncoding,
    /// Scale to zero mean and unit variance (numeric columns only).
    #[serde(default)]
    pub standardize: bool,
}

/// Sidecar schema assigning a role to every CSV column.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSchema {
    pub columns: Vec<ColumnSpec>,
}

impl CsvSchema {
    pub fn validate(&self) -> Result<()> {
        let responses = self
            .columns
            .iter()
            .filter(|c| c.role == ColumnRole::Response)
            .count();
        if responses != 1 {
            return Err(Error::Config(format!(
                "schema must declare exactly one response column, found {responses}"
            )));
        }
        let targets = self
            .columns
            .iter()
            .filter(|c| c.role == ColumnRole::TargetAttribute)
            .count();
        if targets > 1 {
            return Err(Error::Config(format!(
                "schema allows at most one target-attribute column, found {targets}"
            )));
        }
        for c in &self.columns {
            if c.encoding == ColumnEncoding::OneHot && c.role != ColumnRole::Feature {
                return Err(Error::Config(format!(
                    "column {}: one-hot encoding applies to feature columns only",
                    c.name
                )));
            }
            if c.standardize && c.encoding == ColumnEncoding::OneHot {
                return Err(Error::Config(format!(
                    "column {}: cannot standardize a one-hot column",
                    c.name
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColumnStats {
    pub name: String,
    /// Pre-standardization mean/std for numeric columns.
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Discovered levels for one-hot and target columns.
    pub levels: Option<Vec<String>>,
}

/// What `load_csv` did: per-column statistics and the rows it dropped.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub rows_dropped_missing: usize,
    pub columns: Vec<ColumnStats>,
    /// Target level labels in index order, when a target column exists.
    pub target_levels: Option<Vec<String>>,
    /// Empirical target prior, aligned with `target_levels`.
    pub target_prior: Option<Vec<f64>>,
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan") || t == "?"
}

/// Load a CSV with a header row, apply the schema's role mapping, one-hot
/// encoding, and standardization. Rows with missing values are dropped and
/// counted; unparsable numeric cells are reported with their line number.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<(Dataset, LoadReport)> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Config(format!("malformed header row: {e}")))?
        .clone();

    // map schema columns onto CSV positions
    let mut column_index = Vec::with_capacity(schema.columns.len());
    for spec in &schema.columns {
        let idx = headers
            .iter()
            .position(|h| h == spec.name)
            .ok_or_else(|| Error::Config(format!("column {} not in CSV header", spec.name)))?;
        column_index.push(idx);
    }

    // first pass: keep complete rows as strings
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut rows_read = 0usize;
    let mut rows_dropped = 0usize;
    for (line, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::Config(format!("line {}: {e}", line + 2)))?;
        rows_read += 1;
        let cells: Vec<String> = column_index
            .iter()
            .map(|&i| record.get(i).unwrap_or("").to_string())
            .collect();
        if cells
            .iter()
            .zip(&schema.columns)
            .any(|(cell, spec)| spec.role != ColumnRole::Ignore && is_missing(cell))
        {
            rows_dropped += 1;
            continue;
        }
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(Error::Precondition(
            "no usable rows after dropping missing values".into(),
        ));
    }

    // second pass: parse numerics, discover categorical levels
    let n = rows.len();
    let mut numeric: Vec<Option<Vec<f64>>> = vec![None; schema.columns.len()];
    let mut levels: Vec<Option<Vec<String>>> = vec![None; schema.columns.len()];
    for (c, spec) in schema.columns.iter().enumerate() {
        match (spec.role, spec.encoding) {
            (ColumnRole::Ignore, _) => {}
            (ColumnRole::TargetAttribute, _) | (_, ColumnEncoding::OneHot) => {
                let mut seen: BTreeMap<String, ()> = BTreeMap::new();
                for row in &rows {
                    seen.entry(row[c].trim().to_string()).or_insert(());
                }
                levels[c] = Some(seen.into_keys().collect());
            }
            (_, ColumnEncoding::Numeric) => {
                let mut parsed = Vec::with_capacity(n);
                for (r, row) in rows.iter().enumerate() {
                    let v: f64 = row[c].trim().parse().map_err(|_| {
                        Error::Config(format!(
                            "line {}: column {} value {:?} is not numeric",
                            r + 2,
                            spec.name,
                            row[c]
                        ))
                    })?;
                    parsed.push(v);
                }
                numeric[c] = Some(parsed);
            }
        }
    }

    // standardization per column (population moments)
    let mut col_stats = Vec::new();
    for (c, spec) in schema.columns.iter().enumerate() {
        let mut stats = ColumnStats {
            name: spec.name.clone(),
            mean: None,
            std: None,
            levels: levels[c].clone(),
        };
        if let Some(values) = &mut numeric[c] {
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            stats.mean = Some(mean);
            stats.std = Some(std);
            if spec.standardize {
                if std == 0.0 {
                    return Err(Error::Precondition(format!(
                        "column {} has zero variance; cannot standardize",
                        spec.name
                    )));
                }
                for v in values.iter_mut() {
                    *v = (*v - mean) / std;
                }
            }
        }
        col_stats.push(stats);
    }

    // assemble points
    let mut target_levels = None;
    let mut points = Vec::with_capacity(n);
    for (r, row) in rows.iter().enumerate() {
        let mut known = Vec::new();
        let mut target = None;
        let mut response = None;
        for (c, spec) in schema.columns.iter().enumerate() {
            match spec.role {
                ColumnRole::Ignore => {}
                ColumnRole::Feature => match spec.encoding {
                    ColumnEncoding::Numeric => known.push(numeric[c].as_ref().unwrap()[r]),
                    ColumnEncoding::OneHot => {
                        let lv = levels[c].as_ref().unwrap();
                        let cell = row[c].trim();
                        for level in lv {
                            known.push(f64::from(level == cell));
                        }
                    }
                },
                ColumnRole::TargetAttribute => {
                    let lv = levels[c].as_ref().unwrap();
                    let cell = row[c].trim();
                    let idx = lv.iter().position(|l| l == cell).unwrap();
                    target = Some(idx as f64);
                    target_levels = Some(lv.clone());
                }
                ColumnRole::Response => {
                    response = Some(numeric[c].as_ref().unwrap()[r]);
                }
            }
        }
        points.push(DataPoint {
            known,
            target,
            response: Value::Real(response.expect("schema guarantees one response")),
        });
    }

    let target_prior = target_levels.as_ref().map(|lv| {
        let mut counts = vec![0usize; lv.len()];
        for p in &points {
            counts[p.target.unwrap() as usize] += 1;
        }
        counts.iter().map(|&c| c as f64 / n as f64).collect()
    });

    let dataset = Dataset::new(points, Provenance::Csv)?;
    Ok((
        dataset,
        LoadReport {
            rows_read,
            rows_dropped_missing: rows_dropped,
            columns: col_stats,
            target_levels,
            target_prior,
        },
    ))
}
