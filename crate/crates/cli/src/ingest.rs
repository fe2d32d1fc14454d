//! CSV input and output for joint loss samples.
//!
//! One column per loss variable, one row per observation. An optional column
//! named `weight` carries positive observation weights. Cells are decimals
//! (`0.25`, `-3`, `1e-2`) or `num/den` fractions and are read exactly.

use std::path::Path;

use varlab_core::{JointDiscreteDistribution, Rational};

use crate::error::CliError;

pub const WEIGHT_COLUMN: &str = "weight";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    pub has_header: bool,
    /// Header name of the weight column. With a header and no explicit
    /// name, a column called `weight` is picked up automatically.
    pub weight_column: Option<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { has_header: true, weight_column: None }
    }
}

/// A parsed sample together with its loss-column names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub joint: JointDiscreteDistribution,
}

pub fn default_column_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub fn ingest_csv(path: &Path, options: &IngestOptions) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_str(&text, options)
}

pub fn ingest_str(text: &str, options: &IngestOptions) -> Result<Dataset, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header: Option<Vec<String>> = if options.has_header {
        Some(reader.headers()?.iter().map(str::to_string).collect())
    } else {
        None
    };
    let weight_index = match (&header, &options.weight_column) {
        (Some(h), Some(name)) => Some(
            h.iter()
                .position(|c| c == name)
                .ok_or_else(|| CliError::MissingColumn(name.clone()))?,
        ),
        (Some(h), None) => h.iter().position(|c| c == WEIGHT_COLUMN),
        (None, Some(name)) => return Err(CliError::MissingColumn(name.clone())),
        (None, None) => None,
    };

    let mut width = header.as_ref().map(Vec::len);
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::Ragged { row: line, expected, found: record.len() });
        }
        let mut coords = Vec::with_capacity(expected);
        let mut weight = Rational::one();
        for (col, cell) in record.iter().enumerate() {
            let value: Rational = cell.parse().map_err(|_| CliError::BadCell {
                row: line,
                column: col + 1,
                value: cell.to_string(),
            })?;
            if Some(col) == weight_index {
                if !value.is_positive() {
                    return Err(CliError::NonPositiveWeight { row: line, value: cell.to_string() });
                }
                weight = value;
            } else {
                coords.push(value);
            }
        }
        rows.push((coords, weight));
    }
    if rows.is_empty() {
        return Err(CliError::NoData);
    }
    let n = rows[0].0.len();
    if n == 0 {
        return Err(CliError::NoData);
    }
    let columns = match header {
        Some(h) => h
            .into_iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != weight_index)
            .map(|(_, name)| name)
            .collect(),
        None => default_column_names(n),
    };
    let joint = JointDiscreteDistribution::from_weighted_points(n, rows)?;
    Ok(Dataset { columns, joint })
}

/// Writes `joint` as CSV with a header, one row per support point and the
/// point probability in the `weight` column. [`ingest_str`] reads it back
/// to the identical distribution.
pub fn dump_csv(joint: &JointDiscreteDistribution, columns: &[String]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = columns.iter().map(String::as_str).collect();
    header.push(WEIGHT_COLUMN);
    writer.write_record(&header)?;
    for p in joint.points() {
        let mut row: Vec<String> = p.coords.iter().map(Rational::to_string).collect();
        row.push(p.prob.to_string());
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}
