//! CSV ingestion.

use std::path::Path;

use hybridcast::TimeSeries;
use log::{info, warn};

use crate::error::{CliError, Result};

pub const MIN_VALID_ROWS: usize = 10;

/// Skipped row numbers reported in messages, at most.
const REPORTED_SKIPS: usize = 10;

/// A column picked by header name or, failing that, by zero-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRef(pub String);

impl ColumnRef {
    pub fn index(i: usize) -> Self {
        Self(i.to_string())
    }

    fn resolve(&self, header: &csv::StringRecord) -> Option<usize> {
        let wanted = self.0.trim();
        header
            .iter()
            .position(|h| h.trim() == wanted)
            .or_else(|| wanted.parse::<usize>().ok().filter(|&i| i < header.len()))
    }
}

impl From<&str> for ColumnRef {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSeries {
    pub series: TimeSeries,
    /// Data rows dropped as blank or unparseable.
    pub skipped: usize,
    /// 1-based file line numbers of the first skipped rows.
    pub skipped_lines: Vec<u64>,
}

/// Parses a numeric field, ignoring surrounding whitespace and comma
/// thousands-separators. Non-finite results are rejected.
pub fn parse_number(field: &str) -> Option<f64> {
    let cleaned: String = field.trim().chars().filter(|&c| c != ',').collect();
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads one value column (and optionally a label column) from a headed CSV
/// file, requiring at least [`MIN_VALID_ROWS`] parseable rows.
pub fn load_csv(path: &Path, value_column: &ColumnRef, label_column: Option<&ColumnRef>) -> Result<LoadedSeries> {
    load_csv_with(path, value_column, label_column, MIN_VALID_ROWS)
}

/// [`load_csv`] with a caller-chosen minimum row count (at least 1).
pub fn load_csv_with(
    path: &Path,
    value_column: &ColumnRef,
    label_column: Option<&ColumnRef>,
    min_rows: usize,
) -> Result<LoadedSeries> {
    let min_rows = min_rows.max(1);
    let contents = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(contents.as_slice());
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    let missing = |column: &ColumnRef| CliError::MissingColumn {
        path: path.to_path_buf(),
        column: column.0.clone(),
        header: header.iter().collect::<Vec<_>>().join(", "),
    };
    let value_idx = value_column.resolve(&header).ok_or_else(|| missing(value_column))?;
    let label_idx = label_column
        .map(|c| c.resolve(&header).ok_or_else(|| missing(c)))
        .transpose()?;

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut skipped_lines = Vec::new();
    let mut skipped = 0usize;
    // The csv reader drops blank lines without counting them, so true line
    // numbers come from record byte offsets; blank lines are the gaps.
    let mut expected_line = 2u64;
    let (mut scanned, mut line) = (0usize, 1u64);
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record).map_err(csv_err)? {
        let mut start = record.position().map_or(scanned, |p| p.byte() as usize);
        // Reported offsets include the blank lines skipped before the record.
        while matches!(contents.get(start), Some(b'\n' | b'\r')) {
            start += 1;
        }
        line += contents[scanned..start].iter().filter(|&&b| b == b'\n').count() as u64;
        scanned = start;
        for blank in expected_line..line {
            skipped += 1;
            if skipped_lines.len() < REPORTED_SKIPS {
                skipped_lines.push(blank);
            }
        }
        expected_line = line + 1 + record.iter().map(|f| f.matches('\n').count() as u64).sum::<u64>();
        match record.get(value_idx).and_then(parse_number) {
            Some(v) => {
                values.push(v);
                if let Some(li) = label_idx {
                    labels.push(record.get(li).unwrap_or("").trim().to_string());
                }
            }
            None => {
                skipped += 1;
                if skipped_lines.len() < REPORTED_SKIPS {
                    skipped_lines.push(line);
                }
            }
        }
    }

    if skipped > 0 {
        warn!(
            "{}: skipped {skipped} blank or unparseable rows (lines {:?}{})",
            path.display(),
            skipped_lines,
            if skipped > skipped_lines.len() { ", ..." } else { "" }
        );
    }
    if values.len() < min_rows {
        let detail = if skipped_lines.is_empty() {
            String::new()
        } else {
            format!("; skipped lines {skipped_lines:?}")
        };
        return Err(CliError::TooFewRows {
            path: path.to_path_buf(),
            found: values.len(),
            needed: min_rows,
            detail,
        });
    }
    let name = header.get(value_idx).unwrap_or_default().trim().to_string();
    let series = match label_idx {
        Some(_) => TimeSeries::with_labels(name, values, labels)?,
        None => TimeSeries::new(name, values)?,
    };
    info!("{}: loaded {} values", path.display(), series.len());
    Ok(LoadedSeries {
        series,
        skipped,
        skipped_lines,
    })
}
