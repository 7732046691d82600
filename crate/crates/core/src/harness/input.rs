use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Column chosen from a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    /// Header name.
    Name(String),
    /// Zero-based position.
    Index(usize),
}

impl ColumnSelector {
    /// A bare non-negative integer is read as a zero-based index.
    pub fn parse(s: &str) -> Self {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.trim().to_string()),
        }
    }
}

/// Reads one column of a comma-separated file as a series, in file order.
///
/// The first row is a header when any of its fields fails to parse as a
/// number. Blank lines are skipped. Any other unparseable or non-finite
/// cell is an error naming its line number.
pub fn ingest_csv(path: impl AsRef<Path>, column: &ColumnSelector) -> Result<TimeSeries<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, record));
    }
    let Some((_, first)) = rows.first() else {
        return Err(Error::Data(format!("{}: file has no data rows", path.display())));
    };
    let has_header = first.iter().any(|f| f.parse::<f64>().is_err());
    let index = match column {
        ColumnSelector::Index(i) => *i,
        ColumnSelector::Name(name) => {
            if !has_header {
                return Err(Error::Data(format!(
                    "{}: no header row, cannot select column {name:?}",
                    path.display()
                )));
            }
            first.iter().position(|h| h == name).ok_or_else(|| {
                Error::Data(format!("{}: no column named {name:?}", path.display()))
            })?
        }
    };
    let body = if has_header { &rows[1..] } else { &rows[..] };
    let mut values = Vec::with_capacity(body.len());
    for (line, record) in body {
        let cell = record.get(index).ok_or_else(|| {
            Error::Data(format!("{}: line {line} has no column {index}", path.display()))
        })?;
        let v: f64 = cell.parse().map_err(|_| {
            Error::Data(format!("{}: line {line}: cannot parse {cell:?} as a number", path.display()))
        })?;
        if !v.is_finite() {
            return Err(Error::Data(format!("{}: line {line}: value {cell:?} is not finite", path.display())));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Data(format!("{}: selected column is empty", path.display())));
    }
    TimeSeries::new(values)
}
