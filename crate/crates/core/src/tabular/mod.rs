//! CSV ingestion with per-column type inference, grouping, aggregation and
//! temporal windowing.

mod aggregate;
mod ingest;
mod time;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{group_aggregate, window_series, AggOp, Aggregation, GroupRow, WindowRow};
pub use ingest::{ingest_csv, ingest_csv_path, parse_number};
pub use time::{TimePoint, TimeUnit};

#[derive(Debug, Error, PartialEq)]
pub enum TabularError {
    #[error("empty input: missing header row")]
    MissingHeader,
    #[error("CSV parse error at row {row}: {message}")]
    Csv { row: u64, message: String },
    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged { row: u64, expected: usize, found: usize },
    #[error("column {column}: empty header name")]
    EmptyHeader { column: usize },
    #[error("column {column}: duplicate header {name:?}")]
    DuplicateHeader { column: usize, name: String },
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("field {field:?} is {actual}, expected {expected}")]
    WrongKind {
        field: String,
        expected: FieldKind,
        actual: FieldKind,
    },
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Categorical,
    Numerical,
    Temporal,
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FieldKind::Categorical => "categorical",
            FieldKind::Numerical => "numerical",
            FieldKind::Temporal => "temporal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum Cell {
    Missing,
    Text(String),
    Number(f64),
    Date(TimePoint),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<TimePoint> {
        match self {
            Cell::Date(t) => Some(*t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub kind: FieldKind,
    pub cells: Vec<Cell>,
}

impl Field {
    /// Distinct non-missing categorical values in first-appearance order.
    pub fn distinct_values(&self) -> Vec<&str> {
        let mut seen = std::collections::HashSet::new();
        self.cells
            .iter()
            .filter_map(Cell::as_text)
            .filter(|v| seen.insert(*v))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub fields: Vec<Field>,
    pub row_count: usize,
}

impl Dataset {
    pub fn field(&self, name: &str) -> Result<&Field, TabularError> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| TabularError::UnknownField(name.to_string()))
    }

    pub fn field_of_kind(&self, name: &str, kind: FieldKind) -> Result<&Field, TabularError> {
        let field = self.field(name)?;
        if field.kind != kind {
            return Err(TabularError::WrongKind {
                field: name.to_string(),
                expected: kind,
                actual: field.kind,
            });
        }
        Ok(field)
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|f| f.name.as_str())
    }
}
