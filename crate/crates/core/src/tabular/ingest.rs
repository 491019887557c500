use std::collections::HashSet;
use std::path::Path;

use super::{Cell, Dataset, Field, FieldKind, TabularError, TimePoint};

/// Parses a numeric cell, tolerating `%` signs, thousands separators and a
/// leading `+`. Percent values stay in percent units.
pub fn parse_number(raw: &str) -> Option<f64> {
    let s = raw.trim();
    let s = s.strip_suffix('%').or_else(|| s.strip_prefix('%')).unwrap_or(s).trim();
    let cleaned: String = s.chars().filter(|&c| c != ',').collect();
    if !cleaned.bytes().any(|b| b.is_ascii_digit())
        || !cleaned
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
    {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn infer_kind(raw: &[&str]) -> FieldKind {
    let present: Vec<&str> = raw.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    if present.is_empty() {
        return FieldKind::Categorical;
    }
    if present.iter().all(|s| TimePoint::parse(s).is_some()) {
        FieldKind::Temporal
    } else if present.iter().all(|s| parse_number(s).is_some()) {
        FieldKind::Numerical
    } else {
        FieldKind::Categorical
    }
}

fn to_cell(raw: &str, kind: FieldKind) -> Cell {
    if raw.is_empty() {
        return Cell::Missing;
    }
    match kind {
        FieldKind::Categorical => Cell::Text(raw.to_string()),
        FieldKind::Numerical => parse_number(raw).map_or(Cell::Missing, Cell::Number),
        FieldKind::Temporal => TimePoint::parse(raw.trim()).map_or(Cell::Missing, Cell::Date),
    }
}

/// Reads CSV text with a header row and infers a kind per column.
///
/// Columns are temporal when every non-empty cell is an ISO date, numerical
/// when every non-empty cell is a number, and categorical otherwise.
pub fn ingest_csv(text: &str) -> Result<Dataset, TabularError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let csv_err = |e: csv::Error| TabularError::Csv {
        row: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let header = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => return Err(TabularError::MissingHeader),
    };
    let mut names = Vec::with_capacity(header.len());
    let mut seen = HashSet::new();
    for (i, name) in header.iter().enumerate() {
        let name = name.trim();
        if name.is_empty() {
            return Err(TabularError::EmptyHeader { column: i + 1 });
        }
        if !seen.insert(name) {
            return Err(TabularError::DuplicateHeader {
                column: i + 1,
                name: name.to_string(),
            });
        }
        names.push(name.to_string());
    }

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let row = record.position().map_or(rows.len() as u64 + 2, |p| p.line());
        // A lone empty line is not a data row.
        if record.len() == 1 && record[0].is_empty() && names.len() > 1 {
            continue;
        }
        if record.len() != names.len() {
            return Err(TabularError::Ragged {
                row,
                expected: names.len(),
                found: record.len(),
            });
        }
        rows.push(record);
    }

    let fields = names
        .into_iter()
        .enumerate()
        .map(|(col, name)| {
            let raw: Vec<&str> = rows.iter().map(|r| &r[col]).collect();
            let kind = infer_kind(&raw);
            Field {
                name,
                kind,
                cells: raw.iter().map(|s| to_cell(s, kind)).collect(),
            }
        })
        .collect();
    Ok(Dataset {
        fields,
        row_count: rows.len(),
    })
}

pub fn ingest_csv_path(path: impl AsRef<Path>) -> Result<Dataset, TabularError> {
    let text = std::fs::read_to_string(path).map_err(|e| TabularError::Io(e.to_string()))?;
    ingest_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn infers_temporal_and_numerical() {
        let ds = ingest_csv("year,tempdiff\n1918,-0.3\n1919,-0.27\n1920,\n").unwrap();
        assert_eq!(ds.row_count, 3);
        assert_eq!(ds.fields[0].kind, FieldKind::Temporal);
        assert_eq!(ds.fields[1].kind, FieldKind::Numerical);
        assert_eq!(ds.fields[1].cells[0], Cell::Number(-0.3));
        assert!(ds.fields[1].cells[2].is_missing());
    }

    #[test]
    fn categorical_demotion() {
        let ds = ingest_csv("a,b\na,1\nb,2\na,x\n").unwrap();
        assert_eq!(ds.fields[0].kind, FieldKind::Categorical);
        assert_eq!(ds.fields[1].kind, FieldKind::Categorical);
        assert_eq!(ds.fields[0].distinct_values(), ["a", "b"]);
    }

    #[test]
    fn percent_and_thousands() {
        assert_eq!(parse_number("12.5%"), Some(12.5));
        assert_eq!(parse_number(" 1,234,567 "), Some(1_234_567.0));
        assert_eq!(parse_number("+3e2"), Some(300.0));
        assert_eq!(parse_number("inf"), None);
        assert_eq!(parse_number("NaN"), None);
        assert_eq!(parse_number("%"), None);
        let ds = ingest_csv("province,% at risk\n\"A\",\"1,200%\"\nB,3%\n").unwrap();
        assert_eq!(ds.fields[1].kind, FieldKind::Numerical);
        assert_eq!(ds.fields[1].cells[0], Cell::Number(1200.0));
    }

    #[test]
    fn quoting_and_bom() {
        let ds = ingest_csv("\u{feff}name,note\n\"Noord-Holland\",\"says \"\"hi\"\", ok\"\n").unwrap();
        assert_eq!(ds.fields[0].name, "name");
        assert_eq!(ds.fields[1].cells[0], Cell::Text("says \"hi\", ok".into()));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            ingest_csv("a,b\n1,2\n3\n").unwrap_err(),
            TabularError::Ragged {
                row: 3,
                expected: 2,
                found: 1
            }
        );
        assert_eq!(
            ingest_csv("a,,c\n").unwrap_err(),
            TabularError::EmptyHeader { column: 2 }
        );
        assert_eq!(
            ingest_csv("a,b,a\n").unwrap_err(),
            TabularError::DuplicateHeader {
                column: 3,
                name: "a".into()
            }
        );
        assert_eq!(ingest_csv("").unwrap_err(), TabularError::MissingHeader);
    }

    #[test]
    fn all_missing_column_is_categorical() {
        let ds = ingest_csv("a,b\n,1\n,2\n").unwrap();
        assert_eq!(ds.fields[0].kind, FieldKind::Categorical);
        assert!(ds.fields[0].cells.iter().all(Cell::is_missing));
    }

    proptest! {
        #[test]
        fn categorical_cells_are_lossless(cells in proptest::collection::vec("[a-z ,\"é]{1,8}", 1..10)) {
            let mut text = String::from("label,pad\n");
            for c in &cells {
                text.push_str(&format!("\"{}\",x\n", c.replace('"', "\"\"")));
            }
            let ds = ingest_csv(&text).unwrap();
            let field = &ds.fields[0];
            prop_assume!(field.kind == FieldKind::Categorical);
            let parsed: Vec<&str> = field.cells.iter().map(|c| c.as_text().unwrap()).collect();
            prop_assert_eq!(parsed.concat(), cells.concat());
        }
    }
}
