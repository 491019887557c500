use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Cell, Dataset, FieldKind, TabularError, TimePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggOp {
    Sum,
    Mean,
    Count,
}

impl std::str::FromStr for AggOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(AggOp::Sum),
            "mean" => Ok(AggOp::Mean),
            "count" => Ok(AggOp::Count),
            other => Err(format!("unknown aggregation {other:?} (expected sum, mean or count)")),
        }
    }
}

impl std::fmt::Display for AggOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AggOp::Sum => "sum",
            AggOp::Mean => "mean",
            AggOp::Count => "count",
        })
    }
}

/// An aggregate over one field. `field` is not read for `count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Aggregation {
    pub op: AggOp,
    pub field: String,
}

impl Aggregation {
    pub fn new(op: AggOp, field: impl Into<String>) -> Self {
        Self {
            op,
            field: field.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    /// One entry per group-by field; `None` for a missing cell.
    pub key: Vec<Option<String>>,
    /// `None` when the aggregate is undefined (mean of no values).
    pub value: Option<f64>,
}

#[derive(Default)]
struct Acc {
    rows: usize,
    values: usize,
    sum: f64,
}

impl Acc {
    fn push(&mut self, value: Option<f64>) {
        self.rows += 1;
        if let Some(v) = value {
            self.values += 1;
            self.sum += v;
        }
    }

    fn finish(&self, op: AggOp) -> Option<f64> {
        match op {
            AggOp::Sum => Some(self.sum),
            AggOp::Mean => (self.values > 0).then(|| self.sum / self.values as f64),
            AggOp::Count => Some(self.rows as f64),
        }
    }
}

fn numeric_cells<'a>(ds: &'a Dataset, agg: &Aggregation) -> Result<Option<&'a [Cell]>, TabularError> {
    if agg.op == AggOp::Count {
        return Ok(None);
    }
    Ok(Some(&ds.field_of_kind(&agg.field, FieldKind::Numerical)?.cells))
}

/// Aggregates per distinct key tuple, in first-appearance order.
///
/// Missing values are skipped by sum and mean; count counts rows.
pub fn group_aggregate<S: AsRef<str>>(
    ds: &Dataset,
    group_by: &[S],
    agg: &Aggregation,
) -> Result<Vec<GroupRow>, TabularError> {
    let keys: Vec<&[Cell]> = group_by
        .iter()
        .map(|name| {
            ds.field_of_kind(name.as_ref(), FieldKind::Categorical)
                .map(|f| f.cells.as_slice())
        })
        .collect::<Result<_, _>>()?;
    let values = numeric_cells(ds, agg)?;

    let mut order: Vec<Vec<Option<String>>> = Vec::new();
    let mut groups: HashMap<Vec<Option<String>>, Acc> = HashMap::new();
    for row in 0..ds.row_count {
        let key: Vec<Option<String>> = keys.iter().map(|c| c[row].as_text().map(str::to_string)).collect();
        let value = values.and_then(|v| v[row].as_number());
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Acc::default()
            })
            .push(value);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let value = groups[&key].finish(agg.op);
            GroupRow { key, value }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub start: TimePoint,
    /// `None` for windows without data.
    pub value: Option<f64>,
}

/// Aggregates `value_field` over consecutive half-open windows of `window`
/// time units, anchored at the earliest time value.
pub fn window_series(
    ds: &Dataset,
    time_field: &str,
    value_field: &str,
    window: u32,
    op: AggOp,
) -> Result<Vec<WindowRow>, TabularError> {
    if window == 0 {
        return Err(TabularError::ZeroWindow);
    }
    let times = &ds.field_of_kind(time_field, FieldKind::Temporal)?.cells;
    let values = if op == AggOp::Count {
        &ds.field(value_field)?.cells
    } else {
        &ds.field_of_kind(value_field, FieldKind::Numerical)?.cells
    };
    let points: Vec<(TimePoint, &Cell)> = times
        .iter()
        .zip(values)
        .filter_map(|(t, v)| t.as_date().map(|t| (t, v)))
        .collect();
    let Some(unit) = points.iter().map(|(t, _)| t.unit()).max() else {
        return Ok(Vec::new());
    };
    let ordinals: Vec<i64> = points.iter().map(|(t, _)| t.ordinal(unit)).collect();
    let min = *ordinals.iter().min().expect("non-empty");
    let max = *ordinals.iter().max().expect("non-empty");
    let width = window as i64;
    let count = ((max - min) / width + 1) as usize;

    let mut accs: Vec<Acc> = (0..count).map(|_| Acc::default()).collect();
    for (ord, (_, cell)) in ordinals.iter().zip(&points) {
        let idx = ((ord - min) / width) as usize;
        if op == AggOp::Count {
            accs[idx].push(None);
        } else if let Some(v) = cell.as_number() {
            accs[idx].push(Some(v));
        }
    }
    Ok(accs
        .iter()
        .enumerate()
        .map(|(i, acc)| {
            let value = match op {
                AggOp::Count => (acc.rows > 0).then_some(acc.rows as f64),
                _ => (acc.values > 0).then(|| acc.finish(op)).flatten(),
            };
            WindowRow {
                start: TimePoint::from_ordinal(min + i as i64 * width, unit),
                value,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::ingest_csv;
    use proptest::prelude::*;

    #[test]
    fn grouped_sum_in_first_appearance_order() {
        let ds = ingest_csv("prov,n\nNL-prov-A,10\nNL-prov-B,7\nNL-prov-A,5\n").unwrap();
        let rows = group_aggregate(&ds, &["prov"], &Aggregation::new(AggOp::Sum, "n")).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].key, [Some("NL-prov-A".to_string())]);
        assert_eq!(rows[0].value, Some(15.0));
        assert_eq!(rows[1].value, Some(7.0));
    }

    #[test]
    fn ungrouped_count_and_mean() {
        let ds = ingest_csv("g,n\na,2\na,\na,4\n").unwrap();
        let none: [&str; 0] = [];
        let count = group_aggregate(&ds, &none, &Aggregation::new(AggOp::Count, "")).unwrap();
        assert_eq!(
            count,
            [GroupRow {
                key: vec![],
                value: Some(3.0)
            }]
        );
        let mean = group_aggregate(&ds, &none, &Aggregation::new(AggOp::Mean, "n")).unwrap();
        assert_eq!(mean[0].value, Some(3.0));
    }

    #[test]
    fn empty_mean_is_missing() {
        let ds = ingest_csv("g,n\na,1\nb,\n").unwrap();
        let rows = group_aggregate(&ds, &["g"], &Aggregation::new(AggOp::Mean, "n")).unwrap();
        assert_eq!(rows[1].value, None);
    }

    #[test]
    fn aggregation_errors() {
        let ds = ingest_csv("g,n\na,1\n").unwrap();
        assert_eq!(
            group_aggregate(&ds, &["zz"], &Aggregation::new(AggOp::Sum, "n")).unwrap_err(),
            TabularError::UnknownField("zz".into())
        );
        assert!(matches!(
            group_aggregate(&ds, &["g"], &Aggregation::new(AggOp::Sum, "g")),
            Err(TabularError::WrongKind { .. })
        ));
        assert!(matches!(
            group_aggregate(&ds, &["n"], &Aggregation::new(AggOp::Sum, "n")),
            Err(TabularError::WrongKind { .. })
        ));
    }

    fn yearly(years: &[i32]) -> Dataset {
        let mut text = String::from("year,v\n");
        for (i, y) in years.iter().enumerate() {
            text.push_str(&format!("{y},{i}\n"));
        }
        ingest_csv(&text).unwrap()
    }

    #[test]
    fn decade_windows() {
        let years: Vec<i32> = (1918..2018).collect();
        let rows = window_series(&yearly(&years), "year", "v", 10, AggOp::Mean).unwrap();
        let starts: Vec<i32> = rows.iter().map(|r| r.start.year).collect();
        assert_eq!(starts, (0..10).map(|i| 1918 + 10 * i).collect::<Vec<_>>());
        assert_eq!(rows[0].value, Some(4.5));
    }

    #[test]
    fn windows_with_gaps_and_singletons() {
        let rows = window_series(&yearly(&[1918, 1940]), "year", "v", 10, AggOp::Mean).unwrap();
        let starts: Vec<i32> = rows.iter().map(|r| r.start.year).collect();
        assert_eq!(starts, [1918, 1928, 1938]);
        assert_eq!(rows[1].value, None);
        assert_eq!(rows[2].value, Some(1.0));
        let single = window_series(&yearly(&[2000]), "year", "v", 10, AggOp::Sum).unwrap();
        assert_eq!(
            single,
            [WindowRow {
                start: TimePoint::year(2000),
                value: Some(0.0)
            }]
        );
        assert_eq!(
            window_series(&yearly(&[2000]), "year", "v", 0, AggOp::Sum).unwrap_err(),
            TabularError::ZeroWindow
        );
    }

    #[test]
    fn monthly_windows() {
        let ds = ingest_csv("month,v\n2020-11,1\n2021-01,2\n2021-04,3\n").unwrap();
        let rows = window_series(&ds, "month", "v", 2, AggOp::Sum).unwrap();
        let labels: Vec<String> = rows.iter().map(|r| r.start.to_string()).collect();
        assert_eq!(labels, ["2020-11", "2021-01", "2021-03"]);
        assert_eq!(
            rows.iter().map(|r| r.value).collect::<Vec<_>>(),
            [Some(1.0), Some(2.0), Some(3.0)]
        );
    }

    proptest! {
        #[test]
        fn grouped_sum_conserves_total(
            rows in proptest::collection::vec((0usize..4, proptest::option::of(-1e3f64..1e3)), 1..40)
        ) {
            let mut text = String::from("g,v\n");
            for (g, v) in &rows {
                let v = v.map(|x| format!("{x}")).unwrap_or_default();
                text.push_str(&format!("k{g},{v}\n"));
            }
            let ds = ingest_csv(&text).unwrap();
            prop_assume!(ds.field("v").unwrap().kind == FieldKind::Numerical);
            let groups = group_aggregate(&ds, &["g"], &Aggregation::new(AggOp::Sum, "v")).unwrap();
            let grouped: f64 = groups.iter().map(|r| r.value.unwrap()).sum();
            let total: f64 = rows.iter().filter_map(|(_, v)| *v).sum();
            prop_assert!((grouped - total).abs() < 1e-6);
        }

        #[test]
        fn window_starts_step_exactly(
            years in proptest::collection::vec(1900i32..2100, 1..30),
            window in 1u32..25,
        ) {
            let rows = window_series(&yearly(&years), "year", "v", window, AggOp::Mean).unwrap();
            let min = *years.iter().min().unwrap();
            let max = *years.iter().max().unwrap();
            prop_assert_eq!(rows[0].start.year, min);
            for pair in rows.windows(2) {
                prop_assert_eq!(pair[1].start.year - pair[0].start.year, window as i32);
            }
            let last = rows.last().unwrap().start.year;
            prop_assert!(last <= max && max < last + window as i32);
        }
    }
}
