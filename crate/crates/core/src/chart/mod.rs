//! Encoding plans, chart specifications and the plain-text renderers.

mod plan;
mod timeseries;
mod unit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::recommender::{OrdinalPalette, PlaceholderPolicy};
use crate::tabular::{AggOp, Aggregation, Dataset, FieldKind, TabularError};

pub use plan::{EncodingPlan, PaletteChoice, PlanEdit, DEFAULT_PALETTE};
pub use timeseries::render_time_series;
pub use unit::{auto_unit_value, glyph_count, render_unit_chart};

#[derive(Debug, Error, PartialEq)]
pub enum ChartError {
    #[error(transparent)]
    Data(#[from] TabularError),
    #[error("unknown emoji id {0:?}")]
    UnknownEmoji(String),
    #[error("unknown palette {0:?}")]
    UnknownPalette(String),
    #[error("field order is not a permutation of the plan's fields")]
    NotAPermutation,
    #[error("field {field:?} has no value {value:?}")]
    UnknownValue { field: String, value: String },
    #[error("value {value:?} of field {field:?} has no emoji")]
    UnassignedValue { field: String, value: String },
    #[error("field {0:?} has no emoji in the plan")]
    UnassignedField(String),
    #[error("invalid chart spec: {0}")]
    InvalidSpec(String),
    #[error("empty chart")]
    EmptyChart,
    #[error("negative aggregate {value} for {field:?}: unit charts encode magnitudes only")]
    NegativeAggregate { field: String, value: f64 },
    #[error("time series has no windows")]
    NoWindows,
}

/// Glyph quantity for unit charts: explicit, or derived from the data.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum UnitValue {
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for UnitValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            UnitValue::Auto => s.serialize_str("auto"),
            UnitValue::Fixed(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for UnitValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Option::<Raw>::deserialize(d)? {
            None => Ok(UnitValue::Auto),
            Some(Raw::Number(x)) => Ok(UnitValue::Fixed(x)),
            Some(Raw::Text(s)) if s == "auto" => Ok(UnitValue::Auto),
            Some(Raw::Text(s)) => s
                .parse()
                .map(UnitValue::Fixed)
                .map_err(|_| serde::de::Error::custom(format!("invalid unit value {s:?}"))),
        }
    }
}

impl std::str::FromStr for UnitValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(UnitValue::Auto);
        }
        s.parse()
            .map(UnitValue::Fixed)
            .map_err(|_| format!("invalid unit value {s:?}"))
    }
}

fn default_max_units() -> usize {
    20
}

fn default_series_op() -> AggOp {
    AggOp::Mean
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitChartParams {
    /// Categorical field that defines one row per value.
    pub group_by: String,
    /// Stacked series, each an aggregate of one field.
    pub series: Vec<Aggregation>,
    #[serde(default)]
    pub unit_value: UnitValue,
    #[serde(default = "default_max_units")]
    pub max_units_per_row: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesParams {
    pub time_field: String,
    pub value_field: String,
    pub window: u32,
    /// Falls back to the plan's palette for the value field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<String>,
    #[serde(default = "default_series_op")]
    pub aggregation: AggOp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case")]
pub enum ChartSpec {
    UnitChart(UnitChartParams),
    TimeSeries(TimeSeriesParams),
}

impl ChartSpec {
    /// Checks field references and kinds against `ds`.
    pub fn validate(&self, ds: &Dataset, palettes: &[OrdinalPalette]) -> Result<(), ChartError> {
        match self {
            ChartSpec::UnitChart(p) => {
                ds.field_of_kind(&p.group_by, FieldKind::Categorical)?;
                if p.series.is_empty() {
                    return Err(ChartError::InvalidSpec("unit chart needs at least one series".into()));
                }
                for agg in &p.series {
                    let field = ds.field(&agg.field)?;
                    if agg.op != AggOp::Count && field.kind != FieldKind::Numerical {
                        ds.field_of_kind(&agg.field, FieldKind::Numerical)?;
                    }
                }
                if let UnitValue::Fixed(u) = p.unit_value {
                    if !(u.is_finite() && u > 0.0) {
                        return Err(ChartError::InvalidSpec("unit_value must be positive".into()));
                    }
                }
                if p.max_units_per_row == 0 {
                    return Err(ChartError::InvalidSpec("max_units_per_row must be positive".into()));
                }
            }
            ChartSpec::TimeSeries(p) => {
                ds.field_of_kind(&p.time_field, FieldKind::Temporal)?;
                if p.aggregation == AggOp::Count {
                    ds.field(&p.value_field)?;
                } else {
                    ds.field_of_kind(&p.value_field, FieldKind::Numerical)?;
                }
                if p.window == 0 {
                    return Err(TabularError::ZeroWindow.into());
                }
                if let Some(name) = &p.palette {
                    if !palettes.iter().any(|x| &x.name == name) {
                        return Err(ChartError::UnknownPalette(name.clone()));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub emoji_id: String,
    pub glyph: String,
    pub meaning: String,
}

/// Chart text plus legend. Every line of `text` ends with `\n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedChart {
    pub text: String,
    pub legend: Vec<LegendEntry>,
}

/// Lookup tables shared by the renderers.
#[derive(Debug, Clone, Copy)]
pub struct RenderContext<'a> {
    pub lexicon: &'a Lexicon,
    pub palettes: &'a [OrdinalPalette],
    pub placeholder: &'a PlaceholderPolicy,
}

impl RenderContext<'_> {
    fn glyph(&self, id: &str) -> Result<String, ChartError> {
        self.lexicon
            .glyph(id)
            .ok_or_else(|| ChartError::UnknownEmoji(id.to_string()))
    }

    fn legend(&self, id: &str, meaning: impl Into<String>) -> Result<LegendEntry, ChartError> {
        Ok(LegendEntry {
            emoji_id: id.to_string(),
            glyph: self.glyph(id)?,
            meaning: meaning.into(),
        })
    }
}

/// Renders `spec` with the matching template.
pub fn render(
    ds: &Dataset,
    plan: &EncodingPlan,
    spec: &ChartSpec,
    ctx: &RenderContext,
) -> Result<RenderedChart, ChartError> {
    match spec {
        ChartSpec::UnitChart(_) => render_unit_chart(ds, plan, spec, ctx),
        ChartSpec::TimeSeries(_) => render_time_series(ds, plan, spec, ctx),
    }
}

/// Formats a number for legends: up to 4 significant digits, no trailing zeros.
pub(crate) fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).clamp(0, 12) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_shapes() {
        let spec: ChartSpec = serde_json::from_str(
            r#"{"template":"unit_chart","group_by":"g","series":[{"op":"sum","field":"n"}],"unit_value":"auto"}"#,
        )
        .unwrap();
        let ChartSpec::UnitChart(p) = &spec else { panic!() };
        assert_eq!(p.unit_value, UnitValue::Auto);
        assert_eq!(p.max_units_per_row, 20);
        let spec: ChartSpec =
            serde_json::from_str(r#"{"template":"time_series","time_field":"year","value_field":"v","window":10}"#)
                .unwrap();
        let ChartSpec::TimeSeries(p) = &spec else { panic!() };
        assert_eq!(p.aggregation, AggOp::Mean);
        let back: ChartSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let fixed: UnitValue = serde_json::from_str("5").unwrap();
        assert_eq!(fixed, UnitValue::Fixed(5.0));
    }

    #[test]
    fn legend_numbers() {
        assert_eq!(format_number(0.75), "0.75");
        assert_eq!(format_number(1234.5678), "1235");
        assert_eq!(format_number(-0.00012), "-0.00012");
        assert_eq!(format_number(20.0), "20");
    }
}
