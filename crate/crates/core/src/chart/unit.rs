//! Stacked-bar unit charts: one row per group, one glyph per unit.

use super::{format_number, ChartError, ChartSpec, EncodingPlan, LegendEntry, RenderContext, RenderedChart, UnitValue};
use crate::tabular::{group_aggregate, AggOp, Dataset};

// Guards round-half-up against quotients like 0.15 / 0.1 = 1.4999999999999998.
const HALF_UP_SLACK: f64 = 1e-9;

/// Glyphs for one aggregate: round-half-up of `aggregate / unit`, except
/// that any positive aggregate shows at least one glyph.
pub fn glyph_count(aggregate: f64, unit: f64) -> usize {
    if aggregate <= 0.0 {
        return 0;
    }
    let ratio = aggregate / unit;
    let n = (ratio + 0.5 + HALF_UP_SLACK * ratio.max(1.0)).floor() as usize;
    n.max(1)
}

/// `max_total / max_units` rounded up to one significant digit; 1 when the
/// chart is empty.
pub fn auto_unit_value(max_total: f64, max_units: usize) -> f64 {
    let raw = max_total / max_units.max(1) as f64;
    if !(raw.is_finite() && raw > 0.0) {
        return 1.0;
    }
    let exponent = raw.log10().floor() as i32;
    let mantissa = if exponent >= 0 {
        raw / 10f64.powi(exponent)
    } else {
        raw * 10f64.powi(-exponent)
    };
    let nearest = mantissa.round();
    let digit = if (mantissa - nearest).abs() < 1e-9 {
        nearest
    } else {
        mantissa.ceil()
    };
    if exponent >= 0 {
        digit * 10f64.powi(exponent)
    } else {
        digit / 10f64.powi(-exponent)
    }
}

/// Renders a unit chart.
///
/// Rows follow group first-appearance order. Each row is the group's value
/// emoji, the group value when labels are on, then one glyph run per series
/// with series ordered by the plan's field order.
pub fn render_unit_chart(
    ds: &Dataset,
    plan: &EncodingPlan,
    spec: &ChartSpec,
    ctx: &RenderContext,
) -> Result<RenderedChart, ChartError> {
    let ChartSpec::UnitChart(params) = spec else {
        return Err(ChartError::InvalidSpec("expected a unit_chart spec".into()));
    };
    spec.validate(ds, ctx.palettes)?;

    let mut series: Vec<_> = params.series.iter().collect();
    series.sort_by_key(|agg| plan.order_of(&agg.field));

    let mut columns = Vec::with_capacity(series.len());
    for agg in &series {
        let emoji = plan
            .field_emoji
            .get(&agg.field)
            .ok_or_else(|| ChartError::UnassignedField(agg.field.clone()))?;
        let rows = group_aggregate(ds, &[&params.group_by], agg)?;
        for row in &rows {
            if let Some(v) = row.value.filter(|v| *v < 0.0) {
                return Err(ChartError::NegativeAggregate {
                    field: agg.field.clone(),
                    value: v,
                });
            }
        }
        columns.push((agg, emoji, ctx.glyph(emoji)?, rows));
    }
    let groups: Vec<Option<String>> = columns[0].3.iter().map(|r| r.key[0].clone()).collect();
    if groups.is_empty() {
        return Err(ChartError::EmptyChart);
    }

    let unit = match params.unit_value {
        UnitValue::Fixed(u) => u,
        UnitValue::Auto => {
            let max_total = (0..groups.len())
                .map(|g| columns.iter().filter_map(|c| c.3[g].value).sum::<f64>())
                .fold(0.0, f64::max);
            auto_unit_value(max_total, params.max_units_per_row)
        }
    };

    let mut text = String::new();
    let mut legend: Vec<LegendEntry> = Vec::new();
    for (g, key) in groups.iter().enumerate() {
        let value_emoji = key
            .as_deref()
            .map(|v| {
                plan.value_emoji(&params.group_by, v)
                    .ok_or_else(|| ChartError::UnassignedValue {
                        field: params.group_by.clone(),
                        value: v.to_string(),
                    })
            })
            .transpose()?
            .unwrap_or(&ctx.placeholder.placeholder_emoji_id);
        let mut parts = vec![ctx.glyph(value_emoji)?];
        if plan.show_labels {
            if let Some(v) = key {
                parts.push(v.clone());
            }
        }
        let runs: String = columns
            .iter()
            .map(|(_, _, glyph, rows)| glyph.repeat(rows[g].value.map_or(0, |a| glyph_count(a, unit))))
            .collect();
        if !runs.is_empty() {
            parts.push(runs);
        }
        text.push_str(&parts.join(" "));
        text.push('\n');
        let meaning = match key {
            Some(v) => format!("{} = {v}", params.group_by),
            None => format!("{} missing", params.group_by),
        };
        legend.push(ctx.legend(value_emoji, meaning)?);
    }
    let unit_text = format_number(unit);
    let series_legend = columns
        .iter()
        .map(|(agg, emoji, _, _)| {
            let mut meaning = format!("1 glyph = {unit_text} {}", agg.field);
            if agg.op != AggOp::Sum {
                meaning.push_str(&format!(" ({})", agg.op));
            }
            ctx.legend(emoji, meaning)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut all = series_legend;
    all.extend(legend);
    Ok(RenderedChart { text, legend: all })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{render, UnitChartParams};
    use crate::lexicon::Lexicon;
    use crate::recommender::{builtin_palettes, PlaceholderPolicy};
    use crate::tabular::{ingest_csv, Aggregation};
    use proptest::prelude::*;

    fn lexicon() -> Lexicon {
        let text = [
            ("white_circle", "⚪"),
            ("x", "❌"),
            ("y", "🟨"),
            ("a", "🅰️"),
            ("b", "🅱️"),
            ("g", "🏷️"),
        ]
        .iter()
        .map(|(id, e)| format!(r#"{{"id":"{id}","emoji":"{e}","name":"{id}","keywords":[]}}"#))
        .collect::<Vec<_>>()
        .join("\n");
        Lexicon::parse(&text, "t").unwrap()
    }

    fn plan(labels: bool) -> EncodingPlan {
        serde_json::from_value(serde_json::json!({
            "field_emoji": {"g": "g", "n": "x", "m": "y"},
            "value_emoji": {"g": {"A": "a", "B": "b"}},
            "numeric_palette": {},
            "field_order": ["g", "n", "m"],
            "show_labels": labels,
        }))
        .unwrap()
    }

    fn spec(series: &[&str], unit: UnitValue) -> ChartSpec {
        ChartSpec::UnitChart(UnitChartParams {
            group_by: "g".into(),
            series: series.iter().map(|f| Aggregation::new(AggOp::Sum, *f)).collect(),
            unit_value: unit,
            max_units_per_row: 20,
        })
    }

    fn draw(csv: &str, plan: &EncodingPlan, spec: &ChartSpec) -> Result<RenderedChart, ChartError> {
        let lex = lexicon();
        let palettes = builtin_palettes();
        let policy = PlaceholderPolicy::default_for(&lex).unwrap();
        let ctx = RenderContext {
            lexicon: &lex,
            palettes: &palettes,
            placeholder: &policy,
        };
        render(&ingest_csv(csv).unwrap(), plan, spec, &ctx)
    }

    #[test]
    fn half_up_rows() {
        let chart = draw(
            "g,n,m\nA,10,0\nA,5,0\nB,7,0\n",
            &plan(true),
            &spec(&["n"], UnitValue::Fixed(5.0)),
        )
        .unwrap();
        assert_eq!(chart.text, "🅰️ A ❌❌❌\n🅱️ B ❌\n");
        assert_eq!(chart.legend[0].meaning, "1 glyph = 5 n");
        let plain = draw(
            "g,n,m\nA,15,0\nB,7,0\n",
            &plan(false),
            &spec(&["n"], UnitValue::Fixed(5.0)),
        )
        .unwrap();
        assert_eq!(plain.text, "🅰️ ❌❌❌\n🅱️ ❌\n");
    }

    #[test]
    fn zero_and_tiny_aggregates() {
        let chart = draw(
            "g,n,m\nA,0,0\nB,1,0\n",
            &plan(false),
            &spec(&["n"], UnitValue::Fixed(5.0)),
        )
        .unwrap();
        assert_eq!(chart.text, "🅰️\n🅱️ ❌\n");
    }

    #[test]
    fn stacked_series_follow_field_order() {
        let csv = "g,n,m\nA,10,5\nB,5,10\n";
        let p = plan(false);
        let chart = draw(csv, &p, &spec(&["m", "n"], UnitValue::Fixed(5.0))).unwrap();
        assert_eq!(chart.text, "🅰️ ❌❌🟨\n🅱️ ❌🟨🟨\n");
        let swapped = p.reorder_fields(&["g", "m", "n"]).unwrap();
        let chart = draw(csv, &swapped, &spec(&["m", "n"], UnitValue::Fixed(5.0))).unwrap();
        assert_eq!(chart.text, "🅰️ 🟨❌❌\n🅱️ 🟨🟨❌\n");
    }

    #[test]
    fn error_paths() {
        let header_only = draw("g,n,m\n", &plan(false), &spec(&["n"], UnitValue::Auto));
        // Header-only columns infer as categorical, so the spec is rejected first.
        assert!(header_only.is_err());
        let negative = draw(
            "g,n,m\nA,-3,0\nB,1,0\n",
            &plan(false),
            &spec(&["n"], UnitValue::Fixed(1.0)),
        );
        assert!(matches!(negative, Err(ChartError::NegativeAggregate { .. })));
        let bad_unit = draw(
            "g,n,m\nA,3,0\nB,1,0\n",
            &plan(false),
            &spec(&["n"], UnitValue::Fixed(0.0)),
        );
        assert!(matches!(bad_unit, Err(ChartError::InvalidSpec(_))));
    }

    #[test]
    fn auto_unit_rounds_up_one_digit() {
        assert_eq!(auto_unit_value(15.0, 20), 0.8);
        assert_eq!(auto_unit_value(14.0, 20), 0.7);
        assert_eq!(auto_unit_value(1234.0, 20), 70.0);
        assert_eq!(auto_unit_value(200.0, 20), 10.0);
        assert_eq!(auto_unit_value(0.0, 20), 1.0);
        let chart = draw("g,n,m\nA,15,0\nB,7,0\n", &plan(false), &spec(&["n"], UnitValue::Auto)).unwrap();
        // 15 / 0.8 = 18.75 -> 19 glyphs; 7 / 0.8 = 8.75 -> 9 glyphs.
        assert_eq!(chart.text, format!("🅰️ {}\n🅱️ {}\n", "❌".repeat(19), "❌".repeat(9)));
    }

    #[test]
    fn glyph_count_rules() {
        assert_eq!(glyph_count(0.0, 5.0), 0);
        assert_eq!(glyph_count(0.1, 5.0), 1);
        assert_eq!(glyph_count(7.0, 5.0), 1);
        assert_eq!(glyph_count(7.5, 5.0), 2);
        assert_eq!(glyph_count(0.15, 0.1), 2);
    }

    proptest! {
        #[test]
        fn glyph_count_is_monotone(a in 0.0f64..1e4, b in 0.0f64..1e4, unit in 0.01f64..100.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(glyph_count(lo, unit) <= glyph_count(hi, unit));
        }

        #[test]
        fn auto_unit_keeps_rows_short(max in 0.001f64..1e7, units in 1usize..50) {
            let u = auto_unit_value(max, units);
            prop_assert!(u >= max / units as f64 * (1.0 - 1e-12));
            prop_assert!(glyph_count(max, u) <= units);
        }
    }
}
