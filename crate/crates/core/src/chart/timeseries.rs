//! Windowed time series rendered as a single line of palette glyphs.

use super::{
    format_number, ChartError, ChartSpec, EncodingPlan, LegendEntry, RenderContext, RenderedChart, DEFAULT_PALETTE,
};
use crate::recommender::{bin_value, OrdinalPalette, PaletteKind};
use crate::tabular::{window_series, Dataset};

fn level_bounds(palette: &OrdinalPalette, min: f64, max: f64, midpoint: f64) -> (f64, f64) {
    match palette.kind {
        PaletteKind::Sequential => (min, max),
        PaletteKind::Diverging => {
            let r = (min - midpoint).abs().max((max - midpoint).abs());
            (midpoint - r, midpoint + r)
        }
    }
}

/// Renders one glyph per window, chronologically.
///
/// Window aggregates are binned against the min and max of the non-missing
/// aggregates. Windows without data show the placeholder. A constant series
/// maps every window to the lowest level and says so in the legend.
pub fn render_time_series(
    ds: &Dataset,
    plan: &EncodingPlan,
    spec: &ChartSpec,
    ctx: &RenderContext,
) -> Result<RenderedChart, ChartError> {
    let ChartSpec::TimeSeries(params) = spec else {
        return Err(ChartError::InvalidSpec("expected a time_series spec".into()));
    };
    spec.validate(ds, ctx.palettes)?;
    let choice = plan.numeric_palette.get(&params.value_field);
    let palette_name = params
        .palette
        .as_deref()
        .or(choice.map(|c| c.palette.as_str()))
        .unwrap_or(DEFAULT_PALETTE);
    let palette = ctx
        .palettes
        .iter()
        .find(|p| p.name == palette_name)
        .ok_or_else(|| ChartError::UnknownPalette(palette_name.to_string()))?;
    let midpoint = choice.and_then(|c| c.midpoint).unwrap_or(0.0);

    let windows = window_series(
        ds,
        &params.time_field,
        &params.value_field,
        params.window,
        params.aggregation,
    )?;
    if windows.is_empty() {
        return Err(ChartError::NoWindows);
    }
    let present: Vec<f64> = windows.iter().filter_map(|w| w.value).collect();
    let min = present.iter().copied().fold(f64::INFINITY, f64::min);
    let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let degenerate = !present.is_empty() && min == max;

    let placeholder = &ctx.placeholder.placeholder_emoji_id;
    let mut line = String::new();
    for w in &windows {
        let id = match w.value {
            None => placeholder,
            Some(_) if degenerate => &palette.levels[0],
            Some(v) => {
                &palette.levels[bin_value(v, min, max, palette, Some(midpoint)).expect("finite, non-degenerate")]
            }
        };
        line.push_str(&ctx.glyph(id)?);
    }
    let mut text = line;
    text.push('\n');
    if plan.show_labels {
        let first = windows[0].start.to_string();
        match windows.last().filter(|_| windows.len() > 1) {
            Some(last) => text.push_str(&format!("{first} {}\n", last.start)),
            None => text.push_str(&format!("{first}\n")),
        }
    }

    let mut legend: Vec<LegendEntry> = Vec::new();
    let field = &params.value_field;
    if degenerate {
        legend.push(ctx.legend(
            &palette.levels[0],
            format!(
                "warning: constant series; every window maps to the lowest level ({field} = {})",
                format_number(min)
            ),
        )?);
    } else if !present.is_empty() {
        let (lo, hi) = level_bounds(palette, min, max, midpoint);
        let k = palette.len();
        for (i, id) in palette.levels.iter().enumerate() {
            let a = lo + (hi - lo) * i as f64 / k as f64;
            let b = lo + (hi - lo) * (i + 1) as f64 / k as f64;
            let close = if i + 1 == k { "]" } else { ")" };
            legend.push(ctx.legend(
                id,
                format!("{field} in [{}, {}{close}", format_number(a), format_number(b)),
            )?);
        }
    }
    if windows.iter().any(|w| w.value.is_none()) {
        legend.push(ctx.legend(placeholder, "no data")?);
    }
    Ok(RenderedChart { text, legend })
}
