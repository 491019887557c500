//! Emoji recommendations for tabular data and plain-text emoji charts.
//!
//! The pipeline: load an emoji [`lexicon`], train word [`embedding`]s on its
//! descriptions, [`recommender`] picks emojis for field names and category
//! values, [`tabular`] ingests and aggregates CSV data, and [`chart`] renders
//! unit charts and time series as UTF-8 text.

pub mod chart;
pub mod embedding;
pub mod lexicon;
pub mod model;
pub mod recommender;
pub mod tabular;

pub use chart::{
    render, ChartError, ChartSpec, EncodingPlan, LegendEntry, PaletteChoice, PlanEdit, RenderContext, RenderedChart,
    TimeSeriesParams, UnitChartParams, UnitValue,
};
pub use embedding::{EmbeddingError, EmbeddingTable, TrainConfig};
pub use lexicon::{EmojiEntry, Lexicon, LexiconError};
pub use model::{Model, ModelError};
pub use recommender::{OrdinalPalette, PaletteKind, PlaceholderPolicy, Recommendation};
pub use tabular::{ingest_csv, AggOp, Aggregation, Dataset, Field, FieldKind, TabularError};
