//! Everything a recommendation or render needs, loaded together.

use std::path::Path;

use thiserror::Error;

use crate::chart::{EncodingPlan, RenderContext};
use crate::embedding::{load_table, train_table, EmbeddingError, EmbeddingTable, TrainConfig};
use crate::lexicon::{Lexicon, LexiconError};
use crate::recommender::{
    builtin_palettes, parse_palettes, recommend, OrdinalPalette, PaletteError, PlaceholderPolicy, Recommendation,
    UnknownPlaceholder,
};
use crate::tabular::Dataset;

/// The lexicon shipped with the crate.
pub const BUILTIN_LEXICON: &str = include_str!("../data/lexicon.jsonl");
pub const BUILTIN_LEXICON_VERSION: &str = "builtin-desk";

/// Training config for the shipped lexicon. The corpus is only a few
/// thousand tokens, so it takes more passes than the general default.
pub const BUILTIN_TRAIN_CONFIG: TrainConfig = TrainConfig {
    dimension: 64,
    window: 5,
    negative_samples: 5,
    epochs: 60,
    learning_rate_initial: 0.025,
    min_token_count: 2,
    seed: 42,
    subsample_threshold: 1e-3,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("embeddings: {0}")]
    Embedding(#[from] EmbeddingError),
    #[error("palettes: {0}")]
    Palette(#[from] PaletteError),
    #[error(transparent)]
    Placeholder(#[from] UnknownPlaceholder),
    #[error("embeddings reference emoji {0:?}, which is not in the lexicon")]
    ForeignEmoji(String),
}

pub fn builtin_lexicon() -> Lexicon {
    Lexicon::parse(BUILTIN_LEXICON, BUILTIN_LEXICON_VERSION).expect("built-in lexicon is valid")
}

#[derive(Debug, Clone)]
pub struct Model {
    pub lexicon: Lexicon,
    pub table: EmbeddingTable,
    pub palettes: Vec<OrdinalPalette>,
    pub placeholder: PlaceholderPolicy,
}

impl Model {
    /// Assembles a model, checking that embeddings, palettes and the
    /// placeholder only reference lexicon entries.
    pub fn new(lexicon: Lexicon, table: EmbeddingTable, palettes: Vec<OrdinalPalette>) -> Result<Self, ModelError> {
        if let Some(id) = table.emoji_vectors.keys().find(|id| !lexicon.contains(id)) {
            return Err(ModelError::ForeignEmoji(id.clone()));
        }
        for palette in &palettes {
            palette.validate(Some(&lexicon))?;
        }
        let placeholder = PlaceholderPolicy::default_for(&lexicon)?;
        Ok(Self {
            lexicon,
            table,
            palettes,
            placeholder,
        })
    }

    /// Shipped lexicon and palettes with embeddings trained on the spot
    /// using [`BUILTIN_TRAIN_CONFIG`].
    pub fn builtin() -> Result<Self, ModelError> {
        let lexicon = builtin_lexicon();
        let table = train_table(&lexicon, BUILTIN_TRAIN_CONFIG)?;
        Self::new(lexicon, table, builtin_palettes())
    }

    /// Loads model files, substituting the shipped defaults for any path
    /// that is `None`. Without an embeddings file the table is trained from
    /// the lexicon with [`BUILTIN_TRAIN_CONFIG`].
    pub fn load(
        lexicon: Option<&Path>,
        embeddings: Option<&Path>,
        palettes: Option<&Path>,
    ) -> Result<Self, ModelError> {
        let lexicon = match lexicon {
            Some(p) => Lexicon::load(p)?,
            None => builtin_lexicon(),
        };
        let table = match embeddings {
            Some(p) => load_table(p)?,
            None => train_table(&lexicon, BUILTIN_TRAIN_CONFIG)?,
        };
        let palettes = match palettes {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(PaletteError::from)?;
                parse_palettes(&text, Some(&lexicon))?
            }
            // Shipped palettes a custom lexicon cannot draw are left out.
            None => builtin_palettes()
                .into_iter()
                .filter(|p| p.validate(Some(&lexicon)).is_ok())
                .collect(),
        };
        Self::new(lexicon, table, palettes)
    }

    pub fn context(&self) -> RenderContext<'_> {
        RenderContext {
            lexicon: &self.lexicon,
            palettes: &self.palettes,
            placeholder: &self.placeholder,
        }
    }

    pub fn recommend(&self, text: &str, k: usize) -> Vec<Recommendation> {
        recommend(&self.table, &self.lexicon, text, k)
    }

    /// Every recommendation for `text`, best first.
    pub fn ranking(&self, text: &str) -> Vec<Recommendation> {
        self.recommend(text, usize::MAX)
    }

    pub fn auto_plan(&self, ds: &Dataset) -> EncodingPlan {
        EncodingPlan::auto(ds, &self.table, &self.lexicon, &self.placeholder, &self.palettes)
    }
}
