//! Word embeddings trained on emoji descriptions.
//!
//! The corpus has one token sequence per emoji (name, keywords, description).
//! Token vectors come from skip-gram training with negative sampling; each
//! emoji is represented by the mean of its in-vocabulary corpus tokens.

mod io;
mod tokenize;
mod train;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{EmojiEntry, Lexicon};

pub use io::{load_table, parse_table, save_table, write_table};
pub use tokenize::tokenize;
pub use train::train;

/// Dense vector of `f64` components.
pub type Vector = Vec<f64>;

/// Token to vector map, ordered by token.
pub type TokenVectors = BTreeMap<String, Vector>;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("no trainable tokens")]
    NoTrainableTokens,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("zero-magnitude vector")]
    ZeroMagnitude,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("missing header")]
    MissingHeader,
    #[error("unsupported embedding file: {0}")]
    UnsupportedFormat(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("truncated file: expected {expected} {kind} rows, found {found}")]
    Truncated {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Skip-gram training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dimension: usize,
    /// Maximum context radius.
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate_initial: f64,
    pub min_token_count: usize,
    pub seed: u64,
    /// Frequent-token subsampling threshold; 0 disables subsampling.
    pub subsample_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dimension: 64,
            window: 5,
            negative_samples: 5,
            epochs: 15,
            learning_rate_initial: 0.025,
            min_token_count: 2,
            seed: 42,
            subsample_threshold: 1e-3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let bad = |m: &str| Err(EmbeddingError::InvalidConfig(m.to_string()));
        if self.dimension < 2 {
            return bad("dimension must be at least 2");
        }
        if self.window < 1 {
            return bad("window must be at least 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if self.negative_samples < 1 {
            return bad("negative_samples must be at least 1");
        }
        if self.min_token_count < 1 {
            return bad("min_token_count must be at least 1");
        }
        if !(self.learning_rate_initial.is_finite() && self.learning_rate_initial > 0.0) {
            return bad("learning_rate_initial must be positive");
        }
        if !(self.subsample_threshold.is_finite() && self.subsample_threshold >= 0.0) {
            return bad("subsample_threshold must be non-negative");
        }
        Ok(())
    }
}

/// Trained token vectors plus one vector per covered emoji.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub dimension: usize,
    pub token_vectors: TokenVectors,
    pub emoji_vectors: BTreeMap<String, Vector>,
    /// Absent when the table was loaded from a file without a config line.
    pub config: Option<TrainConfig>,
    pub lexicon_version: String,
}

impl EmbeddingTable {
    pub fn token(&self, token: &str) -> Option<&[f64]> {
        self.token_vectors.get(token).map(Vec::as_slice)
    }

    pub fn emoji(&self, id: &str) -> Option<&[f64]> {
        self.emoji_vectors.get(id).map(Vec::as_slice)
    }
}

/// Token sequence for one entry: name tokens, keyword tokens, description tokens.
pub fn entry_tokens(entry: &EmojiEntry) -> Vec<String> {
    let mut tokens = tokenize(&entry.name);
    for keyword in &entry.keywords {
        tokens.extend(tokenize(keyword));
    }
    tokens.extend(tokenize(&entry.description));
    tokens
}

/// One token sequence per entry with at least one token, in lexicon order.
pub fn build_corpus(lexicon: &Lexicon) -> Vec<Vec<String>> {
    lexicon
        .entries()
        .iter()
        .map(entry_tokens)
        .filter(|seq| !seq.is_empty())
        .collect()
}

/// Mean of the in-vocabulary vectors among `tokens`.
///
/// Summation runs over the sorted token multiset so that the result does
/// not depend on token order.
fn mean_vector<'a, I>(vectors: &TokenVectors, dimension: usize, tokens: I) -> Option<Vector>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut hits: Vec<(&str, &Vector)> = tokens
        .into_iter()
        .filter_map(|t| vectors.get_key_value(t).map(|(k, v)| (k.as_str(), v)))
        .collect();
    if hits.is_empty() {
        return None;
    }
    hits.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let mut sum = vec![0.0; dimension];
    for (_, v) in &hits {
        for (s, x) in sum.iter_mut().zip(v.iter()) {
            *s += x;
        }
    }
    let n = hits.len() as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Some(sum)
}

fn is_zero(v: &[f64]) -> bool {
    v.iter().all(|&x| x == 0.0)
}

/// Bundles token vectors with per-emoji mean vectors.
///
/// Emojis without any in-vocabulary corpus token are left out.
pub fn derive_emoji_vectors(lexicon: &Lexicon, token_vectors: TokenVectors, config: TrainConfig) -> EmbeddingTable {
    let dimension = token_vectors.values().next().map(Vec::len).unwrap_or(config.dimension);
    let mut emoji_vectors = BTreeMap::new();
    for entry in lexicon.entries() {
        let tokens = entry_tokens(entry);
        if let Some(v) = mean_vector(&token_vectors, dimension, tokens.iter().map(String::as_str)) {
            if !is_zero(&v) {
                emoji_vectors.insert(entry.id.clone(), v);
            }
        }
    }
    EmbeddingTable {
        dimension,
        token_vectors,
        emoji_vectors,
        config: Some(config),
        lexicon_version: lexicon.version().to_string(),
    }
}

/// Mean vector of the in-vocabulary tokens of `text`, or `None` when no
/// token is known.
pub fn phrase_vector(table: &EmbeddingTable, text: &str) -> Option<Vector> {
    let tokens = tokenize(text);
    mean_vector(&table.token_vectors, table.dimension, tokens.iter().map(String::as_str))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::DimensionMismatch(a.len(), b.len()));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(EmbeddingError::ZeroMagnitude);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Runs corpus extraction, training and emoji vector derivation.
pub fn train_table(lexicon: &Lexicon, config: TrainConfig) -> Result<EmbeddingTable, EmbeddingError> {
    let corpus = build_corpus(lexicon);
    let vectors = train(&corpus, &config)?;
    Ok(derive_emoji_vectors(lexicon, vectors, config))
}
