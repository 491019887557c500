//! Ranked emoji recommendations for field names and category values.

mod palette;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{cosine, phrase_vector, EmbeddingTable};
use crate::lexicon::Lexicon;

pub use palette::{
    bin_value, builtin_palettes, parse_palettes, BinError, OrdinalPalette, PaletteError, PaletteKind, BUILTIN_PALETTES,
};

/// Default neutral glyph for fields and values without a recommendation.
pub const DEFAULT_PLACEHOLDER: &str = "white_circle";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub emoji_id: String,
    /// Cosine similarity between the phrase and the emoji vector.
    pub score: f64,
    /// 1-based position in the ranking.
    pub rank: usize,
}

#[derive(Debug, Error)]
#[error("placeholder emoji {0:?} is not in the lexicon")]
pub struct UnknownPlaceholder(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceholderPolicy {
    pub placeholder_emoji_id: String,
}

impl PlaceholderPolicy {
    pub fn new(lexicon: &Lexicon, id: impl Into<String>) -> Result<Self, UnknownPlaceholder> {
        let id = id.into();
        if !lexicon.contains(&id) {
            return Err(UnknownPlaceholder(id));
        }
        Ok(Self {
            placeholder_emoji_id: id,
        })
    }

    /// The default placeholder, checked against `lexicon`.
    pub fn default_for(lexicon: &Lexicon) -> Result<Self, UnknownPlaceholder> {
        Self::new(lexicon, DEFAULT_PLACEHOLDER)
    }
}

/// Orders by descending score, then ascending id.
pub fn ranking_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(b.0))
}

/// Top-`k` emojis for `text` by cosine similarity.
///
/// Returns an empty list when no token of `text` is in the vocabulary.
/// Emojis missing from `lexicon` are never returned.
pub fn recommend(table: &EmbeddingTable, lexicon: &Lexicon, text: &str, k: usize) -> Vec<Recommendation> {
    let Some(query) = phrase_vector(table, text) else {
        return Vec::new();
    };
    let mut scored: Vec<(&str, f64)> = table
        .emoji_vectors
        .iter()
        .filter(|(id, _)| lexicon.contains(id))
        .filter_map(|(id, v)| cosine(&query, v).ok().map(|s| (id.as_str(), s)))
        .collect();
    let k = k.min(scored.len());
    if k == 0 {
        return Vec::new();
    }
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, |a, b| ranking_order(*a, *b));
        scored.truncate(k);
    }
    scored.sort_unstable_by(|a, b| ranking_order(*a, *b));
    scored
        .into_iter()
        .enumerate()
        .map(|(i, (id, score))| Recommendation {
            emoji_id: id.to_string(),
            score,
            rank: i + 1,
        })
        .collect()
}

/// The top recommendation, or the placeholder when there is none.
pub fn recommend_or_placeholder(
    table: &EmbeddingTable,
    lexicon: &Lexicon,
    text: &str,
    policy: &PlaceholderPolicy,
) -> String {
    recommend(table, lexicon, text, 1)
        .into_iter()
        .next()
        .map(|r| r.emoji_id)
        .unwrap_or_else(|| policy.placeholder_emoji_id.clone())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::embedding::TokenVectors;
    use crate::lexicon::EmojiEntry;

    fn lexicon() -> Lexicon {
        let entries = [
            ("droplet", "💧"),
            ("fire", "🔥"),
            ("wave", "🌊"),
            ("white_circle", "⚪"),
            ("tie", "👔"),
        ]
        .iter()
        .map(|(id, e)| EmojiEntry {
            id: id.to_string(),
            codepoints: e.chars().collect(),
            name: id.replace('_', " "),
            keywords: vec![],
            description: String::new(),
        })
        .collect();
        Lexicon::new("t", entries).unwrap()
    }

    fn table() -> EmbeddingTable {
        let mut tokens = TokenVectors::new();
        tokens.insert("water".into(), vec![1.0, 0.1]);
        tokens.insert("heat".into(), vec![-1.0, 0.2]);
        let mut emojis = BTreeMap::new();
        emojis.insert("droplet".into(), vec![2.0, 0.0]);
        emojis.insert("wave".into(), vec![1.0, 0.5]);
        emojis.insert("fire".into(), vec![-1.0, 0.0]);
        // Same direction as droplet: ties break on id.
        emojis.insert("tie".into(), vec![4.0, 0.0]);
        // Unknown to the lexicon: never recommended.
        emojis.insert("ghost".into(), vec![1.0, 0.1]);
        EmbeddingTable {
            dimension: 2,
            token_vectors: tokens,
            emoji_vectors: emojis,
            config: None,
            lexicon_version: "t".into(),
        }
    }

    #[test]
    fn ranks_by_score_then_id() {
        let recs = recommend(&table(), &lexicon(), "water", 10);
        let ids: Vec<_> = recs.iter().map(|r| r.emoji_id.as_str()).collect();
        assert_eq!(ids, ["droplet", "tie", "wave", "fire"]);
        assert_eq!(recs.iter().map(|r| r.rank).collect::<Vec<_>>(), [1, 2, 3, 4]);
        assert!(recs.windows(2).all(|w| w[0].score >= w[1].score));
        assert_eq!(recs[0].score, recs[1].score);
        let top2 = recommend(&table(), &lexicon(), "water", 2);
        assert_eq!(top2, recs[..2].to_vec());
    }

    #[test]
    fn empty_for_unknown_text() {
        assert!(recommend(&table(), &lexicon(), "xqzt", 3).is_empty());
        assert!(recommend(&table(), &lexicon(), "", 3).is_empty());
    }

    #[test]
    fn placeholder_fallback() {
        let lex = lexicon();
        let policy = PlaceholderPolicy::default_for(&lex).unwrap();
        assert_eq!(
            recommend_or_placeholder(&table(), &lex, "xqzt", &policy),
            "white_circle"
        );
        assert_eq!(recommend_or_placeholder(&table(), &lex, "", &policy), "white_circle");
        assert_eq!(recommend_or_placeholder(&table(), &lex, "heat", &policy), "fire");
        assert!(PlaceholderPolicy::new(&lex, "nope").is_err());
    }
}
