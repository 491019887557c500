//! Ordinal emoji palettes and the value-to-level mapping.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Lexicon;

/// Palette definitions shipped with the crate.
pub const BUILTIN_PALETTES: &str = include_str!("../../data/palettes.jsonl");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaletteKind {
    Sequential,
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalPalette {
    pub name: String,
    pub kind: PaletteKind,
    /// Emoji ids from lowest to highest level.
    pub levels: Vec<String>,
}

#[derive(Debug, Error)]
pub enum PaletteError {
    #[error("line {line}: malformed palette record: {message}")]
    Malformed { line: usize, message: String },
    #[error("palette {name:?}: {message}")]
    Invalid { name: String, message: String },
    #[error("duplicate palette name {0:?}")]
    DuplicateName(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum BinError {
    #[error("degenerate domain")]
    DegenerateDomain,
    #[error("non-finite value")]
    NonFinite,
}

impl OrdinalPalette {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Checks level count, uniqueness, diverging parity and (optionally)
    /// that every level exists in `lexicon`.
    pub fn validate(&self, lexicon: Option<&Lexicon>) -> Result<(), PaletteError> {
        let invalid = |message: String| PaletteError::Invalid {
            name: self.name.clone(),
            message,
        };
        if self.name.trim().is_empty() {
            return Err(invalid("empty name".into()));
        }
        if self.levels.len() < 2 {
            return Err(invalid("needs at least 2 levels".into()));
        }
        let mut seen = HashSet::new();
        for id in &self.levels {
            if !seen.insert(id) {
                return Err(invalid(format!("duplicate level {id:?}")));
            }
            if let Some(lex) = lexicon {
                if !lex.contains(id) {
                    return Err(invalid(format!("unknown emoji id {id:?}")));
                }
            }
        }
        if self.kind == PaletteKind::Diverging && self.levels.len().is_multiple_of(2) {
            return Err(invalid("diverging palettes need an odd number of levels".into()));
        }
        Ok(())
    }
}

/// Parses line-delimited palette records; `#` lines are comments.
pub fn parse_palettes(text: &str, lexicon: Option<&Lexicon>) -> Result<Vec<OrdinalPalette>, PaletteError> {
    let mut palettes: Vec<OrdinalPalette> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let palette: OrdinalPalette = serde_json::from_str(trimmed).map_err(|e| PaletteError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        palette.validate(lexicon)?;
        if palettes.iter().any(|p| p.name == palette.name) {
            return Err(PaletteError::DuplicateName(palette.name));
        }
        palettes.push(palette);
    }
    Ok(palettes)
}

/// The shipped palettes (`emoji-10`, `diverging-3`, ...) in file order.
pub fn builtin_palettes() -> Vec<OrdinalPalette> {
    parse_palettes(BUILTIN_PALETTES, None).expect("built-in palettes are valid")
}

/// Maps `value` to a 0-based level of `palette` using equal-width bins.
///
/// Diverging palettes bin over `[mid - r, mid + r]` where `mid` defaults to 0
/// and `r` is the larger distance from `mid` to either domain end. Values
/// outside the domain clamp to the end levels.
pub fn bin_value(
    value: f64,
    domain_min: f64,
    domain_max: f64,
    palette: &OrdinalPalette,
    midpoint: Option<f64>,
) -> Result<usize, BinError> {
    if !(value.is_finite() && domain_min.is_finite() && domain_max.is_finite()) {
        return Err(BinError::NonFinite);
    }
    if domain_min >= domain_max {
        return Err(BinError::DegenerateDomain);
    }
    let (lo, hi) = match palette.kind {
        PaletteKind::Sequential => (domain_min, domain_max),
        PaletteKind::Diverging => {
            let mid = midpoint.unwrap_or(0.0);
            let r = (domain_min - mid).abs().max((domain_max - mid).abs());
            (mid - r, mid + r)
        }
    };
    Ok(level_index(value, lo, hi, palette.len()))
}

fn level_index(value: f64, lo: f64, hi: f64, k: usize) -> usize {
    let position = (value - lo) / (hi - lo);
    let raw = (k as f64 * position).floor();
    if raw.is_nan() || raw < 0.0 {
        0
    } else {
        (raw as usize).min(k - 1)
    }
}
