//! Emoji metadata corpus: loading, validation, lookup and search.
//!
//! A lexicon file holds one JSON object per line with the fields `id`,
//! `emoji`, `name`, `keywords` and `description`. Lines starting with `#`
//! and blank lines are skipped. Loading is all-or-nothing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while loading a lexicon or querying it.
#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: invalid id {id:?} (expected [a-z0-9_]+)")]
    InvalidId { line: usize, id: String },
    #[error("line {line}: duplicate id {id:?} (first defined on line {first})")]
    DuplicateId { line: usize, id: String, first: usize },
    #[error("line {line}: invalid codepoint sequence for {id:?}: {message}")]
    InvalidCodepoint { line: usize, id: String, message: String },
    #[error("line {line}: duplicate emoji sequence for {id:?} (already used by {other:?})")]
    DuplicateEmoji { line: usize, id: String, other: String },
    #[error("empty query")]
    EmptyQuery,
    #[error("search limit must be positive")]
    ZeroLimit,
}

/// One emoji with the metadata used for training and search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmojiEntry {
    pub id: String,
    pub codepoints: Vec<char>,
    pub name: String,
    pub keywords: Vec<String>,
    pub description: String,
}

impl EmojiEntry {
    /// The literal emoji string.
    pub fn glyph(&self) -> String {
        self.codepoints.iter().collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    emoji: String,
    name: String,
    #[serde(default)]
    keywords: Vec<String>,
    #[serde(default)]
    description: String,
}

/// Validated, immutable emoji catalog.
#[derive(Debug, Clone)]
pub struct Lexicon {
    version: String,
    entries: Vec<EmojiEntry>,
    by_id: HashMap<String, usize>,
    by_glyph: HashMap<String, usize>,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.version == other.version && self.entries == other.entries
    }
}

pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

impl Lexicon {
    /// Builds a lexicon from entries, checking id and codepoint uniqueness.
    ///
    /// Line numbers in errors are 1-based entry positions.
    pub fn new(version: impl Into<String>, entries: Vec<EmojiEntry>) -> Result<Self, LexiconError> {
        let lines: Vec<usize> = (1..=entries.len()).collect();
        Self::build(version.into(), entries, &lines)
    }

    fn build(version: String, entries: Vec<EmojiEntry>, lines: &[usize]) -> Result<Self, LexiconError> {
        let mut by_id = HashMap::with_capacity(entries.len());
        let mut by_glyph = HashMap::with_capacity(entries.len());
        for (idx, entry) in entries.iter().enumerate() {
            let line = lines[idx];
            if !is_valid_id(&entry.id) {
                return Err(LexiconError::InvalidId {
                    line,
                    id: entry.id.clone(),
                });
            }
            validate_codepoints(&entry.codepoints).map_err(|message| LexiconError::InvalidCodepoint {
                line,
                id: entry.id.clone(),
                message,
            })?;
            if let Some(&first) = by_id.get(&entry.id) {
                return Err(LexiconError::DuplicateId {
                    line,
                    id: entry.id.clone(),
                    first: lines[first],
                });
            }
            let glyph = entry.glyph();
            if let Some(&other) = by_glyph.get(&glyph) {
                let other: &EmojiEntry = &entries[other];
                return Err(LexiconError::DuplicateEmoji {
                    line,
                    id: entry.id.clone(),
                    other: other.id.clone(),
                });
            }
            by_id.insert(entry.id.clone(), idx);
            by_glyph.insert(glyph, idx);
        }
        Ok(Self {
            version,
            entries,
            by_id,
            by_glyph,
        })
    }

    /// Parses lexicon text. `version` is recorded verbatim.
    pub fn parse(text: &str, version: impl Into<String>) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let record: Record = serde_json::from_str(trimmed).map_err(|e| LexiconError::Malformed {
                line,
                message: e.to_string(),
            })?;
            entries.push(EmojiEntry {
                id: record.id,
                codepoints: record.emoji.chars().collect(),
                name: record.name,
                keywords: record
                    .keywords
                    .iter()
                    .map(|k| k.trim().to_lowercase())
                    .filter(|k| !k.is_empty())
                    .collect(),
                description: record.description,
            });
            lines.push(line);
        }
        Self::build(version.into(), entries, &lines)
    }

    /// Loads a lexicon file; the version string is the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let version = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(&text, version)
    }

    /// Serializes to the line-delimited lexicon format.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            let record = Record {
                id: entry.id.clone(),
                emoji: entry.glyph(),
                name: entry.name.clone(),
                keywords: entry.keywords.clone(),
                description: entry.description.clone(),
            };
            // Serializing plain strings cannot fail.
            let _ = writeln!(out, "{}", serde_json::to_string(&record).expect("record serializes"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
        std::fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn entries(&self) -> &[EmojiEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&EmojiEntry> {
        self.by_id.get(id).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// Looks up an entry by its exact codepoint sequence.
    pub fn get_by_codepoints(&self, codepoints: &[char]) -> Option<&EmojiEntry> {
        let glyph: String = codepoints.iter().collect();
        self.by_glyph.get(&glyph).map(|&i| &self.entries[i])
    }

    /// The glyph for an id, if known.
    pub fn glyph(&self, id: &str) -> Option<String> {
        self.get(id).map(EmojiEntry::glyph)
    }

    /// Case-insensitive search over names and keywords.
    ///
    /// Results are tiered: exact name, name prefix, exact keyword, then any
    /// substring of the name or a keyword. Ties within a tier sort by id.
    pub fn search(&self, query: &str, limit: usize) -> Result<Vec<&EmojiEntry>, LexiconError> {
        let needle = query.trim().to_lowercase();
        if needle.is_empty() {
            return Err(LexiconError::EmptyQuery);
        }
        if limit == 0 {
            return Err(LexiconError::ZeroLimit);
        }
        let mut hits: Vec<(u8, &EmojiEntry)> = self
            .entries
            .iter()
            .filter_map(|entry| match_tier(entry, &needle).map(|tier| (tier, entry)))
            .collect();
        hits.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
        Ok(hits.into_iter().take(limit).map(|(_, e)| e).collect())
    }
}

fn match_tier(entry: &EmojiEntry, needle: &str) -> Option<u8> {
    let name = entry.name.to_lowercase();
    if name == needle {
        return Some(0);
    }
    if name.starts_with(needle) {
        return Some(1);
    }
    let keywords: Vec<String> = entry.keywords.iter().map(|k| k.to_lowercase()).collect();
    if keywords.iter().any(|k| k == needle) {
        return Some(2);
    }
    if name.contains(needle) || keywords.iter().any(|k| k.contains(needle)) {
        return Some(3);
    }
    None
}

fn validate_codepoints(codepoints: &[char]) -> Result<(), String> {
    if codepoints.is_empty() {
        return Err("empty emoji".to_string());
    }
    // `char` already excludes surrogates; reject controls and noncharacters,
    // which never form a renderable emoji.
    for &c in codepoints {
        let v = c as u32;
        if c.is_control() || (0xFDD0..=0xFDEF).contains(&v) || (v & 0xFFFE) == 0xFFFE {
            return Err(format!("U+{v:04X} is not a renderable scalar value"));
        }
    }
    if codepoints.iter().all(|c| c.is_whitespace()) {
        return Err("emoji renders as whitespace".to_string());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, emoji: &str, name: &str, keywords: &[&str]) -> String {
        serde_json::json!({
            "id": id, "emoji": emoji, "name": name, "keywords": keywords, "description": ""
        })
        .to_string()
    }

    fn sample() -> Lexicon {
        let text = [
            line("droplet", "💧", "droplet", &["water", "drop"]),
            line("sweat_droplets", "💦", "sweat droplets", &["water", "splash"]),
            line("fire", "🔥", "fire", &["flame", "hot"]),
        ]
        .join("\n");
        Lexicon::parse(&text, "test").unwrap()
    }

    #[test]
    fn parses_three_entries() {
        let lex = sample();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.get("fire").unwrap().glyph(), "🔥");
        let by_cp = lex.get_by_codepoints(&['💧']).unwrap();
        assert_eq!(by_cp, lex.get("droplet").unwrap());
    }

    #[test]
    fn duplicate_id_names_later_line() {
        let mut lines = vec!["# header".to_string(), line("droplet", "💧", "droplet", &[])];
        for (i, e) in ["🔥", "🌊", "☔", "❄️"].iter().enumerate() {
            lines.push(line(&format!("e{i}"), e, "x", &[]));
        }
        lines.push(line("droplet", "💦", "droplet again", &[]));
        let err = Lexicon::parse(&lines.join("\n"), "t").unwrap_err();
        match err {
            LexiconError::DuplicateId { line, first, .. } => {
                assert_eq!(line, 7);
                assert_eq!(first, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err_text(&lines.join("\n")).contains("line 7"));
    }

    fn err_text(text: &str) -> String {
        Lexicon::parse(text, "t").unwrap_err().to_string()
    }

    #[test]
    fn rejects_bad_records() {
        assert!(err_text("{not json").contains("line 1"));
        assert!(err_text(&line("Bad-Id", "💧", "x", &[])).contains("invalid id"));
        assert!(err_text(&line("empty", "", "x", &[])).contains("invalid codepoint"));
        assert!(err_text(&line("ctrl", "\u{7}", "x", &[])).contains("invalid codepoint"));
        let dup = [line("a", "💧", "a", &[]), line("b", "💧", "b", &[])].join("\n");
        assert!(err_text(&dup).contains("duplicate emoji"));
    }

    #[test]
    fn search_tiers() {
        let lex = sample();
        let ids: Vec<_> = lex
            .search("droplet", 10)
            .unwrap()
            .iter()
            .map(|e| e.id.as_str())
            .collect();
        assert_eq!(ids, ["droplet", "sweat_droplets"]);
        let ids: Vec<_> = lex.search("WATER", 10).unwrap().iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["droplet", "sweat_droplets"]);
        assert!(lex.search("ZZZZ", 5).unwrap().is_empty());
        assert!(matches!(lex.search("  ", 5), Err(LexiconError::EmptyQuery)));
        assert_eq!(lex.search("", 5).unwrap_err().to_string(), "empty query");
        assert_eq!(lex.search("o", 1).unwrap().len(), 1);
    }

    #[test]
    fn search_prefers_name_prefix_over_keyword() {
        let text = [
            line("hot_face", "🥵", "hot face", &[]),
            line("fire", "🔥", "fire", &["hot"]),
            line("shot", "💉", "syringe", &["shots"]),
            line("hot", "🌶️", "hot", &[]),
        ]
        .join("\n");
        let lex = Lexicon::parse(&text, "t").unwrap();
        let ids: Vec<_> = lex.search("hot", 10).unwrap().iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["hot", "hot_face", "fire", "shot"]);
    }

    #[test]
    fn jsonl_round_trip() {
        let lex = sample();
        let again = Lexicon::parse(&lex.to_jsonl(), "test").unwrap();
        assert_eq!(lex, again);
    }
}
