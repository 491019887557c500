//! Text serialization of [`EmbeddingTable`].
//!
//! ```text
//! emoji-encoder-embeddings v1 <dimension> <token_count> <emoji_count> <lexicon_version>
//! c dimension=64 window=5 ...        (optional training config)
//! t <token> <c1> ... <cD>
//! e <id> <c1> ... <cD>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{EmbeddingError, EmbeddingTable, TrainConfig, Vector};

const MAGIC: &str = "emoji-encoder-embeddings";
const FORMAT_VERSION: &str = "v1";

/// Renders a table in the embedding file format.
pub fn write_table(table: &EmbeddingTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{MAGIC} {FORMAT_VERSION} {} {} {} {}",
        table.dimension,
        table.token_vectors.len(),
        table.emoji_vectors.len(),
        table.lexicon_version
    );
    if let Some(c) = &table.config {
        let _ = writeln!(
            out,
            "c dimension={} window={} negative_samples={} epochs={} learning_rate_initial={:?} \
             min_token_count={} seed={} subsample_threshold={:?}",
            c.dimension,
            c.window,
            c.negative_samples,
            c.epochs,
            c.learning_rate_initial,
            c.min_token_count,
            c.seed,
            c.subsample_threshold
        );
    }
    for (tag, map) in [("t", &table.token_vectors), ("e", &table.emoji_vectors)] {
        for (key, vector) in map {
            out.push_str(tag);
            out.push(' ');
            out.push_str(key);
            for x in vector {
                // Debug formatting of f64 is the shortest string that parses back exactly.
                let _ = write!(out, " {x:?}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn save_table(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<(), EmbeddingError> {
    std::fs::write(path, write_table(table))?;
    Ok(())
}

pub fn load_table(path: impl AsRef<Path>) -> Result<EmbeddingTable, EmbeddingError> {
    parse_table(&std::fs::read_to_string(path)?)
}

fn malformed(line: usize, message: impl Into<String>) -> EmbeddingError {
    EmbeddingError::Malformed {
        line,
        message: message.into(),
    }
}

fn parse_count(field: Option<&str>, what: &str) -> Result<usize, EmbeddingError> {
    field
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| malformed(1, format!("header: invalid {what}")))
}

fn parse_config(line_no: usize, rest: &str) -> Result<TrainConfig, EmbeddingError> {
    let mut fields = BTreeMap::new();
    for pair in rest.split_whitespace() {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| malformed(line_no, format!("config: expected key=value, found {pair:?}")))?;
        fields.insert(k, v);
    }
    fn get<T: std::str::FromStr>(
        fields: &BTreeMap<&str, &str>,
        key: &str,
        line_no: usize,
    ) -> Result<T, EmbeddingError> {
        fields
            .get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| malformed(line_no, format!("config: missing or invalid {key}")))
    }
    Ok(TrainConfig {
        dimension: get(&fields, "dimension", line_no)?,
        window: get(&fields, "window", line_no)?,
        negative_samples: get(&fields, "negative_samples", line_no)?,
        epochs: get(&fields, "epochs", line_no)?,
        learning_rate_initial: get(&fields, "learning_rate_initial", line_no)?,
        min_token_count: get(&fields, "min_token_count", line_no)?,
        seed: get(&fields, "seed", line_no)?,
        subsample_threshold: get(&fields, "subsample_threshold", line_no)?,
    })
}

/// Parses the embedding file format, validating counts and dimensions.
pub fn parse_table(text: &str) -> Result<EmbeddingTable, EmbeddingError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, h)) if !h.trim().is_empty() => h,
        _ => return Err(EmbeddingError::MissingHeader),
    };
    let mut parts = header.splitn(6, ' ');
    if parts.next() != Some(MAGIC) {
        return Err(EmbeddingError::UnsupportedFormat(
            "not an emoji-encoder embedding file".into(),
        ));
    }
    match parts.next() {
        Some(FORMAT_VERSION) => {}
        Some(other) => return Err(EmbeddingError::UnsupportedFormat(format!("version {other}"))),
        None => return Err(EmbeddingError::UnsupportedFormat("missing version".into())),
    }
    let dimension = parse_count(parts.next(), "dimension")?;
    if dimension == 0 {
        return Err(malformed(1, "header: dimension must be positive"));
    }
    let token_count = parse_count(parts.next(), "token count")?;
    let emoji_count = parse_count(parts.next(), "emoji count")?;
    let lexicon_version = parts.next().unwrap_or("").to_string();

    let mut config = None;
    let mut token_vectors = BTreeMap::new();
    let mut emoji_vectors = BTreeMap::new();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        match tag {
            "c" if config.is_none() && token_vectors.is_empty() && emoji_vectors.is_empty() => {
                config = Some(parse_config(line_no, rest)?);
            }
            "t" | "e" => {
                let mut fields = rest.split(' ');
                let key = fields
                    .next()
                    .filter(|k| !k.is_empty())
                    .ok_or_else(|| malformed(line_no, "missing key"))?;
                let vector: Vector = fields
                    .map(|f| match f.parse::<f64>() {
                        Ok(x) if x.is_finite() => Ok(x),
                        _ => Err(malformed(line_no, format!("row {key:?}: invalid component {f:?}"))),
                    })
                    .collect::<Result<_, _>>()?;
                if vector.len() != dimension {
                    return Err(malformed(
                        line_no,
                        format!("row {key:?}: expected {dimension} components, found {}", vector.len()),
                    ));
                }
                let target = if tag == "t" {
                    if !emoji_vectors.is_empty() {
                        return Err(malformed(line_no, "token row after emoji rows"));
                    }
                    &mut token_vectors
                } else {
                    if vector.iter().all(|&x| x == 0.0) {
                        return Err(malformed(line_no, format!("row {key:?}: zero emoji vector")));
                    }
                    &mut emoji_vectors
                };
                if target.insert(key.to_string(), vector).is_some() {
                    return Err(malformed(line_no, format!("duplicate row {key:?}")));
                }
            }
            other => return Err(malformed(line_no, format!("unknown row tag {other:?}"))),
        }
    }
    if token_vectors.len() != token_count {
        return Err(EmbeddingError::Truncated {
            kind: "token",
            expected: token_count,
            found: token_vectors.len(),
        });
    }
    if emoji_vectors.len() != emoji_count {
        return Err(EmbeddingError::Truncated {
            kind: "emoji",
            expected: emoji_count,
            found: emoji_vectors.len(),
        });
    }
    Ok(EmbeddingTable {
        dimension,
        token_vectors,
        emoji_vectors,
        config,
        lexicon_version,
    })
}
