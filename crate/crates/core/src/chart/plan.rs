use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ChartError;
use crate::embedding::EmbeddingTable;
use crate::lexicon::Lexicon;
use crate::recommender::{recommend_or_placeholder, OrdinalPalette, PlaceholderPolicy};
use crate::tabular::{Dataset, FieldKind};

/// Name of the palette assigned to numerical fields by default.
pub const DEFAULT_PALETTE: &str = "emoji-10";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteChoice {
    pub palette: String,
    /// Neutral point for diverging palettes; 0 when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub midpoint: Option<f64>,
}

/// Author-editable mapping from fields and values to emojis.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EncodingPlan {
    pub field_emoji: BTreeMap<String, String>,
    /// field name -> category value -> emoji id
    pub value_emoji: BTreeMap<String, BTreeMap<String, String>>,
    pub numeric_palette: BTreeMap<String, PaletteChoice>,
    pub field_order: Vec<String>,
    pub show_labels: bool,
}

/// A partial plan update; absent parts are left unchanged and present maps
/// are merged entry by entry.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEdit {
    #[serde(default)]
    pub field_emoji: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub value_emoji: Option<BTreeMap<String, BTreeMap<String, String>>>,
    #[serde(default)]
    pub numeric_palette: Option<BTreeMap<String, PaletteChoice>>,
    #[serde(default)]
    pub field_order: Option<Vec<String>>,
    #[serde(default)]
    pub show_labels: Option<bool>,
}

fn is_permutation(a: &[String], b: &[String]) -> bool {
    let mut x: Vec<&String> = a.iter().collect();
    let mut y: Vec<&String> = b.iter().collect();
    x.sort();
    y.sort();
    x == y
}

impl EncodingPlan {
    /// Fills every field and categorical value with its top recommendation
    /// (or the placeholder) and gives numerical fields the default palette.
    pub fn auto(
        ds: &Dataset,
        table: &EmbeddingTable,
        lexicon: &Lexicon,
        policy: &PlaceholderPolicy,
        palettes: &[OrdinalPalette],
    ) -> Self {
        let default_palette = palettes
            .iter()
            .find(|p| p.name == DEFAULT_PALETTE)
            .or_else(|| palettes.first())
            .map(|p| p.name.clone());
        let mut plan = EncodingPlan::default();
        for field in &ds.fields {
            plan.field_emoji.insert(
                field.name.clone(),
                recommend_or_placeholder(table, lexicon, &field.name, policy),
            );
            plan.field_order.push(field.name.clone());
            match field.kind {
                FieldKind::Categorical => {
                    let values = field
                        .distinct_values()
                        .into_iter()
                        .map(|v| (v.to_string(), recommend_or_placeholder(table, lexicon, v, policy)))
                        .collect();
                    plan.value_emoji.insert(field.name.clone(), values);
                }
                FieldKind::Numerical => {
                    if let Some(p) = &default_palette {
                        plan.numeric_palette.insert(
                            field.name.clone(),
                            PaletteChoice {
                                palette: p.clone(),
                                midpoint: None,
                            },
                        );
                    }
                }
                FieldKind::Temporal => {}
            }
        }
        plan
    }

    /// Checks every plan invariant against the dataset, lexicon and palettes.
    pub fn validate(&self, ds: &Dataset, lexicon: &Lexicon, palettes: &[OrdinalPalette]) -> Result<(), ChartError> {
        let check_emoji = |id: &String| {
            if lexicon.contains(id) {
                Ok(())
            } else {
                Err(ChartError::UnknownEmoji(id.clone()))
            }
        };
        for (field, id) in &self.field_emoji {
            ds.field(field)?;
            check_emoji(id)?;
        }
        let referenced: Vec<String> = self.field_emoji.keys().cloned().collect();
        if !is_permutation(&self.field_order, &referenced) {
            return Err(ChartError::NotAPermutation);
        }
        for (name, values) in &self.value_emoji {
            let field = ds.field_of_kind(name, FieldKind::Categorical)?;
            let known: BTreeSet<&str> = field.distinct_values().into_iter().collect();
            for (value, id) in values {
                if !known.contains(value.as_str()) {
                    return Err(ChartError::UnknownValue {
                        field: name.clone(),
                        value: value.clone(),
                    });
                }
                check_emoji(id)?;
            }
        }
        for field in &ds.fields {
            if field.kind != FieldKind::Categorical || !self.field_emoji.contains_key(&field.name) {
                continue;
            }
            let assigned = self.value_emoji.get(&field.name);
            for value in field.distinct_values() {
                if assigned.is_none_or(|m| !m.contains_key(value)) {
                    return Err(ChartError::UnassignedValue {
                        field: field.name.clone(),
                        value: value.to_string(),
                    });
                }
            }
        }
        for (name, choice) in &self.numeric_palette {
            ds.field_of_kind(name, FieldKind::Numerical)?;
            if !palettes.iter().any(|p| p.name == choice.palette) {
                return Err(ChartError::UnknownPalette(choice.palette.clone()));
            }
            if choice.midpoint.is_some_and(|m| !m.is_finite()) {
                return Err(ChartError::InvalidSpec("midpoint must be finite".into()));
            }
        }
        Ok(())
    }

    /// Applies `edit` and validates the result; the original plan is never
    /// modified.
    pub fn apply(
        &self,
        edit: &PlanEdit,
        ds: &Dataset,
        lexicon: &Lexicon,
        palettes: &[OrdinalPalette],
    ) -> Result<EncodingPlan, ChartError> {
        let mut next = self.clone();
        if let Some(map) = &edit.field_emoji {
            for (field, id) in map {
                if !next.field_emoji.contains_key(field) {
                    ds.field(field)?;
                    next.field_order.push(field.clone());
                }
                next.field_emoji.insert(field.clone(), id.clone());
            }
        }
        if let Some(map) = &edit.value_emoji {
            for (field, values) in map {
                let slot = next.value_emoji.entry(field.clone()).or_default();
                for (value, id) in values {
                    slot.insert(value.clone(), id.clone());
                }
            }
        }
        if let Some(map) = &edit.numeric_palette {
            for (field, choice) in map {
                next.numeric_palette.insert(field.clone(), choice.clone());
            }
        }
        if let Some(order) = &edit.field_order {
            next = next.reorder_fields(order)?;
        }
        if let Some(show) = edit.show_labels {
            next.show_labels = show;
        }
        next.validate(ds, lexicon, palettes)?;
        Ok(next)
    }

    /// Replaces the field order with a permutation of the current one.
    pub fn reorder_fields<S: AsRef<str>>(&self, new_order: &[S]) -> Result<EncodingPlan, ChartError> {
        let order: Vec<String> = new_order.iter().map(|s| s.as_ref().to_string()).collect();
        if !is_permutation(&order, &self.field_order) {
            return Err(ChartError::NotAPermutation);
        }
        Ok(EncodingPlan {
            field_order: order,
            ..self.clone()
        })
    }

    /// Position of `field` in the field order, or `usize::MAX` when absent.
    pub fn order_of(&self, field: &str) -> usize {
        self.field_order.iter().position(|f| f == field).unwrap_or(usize::MAX)
    }

    pub fn value_emoji(&self, field: &str, value: &str) -> Option<&str> {
        self.value_emoji
            .get(field)
            .and_then(|m| m.get(value))
            .map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> EncodingPlan {
        EncodingPlan {
            field_order: vec!["a".into(), "b".into(), "c".into()],
            show_labels: true,
            ..Default::default()
        }
    }

    #[test]
    fn reorder_swaps_and_identity() {
        let p = EncodingPlan {
            field_order: vec!["a".into(), "b".into()],
            ..Default::default()
        };
        assert_eq!(p.reorder_fields(&["b", "a"]).unwrap().field_order, ["b", "a"]);
        assert_eq!(p.reorder_fields(&["a", "b"]).unwrap(), p);
    }

    #[test]
    fn reorder_rejects_non_permutations() {
        let p = plan();
        for bad in [
            &["a", "b"][..],
            &["a", "b", "b"],
            &["a", "b", "d"],
            &["a", "b", "c", "a"],
        ] {
            assert!(
                matches!(p.reorder_fields(bad), Err(ChartError::NotAPermutation)),
                "{bad:?}"
            );
        }
        let rotated = p.reorder_fields(&["b", "c", "a"]).unwrap();
        assert_eq!(rotated.field_order, ["b", "c", "a"]);
        assert!(rotated.show_labels);
    }
}
