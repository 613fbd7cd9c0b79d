use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::ExpansionError;
use crate::model::Iri;

/// Persistent label to IRI assignments for terms created during
/// expansion. Minted IRIs are `baseNamespace + prefixLabel + "_" +
/// zero-padded counter`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MintRegistry {
    pub base_namespace: String,
    pub prefix_label: String,
    pub pad_width: usize,
    pub next_counter: u64,
    #[serde(default)]
    pub assignments: BTreeMap<String, Iri>,
}

/// Case-folded with internal whitespace runs collapsed to one space.
pub fn normalize_label(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("registry JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("registry: {0}")]
    Invalid(String),
}

impl MintRegistry {
    pub fn new(base_namespace: impl Into<String>, prefix_label: impl Into<String>, pad_width: usize, next_counter: u64) -> Self {
        MintRegistry {
            base_namespace: base_namespace.into(),
            prefix_label: prefix_label.into(),
            pad_width,
            next_counter,
            assignments: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, RegistryError> {
        let registry: MintRegistry = serde_json::from_str(text)?;
        registry.validate()?;
        Ok(registry)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("registry serializes");
        text.push('\n');
        text
    }

    fn validate(&self) -> Result<(), RegistryError> {
        if self.pad_width == 0 {
            return Err(RegistryError::Invalid("padWidth must be at least 1".into()));
        }
        if self.next_counter == 0 {
            return Err(RegistryError::Invalid("nextCounter must be positive".into()));
        }
        if !self.base_namespace.ends_with(['#', '/', ':']) {
            return Err(RegistryError::Invalid(format!(
                "baseNamespace {:?} must end with '#', '/' or ':'",
                self.base_namespace
            )));
        }
        self.iri_for(self.next_counter)
            .map_err(|e| RegistryError::Invalid(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for (label, iri) in &self.assignments {
            if normalize_label(label) != *label {
                return Err(RegistryError::Invalid(format!("label key {label:?} is not normalized")));
            }
            if !seen.insert(iri) {
                return Err(RegistryError::Invalid(format!("{iri} is assigned to several labels")));
            }
            if let Some(n) = self.counter_of(iri) {
                if n >= self.next_counter {
                    return Err(RegistryError::Invalid(format!(
                        "{iri} uses counter {n}, but nextCounter is {}",
                        self.next_counter
                    )));
                }
            }
        }
        Ok(())
    }

    fn iri_for(&self, counter: u64) -> Result<Iri, ExpansionError> {
        Ok(Iri::parse(&format!(
            "{}{}_{:0width$}",
            self.base_namespace,
            self.prefix_label,
            counter,
            width = self.pad_width
        ))?)
    }

    fn counter_of(&self, iri: &Iri) -> Option<u64> {
        let stem = format!("{}{}_", self.base_namespace, self.prefix_label);
        iri.as_str().strip_prefix(&stem)?.parse().ok()
    }

    pub fn lookup(&self, label: &str) -> Option<&Iri> {
        self.assignments.get(&normalize_label(label))
    }

    /// Returns the IRI assigned to `label`, minting the next one when the
    /// label is new. The flag is true for a fresh assignment.
    pub fn mint(&mut self, label: &str) -> Result<(Iri, bool), ExpansionError> {
        let key = normalize_label(label);
        if key.is_empty() {
            return Err(ExpansionError::EmptyLabel);
        }
        if let Some(iri) = self.assignments.get(&key) {
            return Ok((iri.clone(), false));
        }
        let iri = self.iri_for(self.next_counter)?;
        self.next_counter += 1;
        self.assignments.insert(key, iri.clone());
        Ok((iri, true))
    }
}
