//! Reading ontologies from OBO and OWL functional syntax, writing
//! functional syntax, and fetching remote documents.

mod fetch;
mod functional;
mod obo;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::model::OntologyGraph;
use crate::validation::GraphSet;

pub use fetch::{fetch_ontology, FetchOptions, DEFAULT_MAX_BYTES};
pub use functional::{emit_functional, parse_functional};
pub use obo::{expand_id, parse_obo};

pub const OBO_NAMESPACE: &str = "http://purl.obolibrary.org/obo/";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(line: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "line {}: {sev}: {}", self.line, self.message)
    }
}

/// A successfully parsed graph plus its warnings.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub graph: OntologyGraph,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OntologyFormat {
    #[serde(rename = "OBO")]
    Obo,
    FunctionalSyntax,
    Auto,
}

impl fmt::Display for OntologyFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OntologyFormat::Obo => "OBO",
            OntologyFormat::FunctionalSyntax => "FunctionalSyntax",
            OntologyFormat::Auto => "Auto",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Origin {
    Path(PathBuf),
    Url(String),
}

/// Where an ontology comes from and how to read it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OntologySource {
    pub id: String,
    pub origin: Origin,
    pub format: OntologyFormat,
}

/// Decides the format from the first meaningful line. OBO comment lines
/// (`!`) and functional-syntax comments (`#`) are skipped. Returns `None`
/// when the document matches neither format.
pub fn sniff_format(text: &str) -> Option<OntologyFormat> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('!') && !l.starts_with('#'))?;
    if first.starts_with("format-version:") || first == "[Term]" {
        Some(OntologyFormat::Obo)
    } else if first.starts_with("Prefix(") || first.starts_with("Ontology(") {
        Some(OntologyFormat::FunctionalSyntax)
    } else {
        None
    }
}

/// Parses `text` in the given format, sniffing when `Auto`.
pub fn parse_document(text: &str, format: OntologyFormat) -> Result<Parsed, ParseError> {
    let format = match format {
        OntologyFormat::Auto => sniff_format(text)
            .ok_or_else(|| ParseError::new(1, "cannot determine ontology format"))?,
        f => f,
    };
    match format {
        OntologyFormat::Obo => parse_obo(text),
        _ => parse_functional(text),
    }
}

/// Reads and parses a local ontology file.
pub fn load_path(path: &Path, format: OntologyFormat) -> Result<Parsed, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_document(&text, format).map_err(|e| LoadError::Parse {
        origin: path.display().to_string(),
        error: e,
    })
}

/// Loads a source, resolving relative paths against `base`.
pub fn load_source(source: &OntologySource, base: &Path) -> Result<Parsed, LoadError> {
    let mut parsed = match &source.origin {
        Origin::Path(p) => {
            let full = if p.is_absolute() { p.clone() } else { base.join(p) };
            load_path(&full, source.format)?
        }
        Origin::Url(url) => {
            let text = fetch_ontology(url, &FetchOptions::default()).map_err(|e| LoadError::Fetch {
                url: url.clone(),
                message: e.to_string(),
            })?;
            parse_document(&text, source.format).map_err(|e| LoadError::Parse {
                origin: url.clone(),
                error: e,
            })?
        }
    };
    parsed.graph.id = source.id.clone();
    Ok(parsed)
}

/// Loads every source into a graph set keyed by source id, returning
/// parser warnings tagged with the source id.
pub fn load_sources(
    sources: &[OntologySource],
    base: &Path,
) -> Result<(GraphSet, Vec<(String, Diagnostic)>), LoadError> {
    let mut graphs = GraphSet::new();
    let mut warnings = Vec::new();
    for source in sources {
        let parsed = load_source(source, base)?;
        warnings.extend(parsed.diagnostics.into_iter().map(|d| (source.id.clone(), d)));
        graphs.insert(source.id.clone(), parsed.graph);
    }
    Ok((graphs, warnings))
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{origin}: {error}")]
    Parse { origin: String, error: ParseError },
    #[error("{url}: {message}")]
    Fetch { url: String, message: String },
}
