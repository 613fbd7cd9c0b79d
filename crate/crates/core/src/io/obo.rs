//! OBO 1.2 flat-file subset: `[Term]` and `[Typedef]` stanzas with `id`,
//! `name`, `is_a`, `relationship` and `is_obsolete`.

use std::collections::BTreeSet;

use super::{Diagnostic, Parsed, OBO_NAMESPACE};
use crate::error::{ModelError, ParseError};
use crate::model::{Iri, OntologyGraph, Term, TermKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StanzaKind {
    Term,
    Typedef,
}

#[derive(Debug)]
struct Stanza {
    kind: StanzaKind,
    line: usize,
    id: Option<String>,
    name: Option<String>,
    obsolete: bool,
    is_a: Vec<(usize, String)>,
    relationships: Vec<(usize, String, String)>,
}

impl Stanza {
    fn new(kind: StanzaKind, line: usize) -> Self {
        Stanza {
            kind,
            line,
            id: None,
            name: None,
            obsolete: false,
            is_a: Vec::new(),
            relationships: Vec::new(),
        }
    }
}

/// Drops a trailing `! comment` and `{qualifier}` block from a tag value.
fn strip_trailing(value: &str) -> &str {
    let value = match value.find(" !") {
        Some(pos) => &value[..pos],
        None => value.strip_suffix('!').unwrap_or(value),
    };
    let value = match value.find('{') {
        Some(pos) => &value[..pos],
        None => value,
    };
    value.trim()
}

/// Expands an OBO identifier to its IRI.
///
/// `PREFIX:LOCAL` becomes `http://purl.obolibrary.org/obo/PREFIX_LOCAL`;
/// unprefixed ids (typically relation names) become
/// `http://purl.obolibrary.org/obo/<ontology>#id`.
pub fn expand_id(id: &str, ontology: &str) -> Result<Iri, ModelError> {
    if id.starts_with("http://") || id.starts_with("https://") {
        return Iri::parse(id);
    }
    match id.split_once(':') {
        Some((prefix, local)) if !prefix.is_empty() && !local.is_empty() => {
            Iri::parse(&format!("{OBO_NAMESPACE}{prefix}_{local}"))
        }
        _ if ontology.is_empty() => Iri::parse(&format!("{OBO_NAMESPACE}{id}")),
        _ => Iri::parse(&format!("{OBO_NAMESPACE}{ontology}#{id}")),
    }
}

pub fn parse_obo(text: &str) -> Result<Parsed, ParseError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut diagnostics = Vec::new();
    let mut warned_tags: BTreeSet<String> = BTreeSet::new();
    let mut ontology = String::new();
    let mut stanzas: Vec<Stanza> = Vec::new();
    // None while in the header or inside an unsupported stanza
    let mut current: Option<Stanza> = None;
    let mut in_header = true;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('!') {
            continue;
        }
        if line.starts_with('[') {
            if let Some(done) = current.take() {
                stanzas.push(done);
            }
            in_header = false;
            match line {
                "[Term]" => current = Some(Stanza::new(StanzaKind::Term, line_no)),
                "[Typedef]" => current = Some(Stanza::new(StanzaKind::Typedef, line_no)),
                other => diagnostics.push(Diagnostic::warning(
                    line_no,
                    format!("unsupported stanza {other} skipped"),
                )),
            }
            continue;
        }
        let Some((tag, value)) = line.split_once(':') else {
            diagnostics.push(Diagnostic::warning(line_no, format!("not a tag-value pair: {line:?}")));
            continue;
        };
        let tag = tag.trim();
        let value = value.trim();

        if in_header {
            match tag {
                "ontology" => ontology = strip_trailing(value).to_string(),
                "format-version" => {}
                _ => warn_tag(&mut diagnostics, &mut warned_tags, line_no, tag),
            }
            continue;
        }
        let Some(stanza) = current.as_mut() else {
            continue;
        };
        match tag {
            "id" => {
                let id = strip_trailing(value);
                if id.is_empty() {
                    return Err(ParseError::new(line_no, "empty id"));
                }
                stanza.id = Some(id.to_string());
            }
            "name" => stanza.name = Some(strip_trailing(value).to_string()),
            "is_obsolete" => stanza.obsolete = strip_trailing(value) == "true",
            "is_a" => {
                let target = strip_trailing(value);
                if target.is_empty() {
                    return Err(ParseError::new(line_no, "is_a without a target"));
                }
                stanza.is_a.push((line_no, target.to_string()));
            }
            "relationship" if stanza.kind == StanzaKind::Term => {
                let mut parts = strip_trailing(value).split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some(prop), Some(target)) => {
                        stanza
                            .relationships
                            .push((line_no, prop.to_string(), target.to_string()));
                    }
                    _ => {
                        return Err(ParseError::new(
                            line_no,
                            "relationship needs a property and a target",
                        ))
                    }
                }
            }
            _ => warn_tag(&mut diagnostics, &mut warned_tags, line_no, tag),
        }
    }
    if let Some(done) = current.take() {
        stanzas.push(done);
    }

    let mut graph = OntologyGraph::new(if ontology.is_empty() { "obo" } else { &ontology });
    graph
        .prefixes
        .insert("obo", OBO_NAMESPACE)
        .expect("static namespace is valid");
    let source = graph.id.clone();
    let to_iri = |line: usize, id: &str| {
        expand_id(id, &ontology).map_err(|e| ParseError::new(line, e.to_string()))
    };

    for stanza in &stanzas {
        let Some(id) = &stanza.id else {
            return Err(ParseError::new(stanza.line, "stanza has no id"));
        };
        let kind = match stanza.kind {
            StanzaKind::Term => TermKind::Class,
            StanzaKind::Typedef => TermKind::ObjectProperty,
        };
        let mut term = Term::new(to_iri(stanza.line, id)?, kind, source.clone()).obsolete(stanza.obsolete);
        term.label = stanza.name.clone();
        graph
            .add_term(term)
            .map_err(|e| ParseError::new(stanza.line, e.to_string()))?;
    }

    for stanza in &stanzas {
        let subject = to_iri(stanza.line, stanza.id.as_deref().unwrap_or_default())?;
        for (line, target) in &stanza.is_a {
            let parent = to_iri(*line, target)?;
            if stanza.kind == StanzaKind::Typedef {
                diagnostics.push(Diagnostic::warning(*line, "is_a between relations ignored"));
                continue;
            }
            declare_missing(&mut graph, &parent, TermKind::Class, &source, *line, &mut diagnostics)?;
            match graph.add_sub_class(&subject, &parent) {
                Ok(()) => {}
                Err(ModelError::SelfLoop(_)) => {
                    diagnostics.push(Diagnostic::warning(*line, format!("{target} is_a itself ignored")))
                }
                Err(e) => return Err(ParseError::new(*line, e.to_string())),
            }
        }
        for (line, prop, target) in &stanza.relationships {
            let prop_iri = to_iri(*line, prop)?;
            let target_iri = to_iri(*line, target)?;
            declare_missing(
                &mut graph,
                &prop_iri,
                TermKind::ObjectProperty,
                &source,
                *line,
                &mut diagnostics,
            )?;
            declare_missing(&mut graph, &target_iri, TermKind::Class, &source, *line, &mut diagnostics)?;
            graph
                .add_property_edge(&subject, &prop_iri, &target_iri)
                .map_err(|e| ParseError::new(*line, e.to_string()))?;
        }
    }

    Ok(Parsed { graph, diagnostics })
}

fn warn_tag(diagnostics: &mut Vec<Diagnostic>, seen: &mut BTreeSet<String>, line: usize, tag: &str) {
    if seen.insert(tag.to_string()) {
        diagnostics.push(Diagnostic::warning(
            line,
            format!("unsupported tag {tag:?} ignored (further occurrences not reported)"),
        ));
    }
}

fn declare_missing(
    graph: &mut OntologyGraph,
    iri: &Iri,
    kind: TermKind,
    source: &str,
    line: usize,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<(), ParseError> {
    if graph.contains(iri) {
        return Ok(());
    }
    diagnostics.push(Diagnostic::warning(
        line,
        format!("{iri} is referenced but never declared; declared as {kind}"),
    ));
    graph
        .add_term(Term::new(iri.clone(), kind, source))
        .map_err(|e| ParseError::new(line, e.to_string()))
}
