use std::collections::BTreeMap;

use crate::model::{Iri, PrefixMap};
use crate::owl::{is_safe_local, Axiom, ClassExpr, GeneratedOntology};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ManchesterOptions {
    /// Add an `Annotations:` section with `rdfs:label` to labelled frames.
    pub labels: bool,
}

const KEYWORDS: [&str; 12] = [
    "and", "or", "not", "some", "only", "value", "min", "max", "exactly", "that", "self", "inverse",
];

fn name(prefixes: &PrefixMap, iri: &Iri) -> String {
    match prefixes.compact(iri) {
        Some(("", local)) if is_safe_local(local) && !KEYWORDS.contains(&local.to_lowercase().as_str()) => {
            local.to_string()
        }
        Some((p, local)) if !p.is_empty() && is_safe_local(local) => format!("{p}:{local}"),
        _ => format!("<{iri}>"),
    }
}

fn nested(prefixes: &PrefixMap, e: &ClassExpr) -> String {
    match e {
        ClassExpr::Named(iri) => name(prefixes, iri),
        other => format!("({})", render(prefixes, other)),
    }
}

/// Named classes first, then the rest, each group by rendered text.
fn ordered<'a>(prefixes: &PrefixMap, items: impl IntoIterator<Item = &'a ClassExpr>) -> Vec<String> {
    let mut keyed: Vec<(bool, String, &ClassExpr)> = items
        .into_iter()
        .map(|e| (!matches!(e, ClassExpr::Named(_)), render(prefixes, e), e))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    keyed.into_iter().map(|(_, _, e)| nested(prefixes, e)).collect()
}

fn render(prefixes: &PrefixMap, e: &ClassExpr) -> String {
    match e {
        ClassExpr::Named(iri) => name(prefixes, iri),
        ClassExpr::Some { property, filler } => {
            format!("{} some {}", name(prefixes, property), nested(prefixes, filler))
        }
        ClassExpr::Intersection(children) => ordered(prefixes, children).join(" and "),
    }
}

fn entry_list(prefixes: &PrefixMap, items: &[&ClassExpr]) -> Vec<String> {
    let mut keyed: Vec<(bool, String)> = items
        .iter()
        .map(|e| (!matches!(e, ClassExpr::Named(_)), render(prefixes, e)))
        .collect();
    keyed.sort();
    keyed.dedup();
    keyed.into_iter().map(|(_, t)| t).collect()
}

#[derive(Default)]
struct Frame<'a> {
    label: Option<&'a str>,
    equivalent: Vec<&'a ClassExpr>,
    sub_class_of: Vec<&'a ClassExpr>,
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Manchester syntax: the prefix header, then one `Class:` frame per
/// named subject, ordered by IRI. Axioms with an anonymous subject have no
/// frame to live in and appear only in the functional-syntax output.
pub fn emit_manchester(generated: &GeneratedOntology, options: ManchesterOptions) -> String {
    let prefixes = &generated.prefixes;
    let mut out = String::new();
    for (p, ns) in prefixes.iter() {
        out.push_str(&format!("Prefix: {p}: <{ns}>\n"));
    }
    let mut frames: BTreeMap<&Iri, Frame> = BTreeMap::new();
    for axiom in generated.axioms() {
        let ClassExpr::Named(subject) = axiom.subject() else { continue };
        let frame = frames.entry(subject).or_default();
        match axiom {
            Axiom::SubClassOf(_, o) => frame.sub_class_of.push(o),
            Axiom::EquivalentClasses(_, o) => frame.equivalent.push(o),
        }
    }
    if options.labels {
        for (iri, label) in generated.labels() {
            frames.entry(iri).or_default().label = Some(label);
        }
    }
    for (iri, frame) in frames {
        out.push_str(&format!("\nClass: {}\n", name(prefixes, iri)));
        if let Some(label) = frame.label {
            out.push_str(&format!("\n    Annotations:\n        rdfs:label \"{}\"\n", escape(label)));
        }
        for (keyword, items) in [("EquivalentTo", &frame.equivalent), ("SubClassOf", &frame.sub_class_of)] {
            if items.is_empty() {
                continue;
            }
            out.push_str(&format!("\n    {keyword}:\n"));
            let entries = entry_list(prefixes, items);
            let last = entries.len() - 1;
            for (i, e) in entries.iter().enumerate() {
                out.push_str("        ");
                out.push_str(e);
                out.push_str(if i < last { ",\n" } else { "\n" });
            }
        }
    }
    out
}
