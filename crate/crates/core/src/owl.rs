//! Ground OWL class expressions and axioms, and the generated ontology
//! that collects them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::ModelError;
use crate::model::{Iri, PrefixMap, TermKind};

/// A class expression with every name resolved to an IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassExpr {
    Named(Iri),
    Some { property: Iri, filler: Box<ClassExpr> },
    Intersection(Vec<ClassExpr>),
}

impl ClassExpr {
    pub fn named(iri: Iri) -> Self {
        ClassExpr::Named(iri)
    }

    pub fn some(property: Iri, filler: ClassExpr) -> Self {
        ClassExpr::Some {
            property,
            filler: Box::new(filler),
        }
    }

    /// Builds a canonical conjunction: nested intersections are flattened,
    /// duplicate conjuncts removed, children ordered by [`ClassExpr::sort_key`],
    /// and a single remaining conjunct is returned unwrapped.
    ///
    /// Panics on an empty iterator.
    pub fn intersection(children: impl IntoIterator<Item = ClassExpr>) -> Self {
        let mut flat = Vec::new();
        for child in children {
            match child {
                ClassExpr::Intersection(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let mut keyed: Vec<(String, ClassExpr)> =
            flat.into_iter().map(|c| (c.sort_key(), c)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        assert!(!keyed.is_empty(), "intersection of nothing");
        if keyed.len() == 1 {
            return keyed.pop().unwrap().1;
        }
        ClassExpr::Intersection(keyed.into_iter().map(|(_, c)| c).collect())
    }

    /// Conjuncts of a top-level intersection, or the expression itself.
    pub fn conjuncts(&self) -> &[ClassExpr] {
        match self {
            ClassExpr::Intersection(children) => children,
            other => std::slice::from_ref(other),
        }
    }

    /// Prefix-independent text used to order conjuncts and compare axioms.
    pub fn sort_key(&self) -> String {
        match self {
            ClassExpr::Named(iri) => format!("<{iri}>"),
            ClassExpr::Some { property, filler } => {
                format!("<{property}> some {}", filler.sort_key_nested())
            }
            ClassExpr::Intersection(children) => children
                .iter()
                .map(ClassExpr::sort_key_nested)
                .collect::<Vec<_>>()
                .join(" and "),
        }
    }

    fn sort_key_nested(&self) -> String {
        match self {
            ClassExpr::Named(_) => self.sort_key(),
            _ => format!("({})", self.sort_key()),
        }
    }

    /// Every named IRI in the expression with the kind its position implies.
    pub fn signature(&self, out: &mut Vec<(Iri, TermKind)>) {
        match self {
            ClassExpr::Named(iri) => out.push((iri.clone(), TermKind::Class)),
            ClassExpr::Some { property, filler } => {
                out.push((property.clone(), TermKind::ObjectProperty));
                filler.signature(out);
            }
            ClassExpr::Intersection(children) => {
                for c in children {
                    c.signature(out);
                }
            }
        }
    }
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.sort_key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    SubClassOf(ClassExpr, ClassExpr),
    EquivalentClasses(ClassExpr, ClassExpr),
}

impl Axiom {
    pub fn subject(&self) -> &ClassExpr {
        match self {
            Axiom::SubClassOf(s, _) | Axiom::EquivalentClasses(s, _) => s,
        }
    }

    pub fn object(&self) -> &ClassExpr {
        match self {
            Axiom::SubClassOf(_, o) | Axiom::EquivalentClasses(_, o) => o,
        }
    }

    pub fn signature(&self) -> Vec<(Iri, TermKind)> {
        let mut out = Vec::new();
        self.subject().signature(&mut out);
        self.object().signature(&mut out);
        out
    }
}

/// Declarations, labels and axioms produced by expanding patterns.
///
/// Axioms keep insertion order and are deduplicated structurally.
#[derive(Debug, Clone, Default)]
pub struct GeneratedOntology {
    pub ontology_iri: Option<Iri>,
    pub prefixes: PrefixMap,
    declarations: BTreeMap<Iri, TermKind>,
    labels: BTreeMap<Iri, String>,
    axioms: Vec<Axiom>,
    seen: HashSet<Axiom>,
}

// `seen` mirrors `axioms` and is left out of comparisons.
impl PartialEq for GeneratedOntology {
    fn eq(&self, other: &Self) -> bool {
        self.ontology_iri == other.ontology_iri
            && self.prefixes == other.prefixes
            && self.declarations == other.declarations
            && self.labels == other.labels
            && self.axioms == other.axioms
    }
}

impl Eq for GeneratedOntology {}

impl GeneratedOntology {
    pub fn new(ontology_iri: Option<Iri>, prefixes: PrefixMap) -> Self {
        GeneratedOntology {
            ontology_iri,
            prefixes,
            ..Default::default()
        }
    }

    pub fn declare(&mut self, iri: Iri, kind: TermKind) -> Result<(), ModelError> {
        match self.declarations.get(&iri) {
            Some(existing) if *existing != kind => Err(ModelError::KindConflict {
                iri,
                existing: *existing,
                requested: kind,
            }),
            Some(_) => Ok(()),
            None => {
                self.declarations.insert(iri, kind);
                Ok(())
            }
        }
    }

    pub fn set_label(&mut self, iri: Iri, label: impl Into<String>) {
        self.labels.insert(iri, label.into());
    }

    /// Adds an axiom and declares its signature. Returns false for a
    /// duplicate.
    pub fn add_axiom(&mut self, axiom: Axiom) -> Result<bool, ModelError> {
        if self.seen.contains(&axiom) {
            return Ok(false);
        }
        for (iri, kind) in axiom.signature() {
            self.declare(iri, kind)?;
        }
        self.seen.insert(axiom.clone());
        self.axioms.push(axiom);
        Ok(true)
    }

    pub fn declarations(&self) -> impl Iterator<Item = (&Iri, TermKind)> {
        self.declarations.iter().map(|(i, k)| (i, *k))
    }

    pub fn kind_of(&self, iri: &Iri) -> Option<TermKind> {
        self.declarations.get(iri).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = (&Iri, &str)> {
        self.labels.iter().map(|(i, l)| (i, l.as_str()))
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty() && self.declarations.is_empty()
    }
}

/// True when `local` can follow `prefix:` without escaping in either
/// output syntax.
pub(crate) fn is_safe_local(local: &str) -> bool {
    !local.is_empty()
        && local
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !local.ends_with('.')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> ClassExpr {
        ClassExpr::Named(Iri::parse(&format!("http://x.org/{s}")).unwrap())
    }

    fn p(s: &str) -> Iri {
        Iri::parse(&format!("http://x.org/{s}")).unwrap()
    }

    #[test]
    fn intersection_flattens_and_dedups() {
        let a = ClassExpr::intersection([n("b"), ClassExpr::some(p("r"), n("y"))]);
        let b = ClassExpr::intersection([n("b"), ClassExpr::some(p("r"), n("z"))]);
        let both = ClassExpr::intersection([a, b]);
        assert_eq!(both.conjuncts().len(), 3);
        assert_eq!(both.conjuncts()[0], n("b"));
    }

    #[test]
    fn singleton_intersection_unwrapped() {
        assert_eq!(ClassExpr::intersection([n("a"), n("a")]), n("a"));
    }

    #[test]
    fn order_independent() {
        let x = ClassExpr::intersection([n("c"), n("a"), n("b")]);
        let y = ClassExpr::intersection([n("b"), ClassExpr::intersection([n("a"), n("c")])]);
        assert_eq!(x, y);
    }

    #[test]
    fn axioms_dedup_and_declare() {
        let mut g = GeneratedOntology::default();
        let ax = Axiom::SubClassOf(n("a"), ClassExpr::some(p("r"), n("b")));
        assert!(g.add_axiom(ax.clone()).unwrap());
        assert!(!g.add_axiom(ax).unwrap());
        assert_eq!(g.axioms().len(), 1);
        assert_eq!(g.kind_of(&p("r")), Some(TermKind::ObjectProperty));
        assert_eq!(g.declarations().count(), 3);
        let clash = Axiom::SubClassOf(n("r"), n("a"));
        assert!(g.add_axiom(clash).is_err());
    }
}
