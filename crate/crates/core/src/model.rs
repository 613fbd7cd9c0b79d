//! In-memory ontology graphs: terms, told subsumption, property and
//! instance edges, and label lookup.
//!
//! Graphs are built once during load and then only queried. All
//! collections are ordered, so two graphs built from the same terms and
//! edges compare equal regardless of insertion order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// An absolute IRI, compared by exact text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        if text.is_empty() {
            return Err(ModelError::InvalidIri {
                text: text.to_string(),
                reason: "empty",
            });
        }
        if text.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidIri {
                text: text.to_string(),
                reason: "contains whitespace",
            });
        }
        let scheme_ok = match text.find(':') {
            Some(pos) if pos > 0 => {
                let scheme = &text[..pos];
                scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                    && scheme
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
            }
            _ => false,
        };
        if !scheme_ok {
            return Err(ModelError::InvalidIri {
                text: text.to_string(),
                reason: "missing scheme separator",
            });
        }
        Ok(Iri(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Text after the last `#` or `/`, or the whole IRI when neither occurs.
    pub fn fragment(&self) -> &str {
        match self.0.rfind(['#', '/']) {
            Some(pos) => &self.0[pos + 1..],
            None => &self.0,
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::parse(&value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Prefix name to namespace mapping. The empty prefix name is the default
/// namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, String>", into = "BTreeMap<String, String>")]
pub struct PrefixMap {
    entries: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prefix: &str, namespace: &str) -> Result<(), ModelError> {
        if !namespace.ends_with(['#', '/', ':']) {
            return Err(ModelError::InvalidNamespace {
                prefix: prefix.to_string(),
                namespace: namespace.to_string(),
            });
        }
        if !prefix
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(ModelError::InvalidPrefixName(prefix.to_string()));
        }
        Iri::parse(namespace)?;
        self.entries.insert(prefix.to_string(), namespace.to_string());
        Ok(())
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.entries.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds every entry of `other` whose prefix name is not already bound.
    pub fn merge_missing(&mut self, other: &PrefixMap) {
        for (p, n) in other.iter() {
            self.entries
                .entry(p.to_string())
                .or_insert_with(|| n.to_string());
        }
    }

    /// Splits an IRI into `(prefix, local)` using the longest matching
    /// namespace; ties go to the alphabetically first prefix name.
    pub fn compact<'a>(&'a self, iri: &'a Iri) -> Option<(&'a str, &'a str)> {
        let mut best: Option<(&str, &str)> = None;
        for (prefix, ns) in &self.entries {
            if let Some(local) = iri.as_str().strip_prefix(ns.as_str()) {
                let better = match best {
                    None => true,
                    Some((_, best_local)) => local.len() < best_local.len(),
                };
                if better {
                    best = Some((prefix.as_str(), local));
                }
            }
        }
        best
    }

    /// Expands `prefix:local` (or `:local` for the default namespace).
    pub fn expand(&self, compact: &str) -> Option<Iri> {
        let (prefix, local) = compact.split_once(':')?;
        let ns = self.entries.get(prefix)?;
        Iri::parse(&format!("{ns}{local}")).ok()
    }
}

impl TryFrom<BTreeMap<String, String>> for PrefixMap {
    type Error = ModelError;

    fn try_from(value: BTreeMap<String, String>) -> Result<Self, Self::Error> {
        let mut map = PrefixMap::new();
        for (p, n) in &value {
            map.insert(p, n)?;
        }
        Ok(map)
    }
}

impl From<PrefixMap> for BTreeMap<String, String> {
    fn from(map: PrefixMap) -> Self {
        map.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Class,
    ObjectProperty,
    NamedIndividual,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermKind::Class => "Class",
            TermKind::ObjectProperty => "ObjectProperty",
            TermKind::NamedIndividual => "NamedIndividual",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub iri: Iri,
    pub label: Option<String>,
    pub kind: TermKind,
    pub source: String,
    pub obsolete: bool,
}

impl Term {
    pub fn new(iri: Iri, kind: TermKind, source: impl Into<String>) -> Self {
        Term {
            iri,
            label: None,
            kind,
            source: source.into(),
            obsolete: false,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn obsolete(mut self, obsolete: bool) -> Self {
        self.obsolete = obsolete;
        self
    }

    /// Display text: the label when preferred and present, else the IRI
    /// fragment.
    pub fn render(&self, prefer_label: bool) -> &str {
        match (&self.label, prefer_label) {
            (Some(label), true) => label,
            _ => self.iri.fragment(),
        }
    }
}

/// Outcome of looking up user-entered text against a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    Resolved(Iri),
    Ambiguous(Vec<Iri>),
    Unknown,
}

/// Case-insensitive key with surrounding whitespace trimmed.
pub(crate) fn fold_key(text: &str) -> String {
    text.trim().to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyGraph {
    pub id: String,
    pub prefixes: PrefixMap,
    terms: BTreeMap<Iri, Term>,
    sub_class: BTreeSet<(Iri, Iri)>,
    property: BTreeSet<(Iri, Iri, Iri)>,
    instance: BTreeSet<(Iri, Iri)>,
    // reverse indexes, derived from the edge sets above
    children: BTreeMap<Iri, BTreeSet<Iri>>,
    property_subjects: BTreeMap<Iri, BTreeSet<(Iri, Iri)>>,
    members: BTreeMap<Iri, BTreeSet<Iri>>,
    labels: BTreeMap<String, BTreeSet<Iri>>,
    fragments: BTreeMap<String, BTreeSet<Iri>>,
}

impl OntologyGraph {
    pub fn new(id: impl Into<String>) -> Self {
        OntologyGraph {
            id: id.into(),
            prefixes: PrefixMap::new(),
            terms: BTreeMap::new(),
            sub_class: BTreeSet::new(),
            property: BTreeSet::new(),
            instance: BTreeSet::new(),
            children: BTreeMap::new(),
            property_subjects: BTreeMap::new(),
            members: BTreeMap::new(),
            labels: BTreeMap::new(),
            fragments: BTreeMap::new(),
        }
    }

    /// Declares a term. Redeclaring with the same kind merges: a new label
    /// replaces the old one and the obsolete flag is sticky.
    pub fn add_term(&mut self, term: Term) -> Result<(), ModelError> {
        if let Some(existing) = self.terms.get_mut(&term.iri) {
            if existing.kind != term.kind {
                return Err(ModelError::KindConflict {
                    iri: term.iri.clone(),
                    existing: existing.kind,
                    requested: term.kind,
                });
            }
            existing.obsolete |= term.obsolete;
            if let Some(label) = term.label {
                if existing.label.as_deref() != Some(label.as_str()) {
                    if let Some(old) = existing.label.replace(label.clone()) {
                        remove_index(&mut self.labels, &fold_key(&old), &term.iri);
                    }
                    self.labels
                        .entry(fold_key(&label))
                        .or_default()
                        .insert(term.iri.clone());
                }
            }
            return Ok(());
        }
        if let Some(label) = &term.label {
            self.labels
                .entry(fold_key(label))
                .or_default()
                .insert(term.iri.clone());
        }
        self.fragments
            .entry(fold_key(term.iri.fragment()))
            .or_default()
            .insert(term.iri.clone());
        self.terms.insert(term.iri.clone(), term);
        Ok(())
    }

    pub fn term(&self, iri: &Iri) -> Option<&Term> {
        self.terms.get(iri)
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        self.terms.contains_key(iri)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.values()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn sub_class_edges(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.sub_class.iter().map(|(c, p)| (c, p))
    }

    pub fn property_edges(&self) -> impl Iterator<Item = (&Iri, &Iri, &Iri)> {
        self.property.iter().map(|(s, p, o)| (s, p, o))
    }

    pub fn instance_edges(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.instance.iter().map(|(i, c)| (i, c))
    }

    fn require(&self, iri: &Iri, kind: TermKind) -> Result<&Term, ModelError> {
        let term = self
            .terms
            .get(iri)
            .ok_or_else(|| ModelError::Undeclared(iri.clone()))?;
        if term.kind != kind {
            return Err(ModelError::WrongKind {
                iri: iri.clone(),
                expected: kind,
                found: term.kind,
            });
        }
        Ok(term)
    }

    pub fn add_sub_class(&mut self, child: &Iri, parent: &Iri) -> Result<(), ModelError> {
        self.require(child, TermKind::Class)?;
        self.require(parent, TermKind::Class)?;
        if child == parent {
            return Err(ModelError::SelfLoop(child.clone()));
        }
        if self.sub_class.insert((child.clone(), parent.clone())) {
            self.children
                .entry(parent.clone())
                .or_default()
                .insert(child.clone());
        }
        Ok(())
    }

    pub fn add_property_edge(
        &mut self,
        subject: &Iri,
        property: &Iri,
        object: &Iri,
    ) -> Result<(), ModelError> {
        if !self.contains(subject) {
            return Err(ModelError::Undeclared(subject.clone()));
        }
        self.require(property, TermKind::ObjectProperty)?;
        if !self.contains(object) {
            return Err(ModelError::Undeclared(object.clone()));
        }
        if self
            .property
            .insert((subject.clone(), property.clone(), object.clone()))
        {
            self.property_subjects
                .entry(object.clone())
                .or_default()
                .insert((property.clone(), subject.clone()));
        }
        Ok(())
    }

    pub fn add_instance(&mut self, individual: &Iri, class: &Iri) -> Result<(), ModelError> {
        self.require(individual, TermKind::NamedIndividual)?;
        self.require(class, TermKind::Class)?;
        if self.instance.insert((individual.clone(), class.clone())) {
            self.members
                .entry(class.clone())
                .or_default()
                .insert(individual.clone());
        }
        Ok(())
    }

    /// Class terms one step below `node`: subclasses plus subjects of
    /// `follow` edges pointing at it.
    fn direct_below<'a>(
        &'a self,
        node: &'a Iri,
        follow: &'a BTreeSet<Iri>,
    ) -> impl Iterator<Item = &'a Iri> + 'a {
        let subs = self.children.get(node).into_iter().flatten();
        let via_props = self
            .property_subjects
            .get(node)
            .into_iter()
            .flatten()
            .filter(move |(p, _)| follow.contains(p))
            .map(|(_, s)| s);
        subs.chain(via_props).filter(move |iri| {
            self.terms
                .get(*iri)
                .is_some_and(|t| t.kind == TermKind::Class)
        })
    }

    fn is_live(&self, iri: &Iri) -> bool {
        self.terms.get(iri).is_some_and(|t| !t.obsolete)
    }

    /// Classes below `root` through subclass edges and the given
    /// properties. Obsolete terms are walked through but never returned;
    /// the root is only returned when `include_root` is set.
    pub fn descendants_of(
        &self,
        root: &Iri,
        follow: &BTreeSet<Iri>,
        direct_only: bool,
        include_root: bool,
    ) -> Result<BTreeSet<Iri>, ModelError> {
        self.require(root, TermKind::Class)?;
        let mut seen: BTreeSet<Iri> = BTreeSet::new();
        if direct_only {
            seen.extend(self.direct_below(root, follow).cloned());
        } else {
            let mut queue = VecDeque::from([root]);
            while let Some(node) = queue.pop_front() {
                for next in self.direct_below(node, follow) {
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        seen.remove(root);
        seen.retain(|iri| self.is_live(iri));
        if include_root && self.is_live(root) {
            seen.insert(root.clone());
        }
        Ok(seen)
    }

    /// Individuals asserted to be members of `root`, or of any of its
    /// subclasses unless `direct_only`.
    pub fn individuals_of(&self, root: &Iri, direct_only: bool) -> Result<BTreeSet<Iri>, ModelError> {
        self.require(root, TermKind::Class)?;
        let no_props = BTreeSet::new();
        let mut classes = vec![root.clone()];
        if !direct_only {
            // walk obsolete subclasses too; only the individuals are filtered
            let mut seen = BTreeSet::from([root.clone()]);
            let mut queue = VecDeque::from([root.clone()]);
            while let Some(node) = queue.pop_front() {
                for next in self.direct_below(&node, &no_props) {
                    if seen.insert(next.clone()) {
                        queue.push_back(next.clone());
                        classes.push(next.clone());
                    }
                }
            }
        }
        Ok(classes
            .iter()
            .filter_map(|c| self.members.get(c))
            .flatten()
            .filter(|i| self.is_live(i))
            .cloned()
            .collect())
    }

    /// Looks up text by label first, then by IRI fragment, both
    /// case-insensitively with surrounding whitespace trimmed.
    pub fn resolve_label(&self, text: &str) -> Resolution {
        let key = fold_key(text);
        if key.is_empty() {
            return Resolution::Unknown;
        }
        for index in [&self.labels, &self.fragments] {
            if let Some(hits) = index.get(&key) {
                if hits.len() == 1 {
                    return Resolution::Resolved(hits.iter().next().cloned().unwrap());
                }
                if hits.len() > 1 {
                    return Resolution::Ambiguous(hits.iter().cloned().collect());
                }
            }
        }
        Resolution::Unknown
    }
}

fn remove_index(index: &mut BTreeMap<String, BTreeSet<Iri>>, key: &str, iri: &Iri) {
    if let Some(set) = index.get_mut(key) {
        set.remove(iri);
        if set.is_empty() {
            index.remove(key);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::parse(&format!("http://example.org/{s}")).unwrap()
    }

    fn class(s: &str) -> Term {
        Term::new(iri(s), TermKind::Class, "test")
    }

    fn chain() -> OntologyGraph {
        let mut g = OntologyGraph::new("toy");
        for t in ["A", "B", "C"] {
            g.add_term(class(t)).unwrap();
        }
        g.add_sub_class(&iri("B"), &iri("A")).unwrap();
        g.add_sub_class(&iri("C"), &iri("B")).unwrap();
        g
    }

    #[test]
    fn iri_validation() {
        assert!(Iri::parse("").is_err());
        assert!(Iri::parse("no-scheme").is_err());
        assert!(Iri::parse("http://x.org/a b").is_err());
        assert!(Iri::parse(":local").is_err());
        let i = Iri::parse("http://purl.obolibrary.org/obo/PATO_0001407").unwrap();
        assert_eq!(i.fragment(), "PATO_0001407");
        assert_eq!(Iri::parse("http://x.org/o#part_of").unwrap().fragment(), "part_of");
    }

    #[test]
    fn prefix_map_round_trip() {
        let mut map = PrefixMap::new();
        map.insert("obo", "http://purl.obolibrary.org/obo/").unwrap();
        map.insert("cl", "http://purl.obolibrary.org/obo/CL_").unwrap_err();
        map.insert("ro", "http://purl.obolibrary.org/obo/ro#").unwrap();
        let i = Iri::parse("http://purl.obolibrary.org/obo/ro#part_of").unwrap();
        let (p, l) = map.compact(&i).unwrap();
        assert_eq!((p, l), ("ro", "part_of"));
        assert_eq!(map.expand(&format!("{p}:{l}")).unwrap(), i);
        assert!(map.expand("nope:x").is_none());
    }

    #[test]
    fn add_term_is_idempotent() {
        let mut g = OntologyGraph::new("cl");
        let cell = Term::new(
            Iri::parse("http://purl.obolibrary.org/obo/CL_0000000").unwrap(),
            TermKind::Class,
            "cl",
        )
        .with_label("cell");
        g.add_term(cell.clone()).unwrap();
        g.add_term(cell).unwrap();
        assert_eq!(g.term_count(), 1);
    }

    #[test]
    fn add_term_kind_conflict() {
        let mut g = OntologyGraph::new("cl");
        let i = Iri::parse("http://purl.obolibrary.org/obo/CL_0000113").unwrap();
        g.add_term(Term::new(i.clone(), TermKind::Class, "cl")).unwrap();
        let err = g
            .add_term(Term::new(i, TermKind::ObjectProperty, "cl"))
            .unwrap_err();
        assert!(matches!(err, ModelError::KindConflict { .. }));
    }

    #[test]
    fn term_retrievable_by_iri() {
        let mut g = OntologyGraph::new("pato");
        let i = Iri::parse("http://purl.obolibrary.org/obo/PATO_0001407").unwrap();
        g.add_term(Term::new(i.clone(), TermKind::Class, "pato").with_label("mononucleate"))
            .unwrap();
        assert_eq!(g.term(&i).unwrap().label.as_deref(), Some("mononucleate"));
    }

    #[test]
    fn descendants_chain() {
        let g = chain();
        let none = BTreeSet::new();
        let all = g.descendants_of(&iri("A"), &none, false, false).unwrap();
        assert_eq!(all, BTreeSet::from([iri("B"), iri("C")]));
        let direct = g.descendants_of(&iri("A"), &none, true, false).unwrap();
        assert_eq!(direct, BTreeSet::from([iri("B")]));
        let with_root = g.descendants_of(&iri("A"), &none, false, true).unwrap();
        assert_eq!(with_root.len(), 3);
    }

    #[test]
    fn descendants_errors() {
        let mut g = chain();
        let none = BTreeSet::new();
        assert!(matches!(
            g.descendants_of(&iri("Z"), &none, false, false),
            Err(ModelError::Undeclared(_))
        ));
        g.add_term(Term::new(iri("p"), TermKind::ObjectProperty, "t")).unwrap();
        assert!(matches!(
            g.descendants_of(&iri("p"), &none, false, false),
            Err(ModelError::WrongKind { .. })
        ));
    }

    #[test]
    fn cycles_terminate() {
        let mut g = chain();
        g.add_sub_class(&iri("A"), &iri("C")).unwrap();
        let none = BTreeSet::new();
        let from_a = g.descendants_of(&iri("A"), &none, false, false).unwrap();
        let from_b = g.descendants_of(&iri("B"), &none, false, false).unwrap();
        assert_eq!(from_a, BTreeSet::from([iri("B"), iri("C")]));
        assert!(from_b.contains(&iri("A")));
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = chain();
        assert!(matches!(
            g.add_sub_class(&iri("A"), &iri("A")),
            Err(ModelError::SelfLoop(_))
        ));
    }

    #[test]
    fn follows_properties() {
        let mut g = chain();
        g.add_term(class("X")).unwrap();
        g.add_term(class("Y")).unwrap();
        g.add_term(Term::new(iri("part_of"), TermKind::ObjectProperty, "t"))
            .unwrap();
        g.add_property_edge(&iri("X"), &iri("part_of"), &iri("C")).unwrap();
        g.add_sub_class(&iri("Y"), &iri("X")).unwrap();
        let none = BTreeSet::new();
        let part_of = BTreeSet::from([iri("part_of")]);
        assert!(!g
            .descendants_of(&iri("A"), &none, false, false)
            .unwrap()
            .contains(&iri("Y")));
        let via = g.descendants_of(&iri("A"), &part_of, false, false).unwrap();
        assert!(via.contains(&iri("X")) && via.contains(&iri("Y")));
        let direct = g.descendants_of(&iri("C"), &part_of, true, false).unwrap();
        assert_eq!(direct, BTreeSet::from([iri("X")]));
    }

    #[test]
    fn obsolete_excluded_but_traversed() {
        let mut g = OntologyGraph::new("t");
        g.add_term(class("A")).unwrap();
        g.add_term(class("B").obsolete(true)).unwrap();
        g.add_term(class("C")).unwrap();
        g.add_sub_class(&iri("B"), &iri("A")).unwrap();
        g.add_sub_class(&iri("C"), &iri("B")).unwrap();
        let got = g
            .descendants_of(&iri("A"), &BTreeSet::new(), false, false)
            .unwrap();
        assert_eq!(got, BTreeSet::from([iri("C")]));
    }

    #[test]
    fn individuals() {
        let mut g = chain();
        g.add_term(Term::new(iri("i1"), TermKind::NamedIndividual, "t"))
            .unwrap();
        g.add_instance(&iri("i1"), &iri("B")).unwrap();
        assert_eq!(
            g.individuals_of(&iri("A"), false).unwrap(),
            BTreeSet::from([iri("i1")])
        );
        assert!(g.individuals_of(&iri("A"), true).unwrap().is_empty());
        assert_eq!(g.individuals_of(&iri("B"), true).unwrap().len(), 1);
        assert!(g.individuals_of(&iri("nope"), true).is_err());
    }

    #[test]
    fn resolve_tiers() {
        let mut g = OntologyGraph::new("t");
        let pato = Iri::parse("http://purl.obolibrary.org/obo/PATO_0001407").unwrap();
        g.add_term(Term::new(pato.clone(), TermKind::Class, "t").with_label("mononucleate"))
            .unwrap();
        g.add_term(class("c1").with_label("cortex")).unwrap();
        g.add_term(class("c2").with_label("Cortex ")).unwrap();
        assert_eq!(g.resolve_label("  Mononucleate "), Resolution::Resolved(pato.clone()));
        assert_eq!(g.resolve_label("pato_0001407"), Resolution::Resolved(pato));
        assert_eq!(
            g.resolve_label("cortex"),
            Resolution::Ambiguous(vec![iri("c1"), iri("c2")])
        );
        assert_eq!(g.resolve_label("mono nucleate"), Resolution::Unknown);
        assert_eq!(g.resolve_label(""), Resolution::Unknown);
    }

    #[test]
    fn label_beats_fragment() {
        let mut g = OntologyGraph::new("t");
        g.add_term(class("B").with_label("thing")).unwrap();
        g.add_term(class("thing")).unwrap();
        assert_eq!(g.resolve_label("thing"), Resolution::Resolved(iri("B")));
    }

    #[test]
    fn relabel_updates_index() {
        let mut g = OntologyGraph::new("t");
        g.add_term(class("A").with_label("old")).unwrap();
        g.add_term(class("A").with_label("new")).unwrap();
        assert_eq!(g.resolve_label("old"), Resolution::Unknown);
        assert_eq!(g.resolve_label("new"), Resolution::Resolved(iri("A")));
    }

    #[test]
    fn render() {
        let t = Term::new(
            Iri::parse("http://purl.obolibrary.org/obo/PATO_0001407").unwrap(),
            TermKind::Class,
            "pato",
        );
        assert_eq!(t.render(true), "PATO_0001407");
        let t = t.with_label("mononucleate");
        assert_eq!(t.render(true), "mononucleate");
        assert_eq!(t.render(false), "PATO_0001407");
    }
}
