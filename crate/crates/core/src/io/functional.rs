//! OWL 2 functional-style syntax: a reader for the subset the toolkit
//! consumes and a deterministic writer for generated ontologies.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Diagnostic, Parsed};
use crate::error::ParseError;
use crate::model::{Iri, OntologyGraph, PrefixMap, Term, TermKind};
use crate::owl::{is_safe_local, Axiom, ClassExpr, GeneratedOntology};

const BUILTIN_PREFIXES: [(&str, &str); 4] = [
    ("owl", "http://www.w3.org/2002/07/owl#"),
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
];

const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Equals,
    FullIri(String),
    Name(String),
    Literal(String),
    LangTag,
    DatatypeMark,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' => out.push((line, Tok::Open)),
            ')' => out.push((line, Tok::Close)),
            '=' => out.push((line, Tok::Equals)),
            '<' => {
                let start = line;
                let mut iri = String::new();
                loop {
                    match chars.next() {
                        Some('>') => break,
                        Some('\n') | None => return Err(ParseError::new(start, "unterminated IRI")),
                        Some(c) => iri.push(c),
                    }
                }
                out.push((start, Tok::FullIri(iri)));
            }
            '"' => {
                let start = line;
                let mut lit = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(c @ ('"' | '\\')) => lit.push(c),
                            Some(other) => {
                                return Err(ParseError::new(line, format!("invalid escape \\{other}")))
                            }
                            None => return Err(ParseError::new(start, "unterminated string")),
                        },
                        Some(c) => {
                            if c == '\n' {
                                line += 1;
                            }
                            lit.push(c);
                        }
                        None => return Err(ParseError::new(start, "unterminated string")),
                    }
                }
                out.push((start, Tok::Literal(lit)));
            }
            '@' => {
                while chars.peek().is_some_and(|c| c.is_alphanumeric() || *c == '-') {
                    chars.next();
                }
                out.push((line, Tok::LangTag));
            }
            '^' => {
                if chars.next() != Some('^') {
                    return Err(ParseError::new(line, "expected '^^'"));
                }
                out.push((line, Tok::DatatypeMark));
            }
            c if is_name_char(c) => {
                let mut name = String::from(c);
                while chars.peek().is_some_and(|&c| is_name_char(c)) {
                    name.push(chars.next().unwrap());
                }
                out.push((line, Tok::Name(name)));
            }
            other => return Err(ParseError::new(line, format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%' | '/' | '~')
}

/// S-expression node: a constructor name with arguments, or an atom.
#[derive(Debug, Clone)]
enum Node {
    Call { name: String, line: usize, args: Vec<Node> },
    Atom { tok: Tok, line: usize },
}

impl Node {
    fn line(&self) -> usize {
        match self {
            Node::Call { line, .. } | Node::Atom { line, .. } => *line,
        }
    }
}

fn build_tree(tokens: Vec<(usize, Tok)>) -> Result<Vec<Node>, ParseError> {
    // stack of open calls: (name, line, args)
    let mut stack: Vec<(String, usize, Vec<Node>)> = Vec::new();
    let mut top: Vec<Node> = Vec::new();
    let mut iter = tokens.into_iter().peekable();
    while let Some((line, tok)) = iter.next() {
        let node = match tok {
            Tok::Name(name) if matches!(iter.peek(), Some((_, Tok::Open))) => {
                iter.next();
                stack.push((name, line, Vec::new()));
                continue;
            }
            Tok::Open => return Err(ParseError::new(line, "'(' without a constructor name")),
            Tok::Close => {
                let Some((name, start, args)) = stack.pop() else {
                    return Err(ParseError::new(line, "unbalanced ')'"));
                };
                Node::Call { name, line: start, args }
            }
            tok => Node::Atom { tok, line },
        };
        match stack.last_mut() {
            Some((_, _, args)) => args.push(node),
            None => top.push(node),
        }
    }
    if let Some((name, line, _)) = stack.pop() {
        return Err(ParseError::new(line, format!("unbalanced parentheses: {name}( is never closed")));
    }
    Ok(top)
}

struct Reader {
    prefixes: PrefixMap,
    graph: OntologyGraph,
    diagnostics: Vec<Diagnostic>,
}

/// A class expression as read, before lowering.
enum Expr {
    Named(Iri),
    Some(Iri, Iri),
    And(Vec<Expr>),
    /// Within the grammar but without a graph edge form, such as a
    /// restriction on a complex filler.
    Opaque,
}

impl Reader {
    fn entity(&self, node: &Node) -> Result<Iri, ParseError> {
        let line = node.line();
        match node {
            Node::Atom { tok: Tok::FullIri(iri), .. } => {
                Iri::parse(iri).map_err(|e| ParseError::new(line, e.to_string()))
            }
            Node::Atom { tok: Tok::Name(name), .. } => {
                let Some((prefix, _)) = name.split_once(':') else {
                    return Err(ParseError::new(line, format!("{name:?} is not an IRI or prefixed name")));
                };
                if self.prefixes.get(prefix).is_none() {
                    return Err(ParseError::new(line, format!("undeclared prefix {prefix:?}")));
                }
                self.prefixes
                    .expand(name)
                    .ok_or_else(|| ParseError::new(line, format!("invalid IRI from {name:?}")))
            }
            Node::Call { name, .. } => Err(ParseError::new(
                line,
                format!("expected an entity, found {name}(...)"),
            )),
            Node::Atom { .. } => Err(ParseError::new(line, "expected an entity")),
        }
    }

    fn ensure(&mut self, iri: &Iri, kind: TermKind, line: usize) -> Result<(), ParseError> {
        if let Some(t) = self.graph.term(iri) {
            if t.kind != kind {
                return Err(ParseError::new(
                    line,
                    format!("{iri} is a {} but is used as a {kind}", t.kind),
                ));
            }
            return Ok(());
        }
        self.diagnostics.push(Diagnostic::warning(
            line,
            format!("{iri} used without a declaration; declared as {kind}"),
        ));
        let source = self.graph.id.clone();
        self.graph
            .add_term(Term::new(iri.clone(), kind, source))
            .map_err(|e| ParseError::new(line, e.to_string()))
    }

    fn expr(&mut self, node: &Node) -> Result<Expr, ParseError> {
        let line = node.line();
        match node {
            Node::Atom { .. } => {
                let iri = self.entity(node)?;
                self.ensure(&iri, TermKind::Class, line)?;
                Ok(Expr::Named(iri))
            }
            Node::Call { name, args, .. } => match name.as_str() {
                "ObjectSomeValuesFrom" => {
                    let [prop, filler] = args.as_slice() else {
                        return Err(ParseError::new(line, "ObjectSomeValuesFrom takes 2 arguments"));
                    };
                    let prop = self.entity(prop)?;
                    self.ensure(&prop, TermKind::ObjectProperty, line)?;
                    if matches!(filler, Node::Call { .. }) {
                        self.expr(filler)?;
                        self.diagnostics.push(Diagnostic::warning(
                            line,
                            "restriction with a complex filler has no edge form; not used for ranges",
                        ));
                        return Ok(Expr::Opaque);
                    }
                    let filler = self.entity(filler)?;
                    self.ensure(&filler, TermKind::Class, line)?;
                    Ok(Expr::Some(prop, filler))
                }
                "ObjectIntersectionOf" => {
                    if args.len() < 2 {
                        return Err(ParseError::new(line, "ObjectIntersectionOf needs at least 2 operands"));
                    }
                    let parts = args
                        .iter()
                        .map(|a| self.expr(a))
                        .collect::<Result<_, _>>()?;
                    Ok(Expr::And(parts))
                }
                other => Err(ParseError::new(line, format!("unsupported construct: {other}"))),
            },
        }
    }

    /// Records the edges `subject ⊑ expr` implies.
    fn lower(&mut self, subject: &Iri, expr: &Expr, line: usize) -> Result<(), ParseError> {
        match expr {
            Expr::Named(parent) => match self.graph.add_sub_class(subject, parent) {
                Ok(()) => Ok(()),
                Err(crate::error::ModelError::SelfLoop(_)) => {
                    self.diagnostics
                        .push(Diagnostic::warning(line, format!("{subject} subclass of itself ignored")));
                    Ok(())
                }
                Err(e) => Err(ParseError::new(line, e.to_string())),
            },
            Expr::Some(p, filler) => self
                .graph
                .add_property_edge(subject, p, filler)
                .map_err(|e| ParseError::new(line, e.to_string())),
            Expr::And(parts) => {
                for part in parts {
                    self.lower(subject, part, line)?;
                }
                Ok(())
            }
            Expr::Opaque => Ok(()),
        }
    }

    /// The subject IRI, or `None` (with a warning) for a complex subject.
    fn named_subject(&mut self, node: &Node, axiom: &str) -> Result<Option<Iri>, ParseError> {
        if let Node::Call { line, .. } = node {
            self.expr(node)?;
            self.diagnostics.push(Diagnostic::warning(
                *line,
                format!("{axiom} with a complex subject has no edge form; not used for ranges"),
            ));
            return Ok(None);
        }
        let iri = self.entity(node)?;
        self.ensure(&iri, TermKind::Class, node.line())?;
        Ok(Some(iri))
    }

    fn axiom(&mut self, node: &Node) -> Result<(), ParseError> {
        let line = node.line();
        let Node::Call { name, args, .. } = node else {
            return Err(ParseError::new(line, "expected an axiom"));
        };
        match name.as_str() {
            "Declaration" => {
                let [Node::Call { name: kind, args: inner, .. }] = args.as_slice() else {
                    return Err(ParseError::new(line, "malformed Declaration"));
                };
                let [entity] = inner.as_slice() else {
                    return Err(ParseError::new(line, "malformed Declaration"));
                };
                let kind = match kind.as_str() {
                    "Class" => TermKind::Class,
                    "ObjectProperty" => TermKind::ObjectProperty,
                    "NamedIndividual" => TermKind::NamedIndividual,
                    "AnnotationProperty" | "DataProperty" | "Datatype" => {
                        self.diagnostics
                            .push(Diagnostic::warning(line, format!("{kind} declaration ignored")));
                        return Ok(());
                    }
                    other => {
                        return Err(ParseError::new(line, format!("unsupported construct: Declaration({other})")))
                    }
                };
                let iri = self.entity(entity)?;
                let source = self.graph.id.clone();
                self.graph
                    .add_term(Term::new(iri, kind, source))
                    .map_err(|e| ParseError::new(line, e.to_string()))
            }
            "AnnotationAssertion" => {
                let [prop, subject, value, ..] = args.as_slice() else {
                    return Err(ParseError::new(line, "malformed AnnotationAssertion"));
                };
                let prop = self.entity(prop)?;
                if prop.as_str() != RDFS_LABEL {
                    self.diagnostics
                        .push(Diagnostic::warning(line, format!("annotation {prop} ignored")));
                    return Ok(());
                }
                let subject = self.entity(subject)?;
                let Node::Atom { tok: Tok::Literal(text), .. } = value else {
                    return Err(ParseError::new(line, "rdfs:label value must be a literal"));
                };
                let Some(term) = self.graph.term(&subject).cloned() else {
                    self.diagnostics.push(Diagnostic::warning(
                        line,
                        format!("label for undeclared {subject} ignored"),
                    ));
                    return Ok(());
                };
                self.graph
                    .add_term(term.with_label(text.clone()))
                    .map_err(|e| ParseError::new(line, e.to_string()))
            }
            "SubClassOf" => {
                let [sub, sup] = args.as_slice() else {
                    return Err(ParseError::new(line, "SubClassOf takes 2 arguments"));
                };
                let subject = self.named_subject(sub, "SubClassOf")?;
                let expr = self.expr(sup)?;
                match subject {
                    Some(subject) => self.lower(&subject, &expr, line),
                    None => Ok(()),
                }
            }
            "EquivalentClasses" => {
                if args.len() < 2 {
                    return Err(ParseError::new(line, "EquivalentClasses needs at least 2 operands"));
                }
                let exprs: Vec<Expr> = args
                    .iter()
                    .map(|a| self.expr(a))
                    .collect::<Result<_, _>>()?;
                let named: Vec<Iri> = exprs
                    .iter()
                    .filter_map(|e| match e {
                        Expr::Named(i) => Some(i.clone()),
                        _ => None,
                    })
                    .collect();
                let complex: Vec<&Expr> = exprs.iter().filter(|e| !matches!(e, Expr::Named(_))).collect();
                if complex.is_empty() {
                    self.diagnostics.push(Diagnostic::warning(
                        line,
                        "equivalence between named classes not used for ranges",
                    ));
                    return Ok(());
                }
                for subject in &named {
                    for expr in &complex {
                        self.lower(subject, expr, line)?;
                    }
                }
                Ok(())
            }
            "ClassAssertion" => {
                let [class, individual] = args.as_slice() else {
                    return Err(ParseError::new(line, "ClassAssertion takes 2 arguments"));
                };
                if matches!(class, Node::Call { .. }) {
                    return Err(ParseError::new(line, "unsupported construct: ClassAssertion with complex class"));
                }
                let class = self.entity(class)?;
                let individual = self.entity(individual)?;
                self.ensure(&class, TermKind::Class, line)?;
                self.ensure(&individual, TermKind::NamedIndividual, line)?;
                self.graph
                    .add_instance(&individual, &class)
                    .map_err(|e| ParseError::new(line, e.to_string()))
            }
            "Import" | "Annotation" => {
                self.diagnostics
                    .push(Diagnostic::warning(line, format!("{name} ignored")));
                Ok(())
            }
            other => Err(ParseError::new(line, format!("unsupported construct: {other}"))),
        }
    }
}

pub fn parse_functional(text: &str) -> Result<Parsed, ParseError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let nodes = build_tree(tokenize(text)?)?;
    let mut reader = Reader {
        prefixes: PrefixMap::new(),
        graph: OntologyGraph::new("ontology"),
        diagnostics: Vec::new(),
    };
    for (p, ns) in BUILTIN_PREFIXES {
        reader.prefixes.insert(p, ns).expect("builtin prefix");
    }
    let mut seen_ontology = false;
    for node in &nodes {
        let line = node.line();
        match node {
            Node::Call { name, args, .. } if name == "Prefix" => {
                if seen_ontology {
                    return Err(ParseError::new(line, "Prefix after Ontology"));
                }
                let (prefix, ns) = match args.as_slice() {
                    [Node::Atom { tok: Tok::Name(p), .. }, Node::Atom { tok: Tok::Equals, .. }, Node::Atom { tok: Tok::FullIri(ns), .. }] => {
                        (p.as_str(), ns.as_str())
                    }
                    _ => return Err(ParseError::new(line, "malformed Prefix declaration")),
                };
                let Some(prefix) = prefix.strip_suffix(':') else {
                    return Err(ParseError::new(line, "prefix name must end with ':'"));
                };
                reader
                    .prefixes
                    .insert(prefix, ns)
                    .map_err(|e| ParseError::new(line, e.to_string()))?;
                reader
                    .graph
                    .prefixes
                    .insert(prefix, ns)
                    .map_err(|e| ParseError::new(line, e.to_string()))?;
            }
            Node::Call { name, args, .. } if name == "Ontology" => {
                if seen_ontology {
                    return Err(ParseError::new(line, "second Ontology block"));
                }
                seen_ontology = true;
                let mut rest = args.as_slice();
                // optional ontology IRI and version IRI
                for _ in 0..2 {
                    if let [first @ Node::Atom { tok: Tok::FullIri(_) | Tok::Name(_), .. }, tail @ ..] = rest {
                        if reader.graph.id == "ontology" {
                            reader.graph.id = reader.entity(first)?.to_string();
                        }
                        rest = tail;
                    }
                }
                for axiom in rest {
                    reader.axiom(axiom)?;
                }
            }
            Node::Call { name, .. } => {
                return Err(ParseError::new(line, format!("unsupported construct: {name} outside Ontology")))
            }
            Node::Atom { .. } => return Err(ParseError::new(line, "unexpected token outside Ontology")),
        }
    }
    Ok(Parsed {
        graph: reader.graph,
        diagnostics: reader.diagnostics,
    })
}

fn entity_text(prefixes: &PrefixMap, iri: &Iri) -> String {
    match prefixes.compact(iri) {
        Some((p, local)) if is_safe_local(local) => format!("{p}:{local}"),
        _ => format!("<{iri}>"),
    }
}

fn expr_text(prefixes: &PrefixMap, expr: &ClassExpr) -> String {
    match expr {
        ClassExpr::Named(iri) => entity_text(prefixes, iri),
        ClassExpr::Some { property, filler } => format!(
            "ObjectSomeValuesFrom({} {})",
            entity_text(prefixes, property),
            expr_text(prefixes, filler)
        ),
        ClassExpr::Intersection(children) => format!(
            "ObjectIntersectionOf({})",
            children
                .iter()
                .map(|c| expr_text(prefixes, c))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    }
}

fn escape_literal(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Writes the ontology in functional syntax. Output is byte-identical for
/// equal inputs.
pub fn emit_functional(generated: &GeneratedOntology) -> String {
    let prefixes = &generated.prefixes;
    let mut out = String::new();
    for (p, ns) in prefixes.iter() {
        let _ = writeln!(out, "Prefix({p}:=<{ns}>)");
    }
    if !prefixes.is_empty() {
        out.push('\n');
    }
    match &generated.ontology_iri {
        Some(iri) => {
            let _ = writeln!(out, "Ontology(<{iri}>");
        }
        None => out.push_str("Ontology(\n"),
    }
    for kind in [TermKind::Class, TermKind::ObjectProperty, TermKind::NamedIndividual] {
        for (iri, _) in generated.declarations().filter(|(_, k)| *k == kind) {
            let _ = writeln!(out, "Declaration({kind}({}))", entity_text(prefixes, iri));
        }
    }
    for (iri, label) in generated.labels() {
        let _ = writeln!(
            out,
            "AnnotationAssertion(<{RDFS_LABEL}> {} \"{}\")",
            entity_text(prefixes, iri),
            escape_literal(label)
        );
    }
    let mut axioms: BTreeSet<(String, String)> = BTreeSet::new();
    for axiom in generated.axioms() {
        let (name, s, o) = match axiom {
            Axiom::SubClassOf(s, o) => ("SubClassOf", s, o),
            Axiom::EquivalentClasses(s, o) => ("EquivalentClasses", s, o),
        };
        let subject = expr_text(prefixes, s);
        let text = format!("{name}({subject} {})", expr_text(prefixes, o));
        axioms.insert((subject, text));
    }
    for (_, text) in axioms {
        out.push_str(&text);
        out.push('\n');
    }
    out.push_str(")\n");
    out
}
