//! Random inputs and independent oracles shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

pub mod oracle;

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use ontopop_core::owl::{Axiom, ClassExpr, GeneratedOntology};
use ontopop_core::pattern::{Action, AxiomKind, GenExpr, PatternAst, PatternExpr, VarDecl, VarType};
use ontopop_core::{Iri, OntologyGraph, PrefixMap, Term, TermKind};

pub const NS: &str = "http://example.org/t#";

pub fn iri(local: &str) -> Iri {
    Iri::parse(&format!("{NS}{local}")).unwrap()
}

/// A random class graph as plain edge lists, kept alongside the model so
/// oracles never consult the model's indexes.
pub struct RandomGraph {
    pub graph: OntologyGraph,
    pub classes: Vec<Iri>,
    pub obsolete: BTreeSet<Iri>,
    pub is_a: Vec<(Iri, Iri)>,
    /// `(subject, property, object)`
    pub props: Vec<(Iri, Iri, Iri)>,
    pub instances: Vec<(Iri, Iri)>,
}

pub fn part_of() -> Iri {
    iri("part_of")
}

pub fn has_part() -> Iri {
    iri("has_part")
}

/// Up to `max_terms` classes with random subclass, part_of and has_part
/// edges (cycles allowed, no self-loops), a few obsolete classes and some
/// individuals.
pub fn random_graph(rng: &mut StdRng, max_terms: usize) -> RandomGraph {
    let n = rng.gen_range(1..=max_terms);
    let mut graph = OntologyGraph::new("random");
    let classes: Vec<Iri> = (0..n).map(|i| iri(&format!("C{i}"))).collect();
    let mut obsolete = BTreeSet::new();
    for c in &classes {
        let dead = rng.gen_bool(0.05);
        if dead {
            obsolete.insert(c.clone());
        }
        graph
            .add_term(Term::new(c.clone(), TermKind::Class, "random").obsolete(dead))
            .unwrap();
    }
    for p in [part_of(), has_part()] {
        graph.add_term(Term::new(p, TermKind::ObjectProperty, "random")).unwrap();
    }
    let mut is_a = Vec::new();
    let mut props = Vec::new();
    if n > 1 {
        let edges = rng.gen_range(0..=2 * n);
        for _ in 0..edges {
            let a = classes.choose(rng).unwrap().clone();
            let b = classes.choose(rng).unwrap().clone();
            if a == b {
                continue;
            }
            match rng.gen_range(0..4) {
                0 | 1 => {
                    graph.add_sub_class(&a, &b).unwrap();
                    is_a.push((a, b));
                }
                2 => {
                    graph.add_property_edge(&a, &part_of(), &b).unwrap();
                    props.push((a, part_of(), b));
                }
                _ => {
                    graph.add_property_edge(&a, &has_part(), &b).unwrap();
                    props.push((a, has_part(), b));
                }
            }
        }
    }
    let mut instances = Vec::new();
    for i in 0..rng.gen_range(0..=n / 4 + 1) {
        let ind = iri(&format!("i{i}"));
        graph
            .add_term(Term::new(ind.clone(), TermKind::NamedIndividual, "random"))
            .unwrap();
        for _ in 0..rng.gen_range(1..=2) {
            let c = classes.choose(rng).unwrap().clone();
            graph.add_instance(&ind, &c).unwrap();
            instances.push((ind.clone(), c));
        }
    }
    RandomGraph {
        graph,
        classes,
        obsolete,
        is_a,
        props,
        instances,
    }
}

/// Breadth-first search over the raw edge lists.
pub fn closure_oracle(g: &RandomGraph, root: &Iri, follow: &BTreeSet<Iri>, include_root: bool) -> BTreeSet<Iri> {
    let mut below: HashMap<&Iri, Vec<&Iri>> = HashMap::new();
    for (child, parent) in &g.is_a {
        below.entry(parent).or_default().push(child);
    }
    for (s, p, o) in &g.props {
        if follow.contains(p) {
            below.entry(o).or_default().push(s);
        }
    }
    let mut seen: BTreeSet<Iri> = BTreeSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(node) = queue.pop_front() {
        for &next in below.get(node).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.remove(root);
    seen.retain(|c| !g.obsolete.contains(c));
    if include_root && !g.obsolete.contains(root) {
        seen.insert(root.clone());
    }
    seen
}

/// Individuals asserted into any class reachable from the root by
/// subclass edges, root included, checked pairwise.
pub fn individuals_oracle(g: &RandomGraph, root: &Iri, direct_only: bool) -> BTreeSet<Iri> {
    let classes: BTreeSet<Iri> = if direct_only {
        BTreeSet::from([root.clone()])
    } else {
        let mut c = closure_oracle(g, root, &BTreeSet::new(), true);
        // obsolete classes still pass their members through
        for o in &g.obsolete {
            if reaches(g, o, root) {
                c.insert(o.clone());
            }
        }
        c
    };
    g.instances
        .iter()
        .filter(|(_, c)| classes.contains(c))
        .map(|(i, _)| i.clone())
        .collect()
}

fn reaches(g: &RandomGraph, from: &Iri, to: &Iri) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        for (c, p) in &g.is_a {
            if c == n && seen.insert(p) {
                stack.push(p);
            }
        }
    }
    false
}

const NAME_STEMS: [&str; 8] = ["cell", "tissue", "organ", "nucleus", "ex:thing", "ex:part-a", "x_1", "Blob.b"];

fn random_name(rng: &mut StdRng) -> String {
    match rng.gen_range(0..5) {
        0 => format!("<http://example.org/n{}>", rng.gen_range(0..50)),
        _ => NAME_STEMS.choose(rng).unwrap().to_string(),
    }
}

/// A class expression over the given class variables and random names,
/// in the parser's canonical shape (flattened intersections, names or
/// variables as properties).
pub fn random_expr(rng: &mut StdRng, vars: &[String], props: &[String], depth: u32) -> PatternExpr {
    let leaf = |rng: &mut StdRng| {
        if !vars.is_empty() && rng.gen_bool(0.5) {
            PatternExpr::Var(vars.choose(rng).unwrap().clone())
        } else {
            PatternExpr::Name(random_name(rng))
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..4) {
        0 => leaf(rng),
        1 => {
            let n = rng.gen_range(2..=3);
            PatternExpr::and((0..n).map(|_| random_expr(rng, vars, props, depth - 1)))
        }
        _ => {
            let property = if !props.is_empty() && rng.gen_bool(0.3) {
                PatternExpr::Var(props.choose(rng).unwrap().clone())
            } else {
                PatternExpr::Name(["part_of", "ro:has_part", "hasNucleation"].choose(rng).unwrap().to_string())
            };
            PatternExpr::Some {
                property: Box::new(property),
                filler: Box::new(random_expr(rng, vars, props, depth - 1)),
            }
        }
    }
}

/// A well-formed pattern: base CLASS variables, an optional property
/// variable, expression generators and an optional createIntersection,
/// then one to three actions.
pub fn random_pattern(rng: &mut StdRng) -> PatternAst {
    let mut decls = Vec::new();
    let mut classes = Vec::new();
    let mut props = Vec::new();
    for i in 0..rng.gen_range(1..=3) {
        let name = format!("v{i}");
        decls.push(VarDecl {
            name: name.clone(),
            var_type: VarType::Class,
            generator: None,
        });
        classes.push(name);
    }
    if rng.gen_bool(0.2) {
        decls.push(VarDecl {
            name: "rel".into(),
            var_type: VarType::ObjectProperty,
            generator: None,
        });
        props.push("rel".to_string());
    }
    let mut generated = Vec::new();
    for i in 0..rng.gen_range(0..=2) {
        let name = format!("g{i}");
        let e = random_expr(rng, &classes, &props, 2);
        decls.push(VarDecl {
            name: name.clone(),
            var_type: VarType::Class,
            generator: Some(GenExpr::Expr(e)),
        });
        generated.push(name.clone());
        classes.push(name);
    }
    if let Some(target) = generated.first() {
        if rng.gen_bool(0.5) {
            decls.push(VarDecl {
                name: "all".into(),
                var_type: VarType::Class,
                generator: Some(GenExpr::CreateIntersection(target.clone())),
            });
            classes.push("all".into());
        }
    }
    let actions = (0..rng.gen_range(1..=3))
        .map(|_| Action {
            subject: random_expr(rng, &classes, &props, 1),
            kind: if rng.gen_bool(0.5) {
                AxiomKind::SubClassOf
            } else {
                AxiomKind::EquivalentTo
            },
            object: random_expr(rng, &classes, &props, 3),
        })
        .collect();
    PatternAst { decls, actions }
}

/// A generated ontology with named subjects and random objects.
pub fn random_generated(rng: &mut StdRng) -> GeneratedOntology {
    let mut prefixes = PrefixMap::new();
    prefixes.insert("t", NS).unwrap();
    prefixes.insert("", "http://example.org/default#").unwrap();
    let mut g = GeneratedOntology::new(None, prefixes);
    let n = rng.gen_range(1..=30);
    let classes: Vec<Iri> = (0..n)
        .map(|i| match i % 5 {
            0 => Iri::parse(&format!("http://example.org/default#d{i}")).unwrap(),
            1 => Iri::parse(&format!("http://other.org/path/x{i}")).unwrap(),
            _ => iri(&format!("C{i}")),
        })
        .collect();
    let props = [part_of(), has_part()];
    let named = |rng: &mut StdRng| ClassExpr::Named(classes.choose(rng).unwrap().clone());
    for _ in 0..rng.gen_range(0..=40) {
        let subject = classes.choose(rng).unwrap().clone();
        let object = match rng.gen_range(0..4) {
            0 => named(rng),
            1 => ClassExpr::some(props.choose(rng).unwrap().clone(), named(rng)),
            2 => ClassExpr::intersection([named(rng), ClassExpr::some(props.choose(rng).unwrap().clone(), named(rng))]),
            _ => ClassExpr::some(
                props.choose(rng).unwrap().clone(),
                ClassExpr::intersection([named(rng), named(rng)]),
            ),
        };
        if object == ClassExpr::Named(subject.clone()) {
            continue;
        }
        let axiom = if rng.gen_bool(0.7) {
            Axiom::SubClassOf(ClassExpr::Named(subject), object)
        } else {
            Axiom::EquivalentClasses(ClassExpr::Named(subject), object)
        };
        g.add_axiom(axiom).unwrap();
    }
    for c in classes.iter().take(3) {
        g.declare(c.clone(), TermKind::Class).unwrap();
        if rng.gen_bool(0.5) {
            g.set_label(c.clone(), format!("label \"{c}\" \\ {}", rng.gen_range(0..9)));
        }
    }
    g
}

/// Edges a reader should recover from a generated ontology: named
/// superclasses and named-filler restrictions at the top of each
/// right-hand side or directly inside a top-level intersection.
pub fn expected_edges(g: &GeneratedOntology) -> (BTreeSet<(Iri, Iri)>, BTreeSet<(Iri, Iri, Iri)>) {
    let mut sub = BTreeSet::new();
    let mut prop = BTreeSet::new();
    for axiom in g.axioms() {
        let ClassExpr::Named(s) = axiom.subject() else { continue };
        let parts: Vec<&ClassExpr> = match axiom.object() {
            ClassExpr::Intersection(cs) => cs.iter().collect(),
            ClassExpr::Named(_) if matches!(axiom, Axiom::EquivalentClasses(..)) => continue,
            other => vec![other],
        };
        for p in parts {
            match p {
                ClassExpr::Named(o) if o != s => {
                    sub.insert((s.clone(), o.clone()));
                }
                ClassExpr::Some { property, filler } => {
                    if let ClassExpr::Named(o) = filler.as_ref() {
                        prop.insert((s.clone(), property.clone(), o.clone()));
                    }
                }
                _ => {}
            }
        }
    }
    (sub, prop)
}
