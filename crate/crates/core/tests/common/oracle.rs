//! Naive textual-substitution oracle for row expansion: print the action
//! fully parenthesised, splice values in as text, reparse, normalise.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::Rng;
use regex::Regex;

use super::random_expr;
use ontopop_core::expansion::CompiledPattern;
use ontopop_core::owl::{Axiom, ClassExpr};
use ontopop_core::pattern::{
    parse_pattern, Action, AxiomKind, ColumnBinding, GenExpr, PatternAst, PatternExpr, VarDecl, VarType,
};
use ontopop_core::template::{ColumnSpec, RangeSpec, TemplateDescriptor};
use ontopop_core::validation::GraphSet;
use ontopop_core::{Iri, PrefixMap};

pub const DEFAULT_NS: &str = "http://example.org/default#";

pub fn descriptor() -> TemplateDescriptor {
    let mut prefixes = PrefixMap::new();
    prefixes.insert("", DEFAULT_NS).unwrap();
    prefixes.insert("ex", "http://example.org/ex/").unwrap();
    prefixes.insert("ro", "http://www.obofoundry.org/ro/ro.owl#").unwrap();
    TemplateDescriptor {
        columns: ["A", "B"].iter().map(|c| ColumnSpec::new(*c, RangeSpec::free_text())).collect(),
        prefixes,
        ontology_sources: Vec::new(),
        version: "1".into(),
    }
}

/// Two base variables, an optional generated variable, an optional
/// intersection over it, and one or two actions.
pub fn two_variable_pattern(rng: &mut StdRng) -> PatternAst {
    let base = vec!["alpha".to_string(), "beta".to_string()];
    let mut decls: Vec<VarDecl> = base
        .iter()
        .map(|n| VarDecl {
            name: n.clone(),
            var_type: VarType::Class,
            generator: None,
        })
        .collect();
    let mut usable = base.clone();
    if rng.gen_bool(0.5) {
        decls.push(VarDecl {
            name: "gamma".into(),
            var_type: VarType::Class,
            generator: Some(GenExpr::Expr(random_expr(rng, &base, &[], 2))),
        });
        usable.push("gamma".into());
        if rng.gen_bool(0.5) {
            decls.push(VarDecl {
                name: "delta".into(),
                var_type: VarType::Class,
                generator: Some(GenExpr::CreateIntersection("gamma".into())),
            });
            usable.push("delta".into());
        }
    }
    let actions = (0..rng.gen_range(1..=2))
        .map(|_| Action {
            subject: random_expr(rng, &usable, &[], 1),
            kind: if rng.gen_bool(0.5) {
                AxiomKind::SubClassOf
            } else {
                AxiomKind::EquivalentTo
            },
            object: random_expr(rng, &usable, &[], 3),
        })
        .collect();
    PatternAst { decls, actions }
}

pub fn text(e: &PatternExpr) -> String {
    match e {
        PatternExpr::Name(n) => n.clone(),
        PatternExpr::Var(v) => format!("?{v}"),
        PatternExpr::And(cs) => cs.iter().map(|c| format!("({})", text(c))).collect::<Vec<_>>().join(" and "),
        PatternExpr::Some { property, filler } => format!("{} some ({})", text(property), text(filler)),
    }
}

pub fn substitute(mut s: String, ast: &PatternAst, values: &BTreeMap<&str, Iri>) -> String {
    // generated variables first, innermost last, until only base ones remain
    loop {
        let mut changed = false;
        for d in ast.decls.iter().rev() {
            let replacement = match &d.generator {
                Some(GenExpr::Expr(e)) => format!("({})", text(e)),
                Some(GenExpr::CreateIntersection(v)) => format!("(?{v})"),
                None => continue,
            };
            let re = Regex::new(&format!(r"\?{}\b", d.name)).unwrap();
            if re.is_match(&s) {
                s = re.replace_all(&s, regex::NoExpand(&replacement)).into_owned();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for (var, iri) in values {
        let re = Regex::new(&format!(r"\?{var}\b")).unwrap();
        s = re.replace_all(&s, regex::NoExpand(&format!("<{iri}>"))).into_owned();
    }
    s
}

pub fn name_iri(n: &str, prefixes: &PrefixMap) -> Iri {
    if let Some(inner) = n.strip_prefix('<').and_then(|x| x.strip_suffix('>')) {
        return Iri::parse(inner).unwrap();
    }
    match n.split_once(':') {
        Some(_) => prefixes.expand(n).unwrap(),
        None => Iri::parse(&format!("{DEFAULT_NS}{n}")).unwrap(),
    }
}

/// Canonical form: flattened, deduplicated, conjuncts sorted by their
/// debug text.
pub fn canon(e: ClassExpr) -> ClassExpr {
    match e {
        ClassExpr::Named(_) => e,
        ClassExpr::Some { property, filler } => ClassExpr::Some {
            property,
            filler: Box::new(canon(*filler)),
        },
        ClassExpr::Intersection(cs) => {
            let mut flat = Vec::new();
            for c in cs.into_iter().map(canon) {
                match c {
                    ClassExpr::Intersection(inner) => flat.extend(inner),
                    other => flat.push(other),
                }
            }
            flat.sort_by_key(|c| format!("{c:?}"));
            flat.dedup();
            if flat.len() == 1 {
                flat.pop().unwrap()
            } else {
                ClassExpr::Intersection(flat)
            }
        }
    }
}

pub fn ground(e: &PatternExpr, prefixes: &PrefixMap) -> ClassExpr {
    match e {
        PatternExpr::Name(n) => ClassExpr::Named(name_iri(n, prefixes)),
        PatternExpr::Var(v) => panic!("unsubstituted ?{v}"),
        PatternExpr::And(cs) => ClassExpr::Intersection(cs.iter().map(|c| ground(c, prefixes)).collect()),
        PatternExpr::Some { property, filler } => {
            let PatternExpr::Name(p) = property.as_ref() else { panic!() };
            ClassExpr::Some {
                property: name_iri(p, prefixes),
                filler: Box::new(ground(filler, prefixes)),
            }
        }
    }
}

pub fn canon_axiom(a: Axiom) -> Axiom {
    match a {
        Axiom::SubClassOf(s, o) => Axiom::SubClassOf(canon(s), canon(o)),
        Axiom::EquivalentClasses(s, o) => Axiom::EquivalentClasses(canon(s), canon(o)),
    }
}

pub fn oracle(ast: &PatternAst, values: &BTreeMap<&str, Iri>, prefixes: &PrefixMap) -> Vec<Axiom> {
    let mut out = Vec::new();
    for action in &ast.actions {
        let s = substitute(text(&action.subject), ast, values);
        let o = substitute(text(&action.object), ast, values);
        let doc = format!("?unused:CLASS BEGIN ADD ({s}) SubClassOf ({o}) END;");
        let parsed = parse_pattern(&doc).unwrap_or_else(|e| panic!("{doc}: {e}"));
        let subject = canon(ground(&parsed.actions[0].subject, prefixes));
        let object = canon(ground(&parsed.actions[0].object, prefixes));
        match action.kind {
            AxiomKind::EquivalentTo => out.push(Axiom::EquivalentClasses(subject, object)),
            AxiomKind::SubClassOf => match object {
                ClassExpr::Intersection(cs) => {
                    out.extend(cs.into_iter().map(|c| Axiom::SubClassOf(subject.clone(), c)))
                }
                other => out.push(Axiom::SubClassOf(subject, other)),
            },
        }
    }
    out.sort_by_key(|a| format!("{a:?}"));
    out.dedup();
    out
}

pub fn compile(ast: PatternAst) -> CompiledPattern {
    let binding = ColumnBinding::new().bind("alpha", "A").bind("beta", "B");
    CompiledPattern::compile(ast, binding, &descriptor(), &GraphSet::new()).unwrap()
}

/// One random pattern and one random single-valued row; `Err` describes
/// the disagreement.
pub fn check_row(seed: u64) -> Result<(), String> {
    use rand::SeedableRng;
    let mut rng = StdRng::seed_from_u64(seed);
    let ast = two_variable_pattern(&mut rng);
    let pattern = compile(ast.clone());
    let a = Iri::parse(&format!("http://example.org/row/a{}", rng.gen_range(0..5))).unwrap();
    let b = Iri::parse(&format!("http://example.org/row/b{}", rng.gen_range(0..5))).unwrap();
    let env: ontopop_core::expansion::Env =
        [("alpha".to_string(), vec![a.clone()]), ("beta".to_string(), vec![b.clone()])].into();
    let row = ontopop_core::expansion::expand_row(&pattern, &env).map_err(|e| e.to_string())?;
    let mut got: Vec<Axiom> = row.axioms.into_iter().map(canon_axiom).collect();
    got.sort_by_key(|a| format!("{a:?}"));
    got.dedup();
    let want = oracle(&ast, &BTreeMap::from([("alpha", a), ("beta", b)]), &descriptor().prefixes);
    if got == want {
        Ok(())
    } else {
        Err(format!("seed {seed}: {}\n got {got:?}\nwant {want:?}", ontopop_core::pattern::print_pattern(&ast)))
    }
}
