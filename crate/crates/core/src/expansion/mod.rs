//! Expansion of validated table rows through patterns into OWL axioms.

mod manchester;
mod mint;
mod report;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use manchester::{emit_manchester, ManchesterOptions};
pub use mint::{normalize_label, MintRegistry, RegistryError};
pub use report::emit_term_requests;

use crate::error::{ExpansionError, PatternError};
use crate::model::{Iri, PrefixMap, Resolution, TermKind};
use crate::io::emit_functional;
use crate::owl::{Axiom, ClassExpr, GeneratedOntology};
use crate::pattern::{
    check_pattern, parse_pattern, AxiomKind, ColumnBinding, GenExpr, PatternAst, PatternExpr, VarType, Violation,
};
use crate::template::{split_multi_value, TemplateDescriptor};
use crate::validation::{CellStatus, GraphSet, ValidatedTable};

/// Resolves a name written in a pattern.
///
/// `<iri>` is taken literally and `prefix:local` expands through the
/// template's prefixes. A bare name is looked up by label, then by IRI
/// fragment, across the loaded ontologies, keeping only terms of the kind
/// its position requires. When nothing matches it falls back to the
/// template's default (`""`) namespace.
pub fn resolve_name(
    name: &str,
    kind: TermKind,
    prefixes: &PrefixMap,
    graphs: &GraphSet,
) -> Result<Iri, ExpansionError> {
    if let Some(inner) = name.strip_prefix('<').and_then(|n| n.strip_suffix('>')) {
        return Ok(Iri::parse(inner)?);
    }
    if name.contains(':') {
        if let Some(iri) = prefixes.expand(name) {
            return Ok(iri);
        }
        return Iri::parse(name).map_err(|_| ExpansionError::UnresolvedName(name.to_string()));
    }
    let mut found = BTreeSet::new();
    for (_, graph) in graphs.iter() {
        let hits = match graph.resolve_label(name) {
            Resolution::Resolved(iri) => vec![iri],
            Resolution::Ambiguous(iris) => iris,
            Resolution::Unknown => continue,
        };
        found.extend(
            hits.into_iter()
                .filter(|i| graph.term(i).is_some_and(|t| t.kind == kind && !t.obsolete)),
        );
    }
    match found.len() {
        1 => Ok(found.into_iter().next().unwrap()),
        0 => match prefixes.get("") {
            Some(ns) => Ok(Iri::parse(&format!("{ns}{name}"))?),
            None => Err(ExpansionError::UnresolvedName(name.to_string())),
        },
        _ => Err(ExpansionError::AmbiguousName {
            name: name.to_string(),
            candidates: found.into_iter().collect(),
        }),
    }
}

/// A pattern with its names resolved and its variables bound to columns.
#[derive(Debug, Clone)]
pub struct CompiledPattern {
    pub ast: PatternAst,
    pub binding: ColumnBinding,
    classes: HashMap<String, Iri>,
    properties: HashMap<String, Iri>,
}

impl CompiledPattern {
    pub fn compile(
        ast: PatternAst,
        binding: ColumnBinding,
        descriptor: &TemplateDescriptor,
        graphs: &GraphSet,
    ) -> Result<Self, ExpansionError> {
        for decl in ast.base_variables() {
            let column = binding
                .column(&decl.name)
                .ok_or_else(|| ExpansionError::Unbound(decl.name.clone()))?;
            if descriptor.column(column).is_none() {
                return Err(ExpansionError::UnknownColumn(column.to_string()));
            }
            if decl.var_type != VarType::Class {
                return Err(ExpansionError::Unsupported(format!(
                    "?{} is {}; only CLASS variables can take values",
                    decl.name, decl.var_type
                )));
            }
        }
        let mut compiled = CompiledPattern {
            ast,
            binding,
            classes: HashMap::new(),
            properties: HashMap::new(),
        };
        let mut exprs: Vec<PatternExpr> = Vec::new();
        for decl in &compiled.ast.decls {
            if let Some(GenExpr::Expr(e)) = &decl.generator {
                exprs.push(e.clone());
            }
        }
        for action in &compiled.ast.actions {
            exprs.push(action.subject.clone());
            exprs.push(action.object.clone());
        }
        for e in &exprs {
            compiled.resolve_names(e, &descriptor.prefixes, graphs)?;
        }
        Ok(compiled)
    }

    fn resolve_names(&mut self, e: &PatternExpr, prefixes: &PrefixMap, graphs: &GraphSet) -> Result<(), ExpansionError> {
        match e {
            PatternExpr::Name(n) => {
                if !self.classes.contains_key(n) {
                    let iri = resolve_name(n, TermKind::Class, prefixes, graphs)?;
                    self.classes.insert(n.clone(), iri);
                }
            }
            PatternExpr::Var(_) => {}
            PatternExpr::And(children) => {
                for c in children {
                    self.resolve_names(c, prefixes, graphs)?;
                }
            }
            PatternExpr::Some { property, filler } => {
                match property.as_ref() {
                    PatternExpr::Name(n) => {
                        if !self.properties.contains_key(n) {
                            let iri = resolve_name(n, TermKind::ObjectProperty, prefixes, graphs)?;
                            self.properties.insert(n.clone(), iri);
                        }
                    }
                    PatternExpr::Var(v) => {
                        return Err(ExpansionError::Unsupported(format!("property variable ?{v}")));
                    }
                    _ => unreachable!("parser only admits names and variables as properties"),
                }
                self.resolve_names(filler, prefixes, graphs)?;
            }
        }
        Ok(())
    }

    /// Resolved IRI for a class-position name.
    pub fn class_name(&self, name: &str) -> Option<&Iri> {
        self.classes.get(name)
    }

    pub fn property_name(&self, name: &str) -> Option<&Iri> {
        self.properties.get(name)
    }

    fn substitute(&self, e: &PatternExpr, assignment: &HashMap<&str, &ClassExpr>) -> ClassExpr {
        match e {
            PatternExpr::Name(n) => ClassExpr::Named(self.classes[n].clone()),
            PatternExpr::Var(v) => assignment[v.as_str()].clone(),
            PatternExpr::And(children) => {
                ClassExpr::intersection(children.iter().map(|c| self.substitute(c, assignment)))
            }
            PatternExpr::Some { property, filler } => {
                let PatternExpr::Name(p) = property.as_ref() else {
                    unreachable!("property variables rejected at compile")
                };
                ClassExpr::some(self.properties[p].clone(), self.substitute(filler, assignment))
            }
        }
    }

    /// Instantiates expressions over every combination of the values of
    /// the variables they mention. A variable occurring several times takes
    /// the same value at each occurrence.
    pub fn instantiate(&self, exprs: &[&PatternExpr], values: &Instances) -> Result<Vec<Vec<ClassExpr>>, String> {
        let mut vars: Vec<&str> = Vec::new();
        for e in exprs {
            for v in e.variables() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let mut lists = Vec::with_capacity(vars.len());
        for v in &vars {
            match values.get(*v) {
                Some(Ok(list)) if !list.is_empty() => lists.push(list),
                Some(Err(missing)) => return Err(missing.clone()),
                _ => return Err(v.to_string()),
            }
        }
        let mut out = Vec::new();
        let mut index = vec![0usize; vars.len()];
        loop {
            let assignment: HashMap<&str, &ClassExpr> =
                vars.iter().zip(&index).enumerate().map(|(k, (v, &i))| (*v, &lists[k][i])).collect();
            out.push(exprs.iter().map(|e| self.substitute(e, &assignment)).collect());
            // odometer over the value lists, last variable fastest
            let mut k = vars.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                index[k] += 1;
                if index[k] < lists[k].len() {
                    break;
                }
                index[k] = 0;
            }
        }
    }

    /// Instances of every declared variable for one row. A variable without
    /// values maps to `Err` naming the base variable that is empty.
    pub fn instances(&self, env: &Env) -> Result<Instances, ExpansionError> {
        let mut out: Instances = HashMap::new();
        for decl in &self.ast.decls {
            let entry = match &decl.generator {
                None => match env.get(&decl.name) {
                    Some(values) if !values.is_empty() => {
                        Ok(values.iter().cloned().map(ClassExpr::Named).collect())
                    }
                    _ => Err(decl.name.clone()),
                },
                Some(GenExpr::Expr(e)) => {
                    let multi: Vec<String> = e
                        .variables()
                        .into_iter()
                        .filter(|v| matches!(out.get(*v), Some(Ok(list)) if list.len() > 1))
                        .map(str::to_string)
                        .collect();
                    if multi.len() > 1 {
                        return Err(ExpansionError::MultipleMultiValued {
                            generator: decl.name.clone(),
                            variables: multi,
                        });
                    }
                    self.instantiate(&[e], &out)
                        .map(|rows| rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
                }
                Some(GenExpr::CreateIntersection(v)) => match out.get(v) {
                    Some(Ok(list)) => Ok(vec![ClassExpr::intersection(list.iter().cloned())]),
                    Some(Err(missing)) => Err(missing.clone()),
                    None => return Err(ExpansionError::NotGenerated(v.clone())),
                },
            };
            out.insert(decl.name.clone(), entry);
        }
        Ok(out)
    }
}

/// Values of base variables for one row.
pub type Env = BTreeMap<String, Vec<Iri>>;

/// Instances per variable; `Err` carries the empty base variable.
pub type Instances = HashMap<String, Result<Vec<ClassExpr>, String>>;

/// Instantiates one pattern expression against a row's base values.
pub fn instantiate_expr(
    pattern: &CompiledPattern,
    expr: &PatternExpr,
    env: &Env,
) -> Result<Vec<ClassExpr>, ExpansionError> {
    let instances = pattern.instances(env)?;
    pattern
        .instantiate(&[expr], &instances)
        .map(|rows| rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
        .map_err(ExpansionError::NoValues)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedAction {
    pub row: usize,
    pub pattern: usize,
    pub action: usize,
    pub variable: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RowExpansion {
    pub axioms: Vec<Axiom>,
    /// `(action index, empty variable)`
    pub skipped: Vec<(usize, String)>,
}

/// Expands every action of a pattern for one row. `SubClassOf` with an
/// intersection on the right is split into one axiom per conjunct;
/// equivalences stay whole. Actions touching a variable without values
/// are skipped.
pub fn expand_row(pattern: &CompiledPattern, env: &Env) -> Result<RowExpansion, ExpansionError> {
    let instances = pattern.instances(env)?;
    let mut out = RowExpansion::default();
    for (i, action) in pattern.ast.actions.iter().enumerate() {
        let pairs = match pattern.instantiate(&[&action.subject, &action.object], &instances) {
            Ok(p) => p,
            Err(var) => {
                out.skipped.push((i, var));
                continue;
            }
        };
        for pair in pairs {
            let [subject, object]: [ClassExpr; 2] = pair.try_into().expect("two expressions");
            match action.kind {
                AxiomKind::SubClassOf => {
                    for c in object.conjuncts() {
                        out.axioms.push(Axiom::SubClassOf(subject.clone(), c.clone()));
                    }
                }
                AxiomKind::EquivalentTo => out.axioms.push(Axiom::EquivalentClasses(subject, object)),
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum RowOutcome {
    Expanded { axioms: usize },
    Skipped { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RequestStatus {
    Unknown,
    OutOfRange,
    Ambiguous,
}

/// A value that matched nothing usable in its column's range and could
/// not be minted; a candidate for a new-term request upstream.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TermRequest {
    pub row: usize,
    #[serde(skip)]
    pub column_index: usize,
    pub column: String,
    pub raw_text: String,
    pub status: RequestStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MintedTerm {
    pub row: usize,
    #[serde(skip)]
    pub column_index: usize,
    pub column: String,
    pub label: String,
    pub iri: Iri,
    /// False when the registry already held the label.
    pub fresh: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpansionReport {
    /// One entry per table row, indexed by row.
    pub per_row: Vec<RowOutcome>,
    pub minted: Vec<MintedTerm>,
    pub term_requests: Vec<TermRequest>,
    pub skipped_actions: Vec<SkippedAction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub ontology: GeneratedOntology,
    pub report: ExpansionReport,
}

/// Values of a cell paired with the text each came from.
fn cell_values<'a>(raw: &str, statuses: &'a [CellStatus], split: Option<Vec<String>>) -> Vec<(&'a CellStatus, String)> {
    match split {
        Some(texts) if texts.len() == statuses.len() => statuses.iter().zip(texts).collect(),
        _ => statuses
            .iter()
            .map(|s| match s {
                CellStatus::Unknown { text } => (s, text.clone()),
                _ => (s, raw.trim().to_string()),
            })
            .collect(),
    }
}

/// Prefixes for generated output: the template's, plus the registry's
/// namespace under its prefix label when no prefix covers it yet.
pub fn output_prefixes(descriptor: &TemplateDescriptor, registry: &MintRegistry) -> PrefixMap {
    let mut prefixes = descriptor.prefixes.clone();
    let covered = prefixes.iter().any(|(_, ns)| ns == registry.base_namespace);
    if !covered && prefixes.get(&registry.prefix_label).is_none() {
        // an invalid label or namespace just leaves minted IRIs uncompacted
        let _ = prefixes.insert(&registry.prefix_label, &registry.base_namespace);
    }
    prefixes
}

/// Expands the selected rows (all when `rows` is `None`) through each
/// pattern in turn.
///
/// Unknown values in columns that allow minting get registry IRIs,
/// assigned in row order before any axiom is generated. Other unusable
/// values are reported as term requests.
pub fn expand_table(
    patterns: &[CompiledPattern],
    vtable: &ValidatedTable,
    descriptor: &TemplateDescriptor,
    registry: &mut MintRegistry,
    rows: Option<&[usize]>,
) -> Result<Expansion, ExpansionError> {
    let table = &vtable.table;
    let selected: Vec<usize> = match rows {
        None => (0..table.row_count()).collect(),
        Some(list) => {
            if let Some(&bad) = list.iter().find(|&&r| r >= table.row_count()) {
                return Err(ExpansionError::RowOutOfRange(bad));
            }
            let set: BTreeSet<usize> = list.iter().copied().collect();
            set.into_iter().collect()
        }
    };

    // column index, spec, for every base variable of every pattern
    let mut bound: Vec<Vec<(String, usize)>> = Vec::new();
    for p in patterns {
        let mut vars = Vec::new();
        for decl in p.ast.base_variables() {
            let column = p.binding.column(&decl.name).expect("checked at compile");
            let idx = table
                .column_index(column)
                .ok_or_else(|| ExpansionError::UnknownColumn(column.to_string()))?;
            vars.push((decl.name.clone(), idx));
        }
        bound.push(vars);
    }
    let mut columns: BTreeSet<usize> = BTreeSet::new();
    for vars in &bound {
        columns.extend(vars.iter().map(|(_, c)| *c));
    }

    let mut ontology = GeneratedOntology::new(None, output_prefixes(descriptor, registry));
    let mut minted: BTreeSet<MintedTerm> = BTreeSet::new();
    let mut requests: BTreeSet<TermRequest> = BTreeSet::new();
    // row -> column -> values usable in expansion
    let mut values: BTreeMap<usize, BTreeMap<usize, Vec<Iri>>> = BTreeMap::new();

    for &r in &selected {
        for &c in &columns {
            let name = &table.header[c];
            let spec = descriptor.column(name).expect("header matches descriptor");
            let raw = &table.rows[r][c];
            let statuses = vtable.cell(r, c).unwrap_or(&[]);
            let split = split_multi_value(raw, spec).ok();
            let mut usable = Vec::new();
            for (status, text) in cell_values(raw, statuses, split) {
                match status {
                    CellStatus::Resolved { iri } => usable.push(iri.clone()),
                    CellStatus::Empty => {}
                    CellStatus::Unknown { .. } if spec.mint_unknown => {
                        let (iri, fresh) = registry.mint(&text)?;
                        ontology.declare(iri.clone(), TermKind::Class)?;
                        ontology.set_label(iri.clone(), text.clone());
                        minted.insert(MintedTerm {
                            row: r,
                            column_index: c,
                            column: name.clone(),
                            label: text,
                            iri: iri.clone(),
                            fresh,
                        });
                        usable.push(iri);
                    }
                    CellStatus::Unknown { .. } if spec.range.is_free_text() => {}
                    other => {
                        let status = match other {
                            CellStatus::OutOfRange { .. } => RequestStatus::OutOfRange,
                            CellStatus::Ambiguous { .. } => RequestStatus::Ambiguous,
                            _ => RequestStatus::Unknown,
                        };
                        requests.insert(TermRequest {
                            row: r,
                            column_index: c,
                            column: name.clone(),
                            raw_text: text,
                            status,
                        });
                    }
                }
            }
            let mut seen = BTreeSet::new();
            usable.retain(|i| seen.insert(i.clone()));
            values.entry(r).or_default().insert(c, usable);
        }
    }

    let mut per_row: Vec<RowOutcome> = (0..table.row_count())
        .map(|_| RowOutcome::Skipped {
            reason: "not selected".into(),
        })
        .collect();
    let mut skipped_actions = Vec::new();
    for &r in &selected {
        let mut count = 0;
        let mut first_missing: Option<String> = None;
        for (pi, p) in patterns.iter().enumerate() {
            let env: Env = bound[pi]
                .iter()
                .map(|(var, c)| (var.clone(), values[&r][c].clone()))
                .collect();
            let row = expand_row(p, &env)?;
            for (action, variable) in row.skipped {
                first_missing.get_or_insert_with(|| variable.clone());
                skipped_actions.push(SkippedAction {
                    row: r,
                    pattern: pi,
                    action,
                    variable,
                });
            }
            count += row.axioms.len();
            for axiom in row.axioms {
                ontology.add_axiom(axiom)?;
            }
        }
        per_row[r] = if count > 0 {
            RowOutcome::Expanded { axioms: count }
        } else {
            RowOutcome::Skipped {
                reason: match first_missing {
                    Some(v) => format!("?{v} has no values"),
                    None => "no actions".into(),
                },
            }
        };
    }

    Ok(Expansion {
        ontology,
        report: ExpansionReport {
            per_row,
            minted: minted.into_iter().collect(),
            term_requests: requests.into_iter().collect(),
            skipped_actions,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternViolation {
    /// Index into the pattern list; absent for binding entries no
    /// pattern declares.
    pub pattern: Option<usize>,
    #[serde(flatten)]
    pub violation: Violation,
}

#[derive(Debug, thiserror::Error)]
pub enum PrepareError {
    #[error("pattern {index}: {error}")]
    Pattern { index: usize, error: PatternError },
    #[error("{} binding violation(s)", .0.len())]
    Violations(Vec<PatternViolation>),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

/// Parses, checks and compiles pattern texts sharing one binding file.
/// Each pattern sees only the binding entries for variables it declares.
pub fn prepare_patterns(
    texts: &[String],
    binding: &ColumnBinding,
    descriptor: &TemplateDescriptor,
    graphs: &GraphSet,
) -> Result<Vec<CompiledPattern>, PrepareError> {
    let mut asts = Vec::with_capacity(texts.len());
    for (index, text) in texts.iter().enumerate() {
        asts.push(parse_pattern(text).map_err(|error| PrepareError::Pattern { index, error })?);
    }
    let mut violations = Vec::new();
    for variable in binding.0.keys() {
        if !asts.iter().any(|a| a.decl(variable).is_some()) {
            violations.push(PatternViolation {
                pattern: None,
                violation: Violation::UnknownVariable {
                    variable: variable.clone(),
                },
            });
        }
    }
    let mut own = Vec::with_capacity(asts.len());
    for (i, ast) in asts.iter().enumerate() {
        let mine = ColumnBinding(
            binding
                .0
                .iter()
                .filter(|(v, _)| ast.decl(v).is_some())
                .map(|(v, c)| (v.clone(), c.clone()))
                .collect(),
        );
        violations.extend(
            check_pattern(ast, descriptor, &mine)
                .violations
                .into_iter()
                .map(|violation| PatternViolation {
                    pattern: Some(i),
                    violation,
                }),
        );
        own.push(mine);
    }
    if !violations.is_empty() {
        return Err(PrepareError::Violations(violations));
    }
    let mut out = Vec::with_capacity(asts.len());
    for (ast, mine) in asts.into_iter().zip(own) {
        out.push(CompiledPattern::compile(ast, mine, descriptor, graphs)?);
    }
    Ok(out)
}

/// The three output documents of an expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedExpansion {
    pub manchester: String,
    pub functional: String,
    pub report_csv: String,
}

pub fn render_expansion(expansion: &Expansion, options: ManchesterOptions) -> RenderedExpansion {
    RenderedExpansion {
        manchester: emit_manchester(&expansion.ontology, options),
        functional: emit_functional(&expansion.ontology),
        report_csv: emit_term_requests(&expansion.report),
    }
}

/// Parse, check, compile, expand and render in one step. Both the command
/// line and the service go through here so their outputs match byte for
/// byte.
#[allow(clippy::too_many_arguments)]
pub fn run_expansion(
    texts: &[String],
    binding: &ColumnBinding,
    descriptor: &TemplateDescriptor,
    graphs: &GraphSet,
    vtable: &ValidatedTable,
    registry: &mut MintRegistry,
    rows: Option<&[usize]>,
    options: ManchesterOptions,
) -> Result<(Expansion, RenderedExpansion), PrepareError> {
    let patterns = prepare_patterns(texts, binding, descriptor, graphs)?;
    let expansion = expand_table(&patterns, vtable, descriptor, registry, rows)?;
    let rendered = render_expansion(&expansion, options);
    Ok((expansion, rendered))
}
