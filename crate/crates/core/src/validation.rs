//! Validation ranges materialized from ontologies, cell and table
//! validation, and autocomplete over a range.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use regex::RegexBuilder;
use serde::{Deserialize, Serialize};

use crate::error::{TemplateError, ValidationError};
use crate::model::{fold_key, Iri, OntologyGraph, Resolution};
use crate::template::{split_multi_value, ColumnSpec, RangeKind, RangeSpec, TableDoc, TemplateDescriptor};

/// Loaded ontologies keyed by the id the descriptor uses for them.
#[derive(Debug, Clone, Default)]
pub struct GraphSet {
    graphs: BTreeMap<String, Arc<OntologyGraph>>,
}

impl GraphSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a graph under `id`. Returns false, leaving the set unchanged,
    /// when the id is already taken.
    pub fn insert(&mut self, id: impl Into<String>, graph: OntologyGraph) -> bool {
        let id = id.into();
        if self.graphs.contains_key(&id) {
            return false;
        }
        self.graphs.insert(id, Arc::new(graph));
        true
    }

    pub fn get(&self, id: &str) -> Option<&OntologyGraph> {
        self.graphs.get(id).map(Arc::as_ref)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &OntologyGraph)> {
        self.graphs.iter().map(|(k, g)| (k.as_str(), g.as_ref()))
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

/// The terms a column accepts, with display labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationSet {
    pub range: RangeSpec,
    members: BTreeMap<Iri, String>,
    label_index: BTreeMap<String, BTreeSet<Iri>>,
}

impl ValidationSet {
    /// True for free-text ranges, which accept any value.
    pub fn is_open(&self) -> bool {
        self.range.is_free_text()
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        self.members.contains_key(iri)
    }

    pub fn members(&self) -> impl Iterator<Item = (&Iri, &str)> {
        self.members.iter().map(|(i, l)| (i, l.as_str()))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn label(&self, iri: &Iri) -> Option<&str> {
        self.members.get(iri).map(String::as_str)
    }

    /// Members whose display label folds to the same key as `text`.
    pub fn lookup_label(&self, text: &str) -> Option<&BTreeSet<Iri>> {
        self.label_index.get(&fold_key(text))
    }
}

pub fn materialize_range(graphs: &GraphSet, range: &RangeSpec) -> Result<ValidationSet, ValidationError> {
    if range.is_free_text() {
        return Ok(ValidationSet {
            range: range.clone(),
            members: BTreeMap::new(),
            label_index: BTreeMap::new(),
        });
    }
    let id = range.ontology_id.as_deref().unwrap_or_default();
    let graph = graphs
        .get(id)
        .ok_or_else(|| ValidationError::MissingOntology(id.to_string()))?;
    let root = range
        .root
        .as_ref()
        .ok_or_else(|| ValidationError::MissingOntology(id.to_string()))?;
    let iris = match range.kind {
        RangeKind::AllSubClasses | RangeKind::DirectSubClasses => graph.descendants_of(
            root,
            &range.follow_properties,
            range.kind == RangeKind::DirectSubClasses,
            range.include_root,
        )?,
        RangeKind::AllIndividuals | RangeKind::DirectIndividuals => {
            graph.individuals_of(root, range.kind == RangeKind::DirectIndividuals)?
        }
        RangeKind::FreeText => unreachable!("handled above"),
    };
    let mut members = BTreeMap::new();
    let mut label_index: BTreeMap<String, BTreeSet<Iri>> = BTreeMap::new();
    for iri in iris {
        let term = graph.term(&iri).expect("closure yields declared terms");
        let label = term.render(true).to_string();
        label_index.entry(fold_key(&label)).or_default().insert(iri.clone());
        members.insert(iri, label);
    }
    Ok(ValidationSet {
        range: range.clone(),
        members,
        label_index,
    })
}

/// Materialized ranges, computed once per range. Graphs never change after
/// load, so entries never go stale.
#[derive(Debug, Default)]
pub struct RangeCache {
    sets: RwLock<HashMap<RangeSpec, Arc<ValidationSet>>>,
}

impl RangeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_materialize(
        &self,
        graphs: &GraphSet,
        range: &RangeSpec,
    ) -> Result<Arc<ValidationSet>, ValidationError> {
        if let Some(set) = self.sets.read().expect("cache lock").get(range) {
            return Ok(Arc::clone(set));
        }
        let set = Arc::new(materialize_range(graphs, range)?);
        let mut sets = self.sets.write().expect("cache lock");
        Ok(Arc::clone(sets.entry(range.clone()).or_insert(set)))
    }

    pub fn len(&self) -> usize {
        self.sets.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum CellStatus {
    Resolved { iri: Iri },
    OutOfRange { iri: Iri },
    Unknown { text: String },
    Ambiguous { candidates: Vec<Iri> },
    Empty,
}

impl CellStatus {
    pub fn kind(&self) -> StatusKind {
        match self {
            CellStatus::Resolved { .. } => StatusKind::Resolved,
            CellStatus::OutOfRange { .. } => StatusKind::OutOfRange,
            CellStatus::Unknown { .. } => StatusKind::Unknown,
            CellStatus::Ambiguous { .. } => StatusKind::Ambiguous,
            CellStatus::Empty => StatusKind::Empty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StatusKind {
    Resolved,
    OutOfRange,
    Unknown,
    Ambiguous,
    Empty,
}

/// Validates each value of a cell against the column's range.
///
/// Text that resolves to several terms of which exactly one lies in the
/// range is taken as that member.
pub fn validate_cell(
    text: &str,
    spec: &ColumnSpec,
    vset: &ValidationSet,
    graphs: &GraphSet,
) -> Result<Vec<CellStatus>, TemplateError> {
    let values = split_multi_value(text, spec)?;
    if values.is_empty() {
        return Ok(vec![CellStatus::Empty]);
    }
    if vset.is_open() {
        return Ok(values.into_iter().map(|text| CellStatus::Unknown { text }).collect());
    }
    let graph = spec.range.ontology_id.as_deref().and_then(|id| graphs.get(id));
    Ok(values
        .into_iter()
        .map(|value| {
            let resolution = match graph {
                Some(g) => g.resolve_label(&value),
                None => Resolution::Unknown,
            };
            match resolution {
                Resolution::Resolved(iri) if vset.contains(&iri) => CellStatus::Resolved { iri },
                Resolution::Resolved(iri) => CellStatus::OutOfRange { iri },
                Resolution::Ambiguous(candidates) => {
                    let inside: Vec<&Iri> = candidates.iter().filter(|c| vset.contains(c)).collect();
                    match inside.as_slice() {
                        [only] => CellStatus::Resolved { iri: (*only).clone() },
                        _ => CellStatus::Ambiguous { candidates },
                    }
                }
                Resolution::Unknown => CellStatus::Unknown { text: value },
            }
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatusSummary {
    pub resolved: usize,
    pub out_of_range: usize,
    pub unknown: usize,
    pub ambiguous: usize,
    pub empty: usize,
}

impl StatusSummary {
    pub fn record(&mut self, kind: StatusKind) {
        match kind {
            StatusKind::Resolved => self.resolved += 1,
            StatusKind::OutOfRange => self.out_of_range += 1,
            StatusKind::Unknown => self.unknown += 1,
            StatusKind::Ambiguous => self.ambiguous += 1,
            StatusKind::Empty => self.empty += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.resolved + self.out_of_range + self.unknown + self.ambiguous + self.empty
    }
}

/// A cell whose text could not be split into values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellError {
    pub row: usize,
    pub column: String,
    pub message: String,
}

/// A cell status that needs attention before expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellIssue {
    pub row: usize,
    pub column: String,
    pub status: CellStatus,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedTable {
    pub table: TableDoc,
    /// Row-major; each cell holds one status per split value, or a single
    /// `Empty`.
    pub statuses: Vec<Vec<Vec<CellStatus>>>,
    pub summary: StatusSummary,
    /// Cells that failed to split; their status is `Unknown` with the raw
    /// text.
    pub errors: Vec<CellError>,
}

impl ValidatedTable {
    pub fn cell(&self, row: usize, col: usize) -> Option<&[CellStatus]> {
        self.statuses.get(row)?.get(col).map(Vec::as_slice)
    }

    /// Problem statuses in columns that are neither free text nor allowed
    /// to mint new terms, in row then column order.
    pub fn issues(&self, descriptor: &TemplateDescriptor) -> Vec<CellIssue> {
        let mut out = Vec::new();
        for (r, row) in self.statuses.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                let name = &self.table.header[c];
                let Some(spec) = descriptor.column(name) else { continue };
                if spec.range.is_free_text() || spec.mint_unknown {
                    continue;
                }
                for status in cell {
                    if matches!(
                        status.kind(),
                        StatusKind::Unknown | StatusKind::OutOfRange | StatusKind::Ambiguous
                    ) {
                        out.push(CellIssue {
                            row: r,
                            column: name.clone(),
                            status: status.clone(),
                            raw: self.table.rows[r][c].clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

impl ValidatedTable {
    /// Writes `text` into a cell and revalidates just that cell. A row
    /// index equal to the row count appends an empty row first. Returns
    /// the cell's new statuses.
    pub fn edit_cell(
        &mut self,
        row: usize,
        col: usize,
        text: &str,
        descriptor: &TemplateDescriptor,
        graphs: &GraphSet,
        cache: &RangeCache,
    ) -> Result<Vec<CellStatus>, ValidationError> {
        assert!(row <= self.table.row_count() && col < self.table.col_count(), "cell out of bounds");
        if row == self.table.row_count() {
            let width = self.table.col_count();
            self.table.push_row(vec![String::new(); width]);
            self.statuses.push(vec![vec![CellStatus::Empty]; width]);
            self.summary.empty += width;
        }
        self.table.set_cell(row, col, text);
        let (cell, error) = validate_table_cell(&self.table, row, col, descriptor, graphs, cache)?;
        let name = &self.table.header[col];
        self.errors.retain(|e| !(e.row == row && &e.column == name));
        self.errors.extend(error);
        let header = &self.table.header;
        let position = |c: &String| header.iter().position(|h| h == c);
        self.errors.sort_by_key(|e| (e.row, position(&e.column)));
        self.statuses[row][col] = cell.clone();
        let mut summary = StatusSummary::default();
        for s in self.statuses.iter().flatten().flatten() {
            summary.record(s.kind());
        }
        self.summary = summary;
        Ok(cell)
    }
}

/// Validates one cell of a table, recovering from split errors.
pub fn validate_table_cell(
    table: &TableDoc,
    row: usize,
    col: usize,
    descriptor: &TemplateDescriptor,
    graphs: &GraphSet,
    cache: &RangeCache,
) -> Result<(Vec<CellStatus>, Option<CellError>), ValidationError> {
    let name = &table.header[col];
    let raw = &table.rows[row][col];
    let spec = descriptor
        .column(name)
        .expect("table header checked against descriptor at load");
    let vset = cache.get_or_materialize(graphs, &spec.range)?;
    Ok(match validate_cell(raw, spec, &vset, graphs) {
        Ok(statuses) => (statuses, None),
        Err(e) => (
            vec![CellStatus::Unknown { text: raw.clone() }],
            Some(CellError {
                row,
                column: name.clone(),
                message: e.to_string(),
            }),
        ),
    })
}

pub fn validate_table(
    table: &TableDoc,
    descriptor: &TemplateDescriptor,
    graphs: &GraphSet,
    cache: &RangeCache,
) -> Result<ValidatedTable, ValidationError> {
    let mut statuses = Vec::with_capacity(table.row_count());
    let mut summary = StatusSummary::default();
    let mut errors = Vec::new();
    for r in 0..table.row_count() {
        let mut row = Vec::with_capacity(table.col_count());
        for c in 0..table.col_count() {
            let (cell, error) = validate_table_cell(table, r, c, descriptor, graphs, cache)?;
            for s in &cell {
                summary.record(s.kind());
            }
            errors.extend(error);
            row.push(cell);
        }
        statuses.push(row);
    }
    Ok(ValidatedTable {
        table: table.clone(),
        statuses,
        summary,
        errors,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub iri: Iri,
    pub label: String,
}

/// Ranked completions for `query` drawn from the range members.
///
/// Tiers, each alphabetical by label: label prefix, label substring, then
/// the query as a case-insensitive regular expression (skipped when it
/// does not compile).
pub fn autocomplete(query: &str, vset: &ValidationSet, limit: usize) -> Vec<Candidate> {
    let limit = limit.max(1);
    let needle = query.trim().to_lowercase();
    let mut sorted: Vec<(String, &Iri, &str)> = vset
        .members()
        .map(|(iri, label)| (label.to_lowercase(), iri, label))
        .collect();
    sorted.sort();

    let mut taken: BTreeSet<&Iri> = BTreeSet::new();
    let mut out = Vec::new();
    let mut take_tier = |pred: &dyn Fn(&str, &str) -> bool, out: &mut Vec<Candidate>| {
        for (folded, iri, label) in &sorted {
            if out.len() >= limit {
                return;
            }
            if !taken.contains(iri) && pred(folded, label) {
                taken.insert(iri);
                out.push(Candidate {
                    iri: (*iri).clone(),
                    label: label.to_string(),
                });
            }
        }
    };
    take_tier(&|folded, _| folded.starts_with(&needle), &mut out);
    take_tier(&|folded, _| folded.contains(&needle), &mut out);
    if let Ok(re) = RegexBuilder::new(query.trim())
        .case_insensitive(true)
        .size_limit(1 << 20)
        .build()
    {
        take_tier(&|_, label| re.is_match(label), &mut out);
    }
    out
}
