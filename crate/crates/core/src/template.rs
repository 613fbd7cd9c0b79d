//! Template descriptors (column ranges), tables loaded from CSV, and
//! multi-value cell splitting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::TemplateError;
use crate::io::OntologySource;
use crate::model::{Iri, PrefixMap};

pub const DESCRIPTOR_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RangeKind {
    AllSubClasses,
    DirectSubClasses,
    AllIndividuals,
    DirectIndividuals,
    FreeText,
}

impl RangeKind {
    pub fn is_subclass_kind(self) -> bool {
        matches!(self, RangeKind::AllSubClasses | RangeKind::DirectSubClasses)
    }
}

/// The set of terms a column accepts. `FreeText` accepts anything and has
/// no ontology or root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RangeSpec {
    pub ontology_id: Option<String>,
    pub root: Option<Iri>,
    pub kind: RangeKind,
    pub follow_properties: BTreeSet<Iri>,
    pub include_root: bool,
}

impl RangeSpec {
    pub fn free_text() -> Self {
        RangeSpec {
            ontology_id: None,
            root: None,
            kind: RangeKind::FreeText,
            follow_properties: BTreeSet::new(),
            include_root: false,
        }
    }

    pub fn new(ontology_id: impl Into<String>, root: Iri, kind: RangeKind) -> Self {
        RangeSpec {
            ontology_id: Some(ontology_id.into()),
            root: Some(root),
            kind,
            follow_properties: BTreeSet::new(),
            include_root: false,
        }
    }

    pub fn is_free_text(&self) -> bool {
        self.kind == RangeKind::FreeText
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub range: RangeSpec,
    pub multi_valued: bool,
    pub delimiter: char,
    pub mint_unknown: bool,
    pub relationship_note: String,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, range: RangeSpec) -> Self {
        ColumnSpec {
            name: name.into(),
            range,
            multi_valued: false,
            delimiter: ',',
            mint_unknown: false,
            relationship_note: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateDescriptor {
    pub columns: Vec<ColumnSpec>,
    pub prefixes: PrefixMap,
    pub ontology_sources: Vec<OntologySource>,
    pub version: String,
}

impl TemplateDescriptor {
    pub fn column(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let raw = RawDescriptor {
            version: self.version.clone(),
            prefixes: self.prefixes.iter().map(|(p, n)| (p.to_string(), n.to_string())).collect(),
            ontology_sources: self.ontology_sources.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| RawColumn {
                    name: c.name.clone(),
                    range: RawRange {
                        ontology_id: c.range.ontology_id.clone(),
                        root: c.range.root.as_ref().map(Iri::to_string),
                        kind: c.range.kind,
                        follow_properties: c.range.follow_properties.iter().map(Iri::to_string).collect(),
                        include_root: c.range.include_root,
                    },
                    multi_valued: c.multi_valued,
                    delimiter: c.delimiter.to_string(),
                    mint_unknown: c.mint_unknown,
                    relationship_note: c.relationship_note.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("descriptor serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawDescriptor {
    version: String,
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
    #[serde(default)]
    ontology_sources: Vec<OntologySource>,
    columns: Vec<RawColumn>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawColumn {
    name: String,
    range: RawRange,
    #[serde(default)]
    multi_valued: bool,
    #[serde(default = "default_delimiter")]
    delimiter: String,
    #[serde(default)]
    mint_unknown: bool,
    #[serde(default)]
    relationship_note: String,
}

fn default_delimiter() -> String {
    ",".to_string()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawRange {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ontology_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<String>,
    kind: RangeKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    follow_properties: Vec<String>,
    #[serde(default)]
    include_root: bool,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> TemplateError {
    TemplateError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Expands `prefix:local` when `prefix` is declared, otherwise reads the
/// text as an absolute IRI.
fn resolve_iri(text: &str, prefixes: &PrefixMap, path: &str) -> Result<Iri, TemplateError> {
    if let Some((prefix, _)) = text.split_once(':') {
        if prefixes.get(prefix).is_some() {
            return prefixes
                .expand(text)
                .ok_or_else(|| schema(path, format!("cannot expand {text:?}")));
        }
    }
    Iri::parse(text).map_err(|e| schema(path, e.to_string()))
}

pub fn parse_descriptor(document: &str) -> Result<TemplateDescriptor, TemplateError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let raw: RawDescriptor = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;
    if raw.version != DESCRIPTOR_VERSION {
        return Err(schema("version", format!("unsupported version {:?}", raw.version)));
    }
    let mut prefixes = PrefixMap::new();
    for (p, ns) in &raw.prefixes {
        prefixes
            .insert(p, ns)
            .map_err(|e| schema(format!("prefixes.{p}"), e.to_string()))?;
    }
    let mut source_ids = BTreeSet::new();
    for (i, source) in raw.ontology_sources.iter().enumerate() {
        if source.id.is_empty() {
            return Err(schema(format!("ontologySources[{i}].id"), "empty ontology id"));
        }
        if !source_ids.insert(source.id.as_str()) {
            return Err(schema(
                format!("ontologySources[{i}].id"),
                format!("duplicate ontology id {:?}", source.id),
            ));
        }
    }
    if raw.columns.is_empty() {
        return Err(schema("columns", "at least one column is required"));
    }
    let mut names = BTreeSet::new();
    let mut columns = Vec::with_capacity(raw.columns.len());
    for (i, col) in raw.columns.into_iter().enumerate() {
        let at = |field: &str| format!("columns[{i}].{field}");
        if col.name.trim().is_empty() {
            return Err(schema(at("name"), "column name must be non-empty"));
        }
        if !names.insert(col.name.clone()) {
            return Err(TemplateError::DuplicateColumn(col.name));
        }
        let mut chars = col.delimiter.chars();
        let delimiter = match (chars.next(), chars.next()) {
            (Some(c), None) if c != '"' => c,
            (Some('"'), None) => return Err(schema(at("delimiter"), "delimiter cannot be the quote character")),
            _ => return Err(schema(at("delimiter"), "delimiter must be a single character")),
        };
        let r = col.range;
        let range = if r.kind == RangeKind::FreeText {
            if r.ontology_id.is_some() || r.root.is_some() || !r.follow_properties.is_empty() || r.include_root {
                return Err(schema(at("range"), "FreeText ranges take no ontology, root or properties"));
            }
            RangeSpec::free_text()
        } else {
            let ontology_id = r
                .ontology_id
                .ok_or_else(|| schema(at("range.ontologyId"), "missing field"))?;
            if !source_ids.contains(ontology_id.as_str()) {
                return Err(TemplateError::UnknownOntology {
                    column: col.name,
                    ontology: ontology_id,
                });
            }
            let root_text = r.root.ok_or_else(|| schema(at("range.root"), "missing field"))?;
            let root = resolve_iri(&root_text, &prefixes, &at("range.root"))?;
            if !r.follow_properties.is_empty() && !r.kind.is_subclass_kind() {
                return Err(schema(
                    at("range.followProperties"),
                    "followProperties only applies to subclass ranges",
                ));
            }
            let follow_properties = r
                .follow_properties
                .iter()
                .enumerate()
                .map(|(j, p)| resolve_iri(p, &prefixes, &at(&format!("range.followProperties[{j}]"))))
                .collect::<Result<_, _>>()?;
            RangeSpec {
                ontology_id: Some(ontology_id),
                root: Some(root),
                kind: r.kind,
                follow_properties,
                include_root: r.include_root,
            }
        };
        columns.push(ColumnSpec {
            name: col.name,
            range,
            multi_valued: col.multi_valued,
            delimiter,
            mint_unknown: col.mint_unknown,
            relationship_note: col.relationship_note,
        });
    }
    Ok(TemplateDescriptor {
        columns,
        prefixes,
        ontology_sources: raw.ontology_sources,
        version: raw.version,
    })
}

/// A rectangular grid of raw cell texts under a header row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TableDoc {
    pub fn new(header: Vec<String>) -> Self {
        TableDoc {
            header,
            rows: Vec::new(),
        }
    }

    /// Appends a row, padding short rows with empty cells. Long rows are
    /// truncated.
    pub fn push_row(&mut self, mut row: Vec<String>) {
        row.resize(self.header.len(), String::new());
        self.rows.push(row);
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.header.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&str> {
        self.rows.get(row)?.get(col).map(String::as_str)
    }

    pub fn set_cell(&mut self, row: usize, col: usize, text: impl Into<String>) -> bool {
        match self.rows.get_mut(row).and_then(|r| r.get_mut(col)) {
            Some(cell) => {
                *cell = text.into();
                true
            }
            None => false,
        }
    }

    /// RFC 4180 text with CRLF line endings.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("input was UTF-8")
    }
}

/// Line of the first double quote that never closes, if any.
fn unterminated_quote_line(text: &str) -> Option<usize> {
    let mut open_line = None;
    let mut line = 1;
    for c in text.chars() {
        match c {
            '"' => open_line = if open_line.is_some() { None } else { Some(line) },
            '\n' => line += 1,
            _ => {}
        }
    }
    open_line
}

/// Reads a CSV table and checks its header against the descriptor.
pub fn load_csv(document: &str, descriptor: &TemplateDescriptor) -> Result<TableDoc, TemplateError> {
    let document = document.strip_prefix('\u{feff}').unwrap_or(document);
    if let Some(line) = unterminated_quote_line(document) {
        return Err(TemplateError::Csv {
            record: line,
            message: "unterminated quoted field".to_string(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(document.as_bytes());
    let mut records = reader.records();
    let header: Vec<String> = match records.next() {
        Some(Ok(rec)) => rec.iter().map(|h| h.trim().to_string()).collect(),
        Some(Err(e)) => {
            return Err(TemplateError::Csv {
                record: 1,
                message: e.to_string(),
            })
        }
        None => return Err(TemplateError::MissingHeader),
    };
    let mut seen = BTreeSet::new();
    for name in &header {
        if !seen.insert(name.as_str()) {
            return Err(TemplateError::DuplicateColumn(name.clone()));
        }
        if descriptor.column(name).is_none() {
            return Err(TemplateError::UnexpectedColumn(name.clone()));
        }
    }
    for col in &descriptor.columns {
        if !seen.contains(col.name.as_str()) {
            return Err(TemplateError::MissingColumn(col.name.clone()));
        }
    }
    let mut table = TableDoc::new(header);
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| TemplateError::Csv {
            record: i + 2,
            message: e.to_string(),
        })?;
        table.push_row(rec.iter().map(str::to_string).collect());
    }
    while table
        .rows
        .last()
        .is_some_and(|r| r.iter().all(String::is_empty))
    {
        table.rows.pop();
    }
    Ok(table)
}

/// Splits a cell into its values. Single-valued columns yield the trimmed
/// text; multi-valued columns split on the delimiter outside double
/// quotes. Empty values are dropped.
pub fn split_multi_value(cell: &str, spec: &ColumnSpec) -> Result<Vec<String>, TemplateError> {
    if !spec.multi_valued {
        let trimmed = cell.trim();
        return Ok(if trimmed.is_empty() {
            Vec::new()
        } else {
            vec![trimmed.to_string()]
        });
    }
    let mut values = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    let mut chars = cell.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                chars.next();
                current.push('"');
            }
            '"' => in_quotes = !in_quotes,
            c if c == spec.delimiter && !in_quotes => {
                values.push(std::mem::take(&mut current));
            }
            c => current.push(c),
        }
    }
    if in_quotes {
        return Err(TemplateError::UnterminatedQuote(cell.to_string()));
    }
    values.push(current);
    Ok(values
        .into_iter()
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect())
}
