use thiserror::Error;

use crate::model::{Iri, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid IRI {text:?}: {reason}")]
    InvalidIri { text: String, reason: &'static str },
    #[error("namespace {namespace:?} for prefix {prefix:?} must end with '#', '/' or ':'")]
    InvalidNamespace { prefix: String, namespace: String },
    #[error("invalid prefix name {0:?}")]
    InvalidPrefixName(String),
    #[error("{iri} already declared as {existing}, cannot redeclare as {requested}")]
    KindConflict {
        iri: Iri,
        existing: TermKind,
        requested: TermKind,
    },
    #[error("{0} is not declared")]
    Undeclared(Iri),
    #[error("{iri} is a {found}, expected a {expected}")]
    WrongKind {
        iri: Iri,
        expected: TermKind,
        found: TermKind,
    },
    #[error("{0} cannot be a subclass of itself")]
    SelfLoop(Iri),
}

/// A fatal parse problem with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("invalid URL {0:?}")]
    InvalidUrl(String),
    #[error("request timed out after {0} s")]
    Timeout(u64),
    #[error("network error: {0}")]
    Network(String),
    #[error("not found (404): {0}")]
    NotFound(String),
    #[error("server answered with status {status} for {url}")]
    Status { status: u16, url: String },
    #[error("response exceeds the {limit}-byte size cap")]
    TooLarge { limit: u64 },
    #[error("response body is not valid UTF-8")]
    Encoding,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("descriptor: {path}: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("column {column:?} references unknown ontology {ontology:?}")]
    UnknownOntology { column: String, ontology: String },
    #[error("malformed CSV at record {record}: {message}")]
    Csv { record: usize, message: String },
    #[error("CSV column {0:?} is not in the descriptor")]
    UnexpectedColumn(String),
    #[error("descriptor column {0:?} is missing from the CSV header")]
    MissingColumn(String),
    #[error("CSV has no header row")]
    MissingHeader,
    #[error("unterminated quote in cell {0:?}")]
    UnterminatedQuote(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("ontology {0:?} is not loaded")]
    MissingOntology(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Pattern lexing, parsing or static-check failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct PatternError {
    pub line: usize,
    pub column: usize,
    pub kind: PatternErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternErrorKind {
    #[error("unexpected character {0:?}")]
    Lexical(char),
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared variable ?{0}")]
    UndeclaredVariable(String),
    #[error("variable ?{0} declared twice")]
    DuplicateVariable(String),
    #[error("variable ?{name} is {found} and cannot be used as a {expected}")]
    TypeMisuse {
        name: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("generator refers to ?{0} before it is declared")]
    ForwardReference(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpansionError {
    #[error("?{0} has no values")]
    NoValues(String),
    #[error("generator ?{generator} references several multi-valued variables: {variables:?}")]
    MultipleMultiValued {
        generator: String,
        variables: Vec<String>,
    },
    #[error("cannot resolve name {0:?}")]
    UnresolvedName(String),
    #[error("name {name:?} is ambiguous: {candidates:?}")]
    AmbiguousName { name: String, candidates: Vec<Iri> },
    #[error("?{0} is not bound to a column")]
    Unbound(String),
    #[error("binding refers to unknown column {0:?}")]
    UnknownColumn(String),
    #[error("createIntersection over ?{0}, which has no generator")]
    NotGenerated(String),
    #[error("row {0} is outside the table")]
    RowOutOfRange(usize),
    #[error("cannot mint an identifier for an empty label")]
    EmptyLabel,
    #[error("unsupported in expansion: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
