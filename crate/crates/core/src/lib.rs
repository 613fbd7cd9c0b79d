//! Ontology-constrained table templates.
//!
//! Columns of a table are restricted to terms drawn from imported
//! ontologies. Cells are validated and autocompleted against those ranges,
//! and populated rows are expanded through small axiom patterns into OWL,
//! minting identifiers for terms the ontologies do not yet have.

pub mod error;
pub mod expansion;
pub mod io;
pub mod model;
pub mod owl;
pub mod pattern;
pub mod template;
pub mod validation;

pub use error::{ModelError, ParseError};
pub use model::{Iri, OntologyGraph, PrefixMap, Resolution, Term, TermKind};
pub use owl::{Axiom, ClassExpr, GeneratedOntology};
