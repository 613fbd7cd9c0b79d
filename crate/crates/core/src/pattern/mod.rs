//! The pattern language: variable declarations with optional generators,
//! followed by `ADD` actions over class expressions.
//!
//! ```text
//! ?cell:CLASS,
//! ?nucleation:CLASS
//! BEGIN
//!     ADD ?cell SubClassOf hasNucleation some ?nucleation
//! END;
//! ```

mod check;
mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use check::{check_pattern, CheckReport, ColumnBinding, Violation};
pub use parser::parse_pattern;
pub use printer::print_pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarType {
    Class,
    ObjectProperty,
    Individual,
}

impl VarType {
    pub fn keyword(self) -> &'static str {
        match self {
            VarType::Class => "CLASS",
            VarType::ObjectProperty => "OBJECTPROPERTY",
            VarType::Individual => "INDIVIDUAL",
        }
    }
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A class expression that may mention variables. Names are kept as
/// written (bare, `prefix:local`, or `<iri>`) and resolved at expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternExpr {
    Name(String),
    Var(String),
    /// At least two conjuncts, none of them an intersection.
    And(Vec<PatternExpr>),
    /// `property` is always a `Name` or `Var`.
    Some {
        property: Box<PatternExpr>,
        filler: Box<PatternExpr>,
    },
}

impl PatternExpr {
    /// Variables mentioned, in first-occurrence order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PatternExpr::Name(_) => {}
            PatternExpr::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            PatternExpr::And(children) => children.iter().for_each(|c| c.collect_vars(out)),
            PatternExpr::Some { property, filler } => {
                property.collect_vars(out);
                filler.collect_vars(out);
            }
        }
    }

    /// Joins conjuncts, flattening nested intersections.
    pub fn and(children: impl IntoIterator<Item = PatternExpr>) -> PatternExpr {
        let mut flat = Vec::new();
        for c in children {
            match c {
                PatternExpr::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            PatternExpr::And(flat)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GenExpr {
    Expr(PatternExpr),
    /// `createIntersection(?v.VALUES)` over a generated variable.
    CreateIntersection(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub var_type: VarType,
    pub generator: Option<GenExpr>,
}

impl VarDecl {
    pub fn is_generated(&self) -> bool {
        self.generator.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomKind {
    SubClassOf,
    EquivalentTo,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub subject: PatternExpr,
    pub kind: AxiomKind,
    pub object: PatternExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternAst {
    pub decls: Vec<VarDecl>,
    pub actions: Vec<Action>,
}

impl PatternAst {
    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    /// Declared variables without generators; these bind to columns.
    pub fn base_variables(&self) -> impl Iterator<Item = &VarDecl> {
        self.decls.iter().filter(|d| !d.is_generated())
    }
}

impl fmt::Display for PatternAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_pattern(self))
    }
}
