use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GenExpr, PatternAst, VarType};
use crate::template::TemplateDescriptor;

/// Variable name (without `?`) to column name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColumnBinding(pub BTreeMap<String, String>);

impl ColumnBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, variable: impl Into<String>, column: impl Into<String>) -> Self {
        self.0.insert(variable.into(), column.into());
        self
    }

    pub fn column(&self, variable: &str) -> Option<&str> {
        self.0.get(variable).map(String::as_str)
    }

    pub fn parse_json(text: &str) -> Result<Self, serde_json::Error> {
        let binding: ColumnBinding = serde_json::from_str(text)?;
        Ok(ColumnBinding(
            binding
                .0
                .into_iter()
                .map(|(k, v)| (k.trim_start_matches('?').to_string(), v))
                .collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "camelCase")]
pub enum Violation {
    Unbound { variable: String },
    UnknownColumn { variable: String, column: String },
    GeneratedBound { variable: String, column: String },
    UnknownVariable { variable: String },
    PropertyBound { variable: String, column: String },
    SharedColumn { column: String, variables: Vec<String> },
    MultipleMultiValued { generator: String, variables: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unbound { variable } => write!(f, "?{variable} is not bound to a column"),
            Violation::UnknownColumn { variable, column } => {
                write!(f, "?{variable} is bound to unknown column {column:?}")
            }
            Violation::GeneratedBound { variable, column } => {
                write!(f, "?{variable} is generated and cannot be bound (to {column:?})")
            }
            Violation::UnknownVariable { variable } => {
                write!(f, "binding names ?{variable}, which the pattern does not declare")
            }
            Violation::PropertyBound { variable, column } => write!(
                f,
                "?{variable} is an OBJECTPROPERTY variable; properties must be fixed names, not column {column:?}"
            ),
            Violation::SharedColumn { column, variables } => {
                write!(f, "column {column:?} is bound to several variables: ?{}", variables.join(", ?"))
            }
            Violation::MultipleMultiValued { generator, variables } => write!(
                f,
                "?{generator} refers to several multi-valued columns through ?{}",
                variables.join(", ?")
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a pattern's variable binding against a template.
pub fn check_pattern(ast: &PatternAst, descriptor: &TemplateDescriptor, binding: &ColumnBinding) -> CheckReport {
    let mut violations = Vec::new();
    for decl in &ast.decls {
        let bound = binding.column(&decl.name);
        match (decl.is_generated(), bound) {
            (true, Some(column)) => violations.push(Violation::GeneratedBound {
                variable: decl.name.clone(),
                column: column.to_string(),
            }),
            (true, None) => {}
            (false, None) => violations.push(Violation::Unbound {
                variable: decl.name.clone(),
            }),
            (false, Some(column)) => {
                if decl.var_type == VarType::ObjectProperty {
                    violations.push(Violation::PropertyBound {
                        variable: decl.name.clone(),
                        column: column.to_string(),
                    });
                } else if descriptor.column(column).is_none() {
                    violations.push(Violation::UnknownColumn {
                        variable: decl.name.clone(),
                        column: column.to_string(),
                    });
                }
            }
        }
    }
    for variable in binding.0.keys() {
        if ast.decl(variable).is_none() {
            violations.push(Violation::UnknownVariable {
                variable: variable.clone(),
            });
        }
    }
    let mut by_column: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for decl in ast.base_variables() {
        if let Some(column) = binding.column(&decl.name) {
            by_column.entry(column).or_default().push(decl.name.clone());
        }
    }
    for (column, variables) in by_column {
        if variables.len() > 1 {
            violations.push(Violation::SharedColumn {
                column: column.to_string(),
                variables,
            });
        }
    }
    for decl in &ast.decls {
        let Some(GenExpr::Expr(expr)) = &decl.generator else { continue };
        let multi: Vec<String> = expr
            .variables()
            .into_iter()
            .filter(|v| {
                binding
                    .column(v)
                    .and_then(|c| descriptor.column(c))
                    .is_some_and(|c| c.multi_valued)
            })
            .map(str::to_string)
            .collect();
        if multi.len() > 1 {
            violations.push(Violation::MultipleMultiValued {
                generator: decl.name.clone(),
                variables: multi,
            });
        }
    }
    CheckReport { violations }
}
