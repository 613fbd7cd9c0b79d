use super::{AxiomKind, GenExpr, PatternAst, PatternExpr};

fn expr(e: &PatternExpr) -> String {
    match e {
        PatternExpr::Name(n) => n.clone(),
        PatternExpr::Var(v) => format!("?{v}"),
        PatternExpr::And(children) => children
            .iter()
            .map(|c| match c {
                PatternExpr::And(_) => format!("({})", expr(c)),
                _ => expr(c),
            })
            .collect::<Vec<_>>()
            .join(" and "),
        PatternExpr::Some { property, filler } => {
            let filler = match filler.as_ref() {
                PatternExpr::And(_) => format!("({})", expr(filler)),
                other => expr(other),
            };
            format!("{} some {filler}", expr(property))
        }
    }
}

/// Canonical text: one declaration per line, upper-case structural
/// keywords, and only the parentheses the grammar needs.
pub fn print_pattern(ast: &PatternAst) -> String {
    let mut out = String::new();
    let last = ast.decls.len().saturating_sub(1);
    for (i, decl) in ast.decls.iter().enumerate() {
        out.push_str(&format!("?{}:{}", decl.name, decl.var_type.keyword()));
        match &decl.generator {
            Some(GenExpr::Expr(e)) => out.push_str(&format!(" = {}", expr(e))),
            Some(GenExpr::CreateIntersection(v)) => {
                out.push_str(&format!(" = createIntersection(?{v}.VALUES)"))
            }
            None => {}
        }
        out.push_str(if i < last { ",\n" } else { "\n" });
    }
    out.push_str("BEGIN\n");
    for action in &ast.actions {
        let kw = match action.kind {
            AxiomKind::SubClassOf => "SubClassOf",
            AxiomKind::EquivalentTo => "EquivalentTo",
        };
        out.push_str(&format!(
            "    ADD {} {kw} {}\n",
            expr(&action.subject),
            expr(&action.object)
        ));
    }
    out.push_str("END;\n");
    out
}
