use super::lexer::{tokenize, Token, TokenKind};
use super::{Action, AxiomKind, GenExpr, PatternAst, PatternExpr, VarDecl, VarType};
use crate::error::{PatternError, PatternErrorKind};

const KEYWORDS: [&str; 11] = [
    "begin",
    "end",
    "add",
    "and",
    "some",
    "subclassof",
    "equivalentto",
    "createintersection",
    "class",
    "objectproperty",
    "individual",
];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// (line, column) just past the input, for end-of-input errors
    end: (usize, usize),
}

/// Where a variable is used, for type checking.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Position {
    Class,
    Property,
}

fn is_kw(tok: Option<&Token>, kw: &str) -> bool {
    matches!(tok, Some(Token { kind: TokenKind::Word(w), .. }) if w.eq_ignore_ascii_case(kw))
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn error(&self, kind: PatternErrorKind) -> PatternError {
        let (line, column) = self.here();
        PatternError { line, column, kind }
    }

    fn syntax(&self, message: impl Into<String>) -> PatternError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => describe(&t.kind),
        };
        self.error(PatternErrorKind::Syntax(format!("{}, found {found}", message.into())))
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<(), PatternError> {
        if self.peek().map(|t| &t.kind) == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), PatternError> {
        if is_kw(self.peek(), kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected {kw}")))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn decl(&mut self) -> Result<VarDecl, PatternError> {
        let name = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Var(n)) => n.clone(),
            _ => return Err(self.syntax("expected a variable declaration")),
        };
        self.pos += 1;
        self.expect(TokenKind::Colon, "':'")?;
        let var_type = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Word(w)) if w.eq_ignore_ascii_case("CLASS") => VarType::Class,
            Some(TokenKind::Word(w)) if w.eq_ignore_ascii_case("OBJECTPROPERTY") => VarType::ObjectProperty,
            Some(TokenKind::Word(w)) if w.eq_ignore_ascii_case("INDIVIDUAL") => VarType::Individual,
            _ => return Err(self.syntax("expected CLASS, OBJECTPROPERTY or INDIVIDUAL")),
        };
        self.pos += 1;
        let generator = if self.eat(&TokenKind::Equals) {
            if is_kw(self.peek(), "createIntersection") {
                self.pos += 1;
                self.expect(TokenKind::LParen, "'('")?;
                let over = match self.peek().map(|t| &t.kind) {
                    Some(TokenKind::VarValues(n)) => n.clone(),
                    _ => return Err(self.syntax("expected ?variable.VALUES")),
                };
                self.pos += 1;
                self.expect(TokenKind::RParen, "')'")?;
                Some(GenExpr::CreateIntersection(over))
            } else {
                Some(GenExpr::Expr(self.class_expr()?))
            }
        } else {
            None
        };
        Ok(VarDecl { name, var_type, generator })
    }

    fn class_expr(&mut self) -> Result<PatternExpr, PatternError> {
        let mut parts = vec![self.restriction()?];
        while is_kw(self.peek(), "and") {
            self.pos += 1;
            parts.push(self.restriction()?);
        }
        Ok(PatternExpr::and(parts))
    }

    /// `atom ('some' restriction)?`; the atom before `some` must be a name
    /// or variable.
    fn restriction(&mut self) -> Result<PatternExpr, PatternError> {
        let (line, column) = self.here();
        let atom = self.atom()?;
        if !is_kw(self.peek(), "some") {
            return Ok(atom);
        }
        if !matches!(atom, PatternExpr::Name(_) | PatternExpr::Var(_)) || self.tokens[self.pos - 1].kind == TokenKind::RParen {
            return Err(PatternError {
                line,
                column,
                kind: PatternErrorKind::Syntax("restriction property must be a name or variable".into()),
            });
        }
        self.pos += 1;
        let filler = self.restriction()?;
        Ok(PatternExpr::Some {
            property: Box::new(atom),
            filler: Box::new(filler),
        })
    }

    fn atom(&mut self) -> Result<PatternExpr, PatternError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.syntax("expected a class expression"));
        };
        match tok.kind {
            TokenKind::Var(name) => {
                self.pos += 1;
                Ok(PatternExpr::Var(name))
            }
            TokenKind::VarValues(_) => Err(self.syntax(".VALUES is only allowed inside createIntersection")),
            TokenKind::Word(w) if !KEYWORDS.contains(&w.to_ascii_lowercase().as_str()) => {
                self.pos += 1;
                Ok(PatternExpr::Name(w))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.class_expr()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(self.syntax("expected a class expression")),
        }
    }

    fn action(&mut self) -> Result<Action, PatternError> {
        self.expect_kw("ADD")?;
        let subject = self.class_expr()?;
        let kind = if is_kw(self.peek(), "SubClassOf") {
            AxiomKind::SubClassOf
        } else if is_kw(self.peek(), "equivalentTo") {
            AxiomKind::EquivalentTo
        } else {
            return Err(self.syntax("expected SubClassOf or equivalentTo"));
        };
        self.pos += 1;
        let object = self.class_expr()?;
        Ok(Action { subject, kind, object })
    }

    fn pattern(&mut self) -> Result<PatternAst, PatternError> {
        let mut decls = vec![self.decl()?];
        while self.eat(&TokenKind::Comma) {
            decls.push(self.decl()?);
        }
        self.expect_kw("BEGIN")?;
        let mut actions = vec![self.action()?];
        loop {
            self.eat(&TokenKind::Semicolon);
            if is_kw(self.peek(), "END") {
                break;
            }
            actions.push(self.action()?);
        }
        self.expect_kw("END")?;
        self.eat(&TokenKind::Semicolon);
        if self.peek().is_some() {
            return Err(self.syntax("expected end of pattern"));
        }
        Ok(PatternAst { decls, actions })
    }
}

fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Var(n) => format!("?{n}"),
        TokenKind::VarValues(n) => format!("?{n}.VALUES"),
        TokenKind::Word(w) => format!("{w:?}"),
        TokenKind::Comma => "','".into(),
        TokenKind::Colon => "':'".into(),
        TokenKind::Equals => "'='".into(),
        TokenKind::Semicolon => "';'".into(),
        TokenKind::LParen => "'('".into(),
        TokenKind::RParen => "')'".into(),
    }
}

/// Finds the position of the first token mentioning `?name`, for errors
/// raised after parsing.
fn locate(tokens: &[Token], name: &str, from: usize) -> (usize, usize) {
    tokens[from..]
        .iter()
        .find(|t| matches!(&t.kind, TokenKind::Var(n) | TokenKind::VarValues(n) if n == name))
        .or_else(|| tokens.first())
        .map(|t| (t.line, t.column))
        .unwrap_or((1, 1))
}

fn check_uses(
    expr: &PatternExpr,
    at: Position,
    declared: &dyn Fn(&str) -> Option<VarType>,
    later: &dyn Fn(&str) -> bool,
) -> Result<(), (String, PatternErrorKind)> {
    match expr {
        PatternExpr::Name(_) => Ok(()),
        PatternExpr::Var(v) => {
            let Some(ty) = declared(v) else {
                let kind = if later(v) {
                    PatternErrorKind::ForwardReference(v.clone())
                } else {
                    PatternErrorKind::UndeclaredVariable(v.clone())
                };
                return Err((v.clone(), kind));
            };
            let ok = match at {
                Position::Class => ty == VarType::Class,
                Position::Property => ty == VarType::ObjectProperty,
            };
            if ok {
                Ok(())
            } else {
                Err((
                    v.clone(),
                    PatternErrorKind::TypeMisuse {
                        name: v.clone(),
                        expected: match at {
                            Position::Class => "class",
                            Position::Property => "property",
                        },
                        found: ty.keyword(),
                    },
                ))
            }
        }
        PatternExpr::And(children) => children
            .iter()
            .try_for_each(|c| check_uses(c, Position::Class, declared, later)),
        PatternExpr::Some { property, filler } => {
            check_uses(property, Position::Property, declared, later)?;
            check_uses(filler, Position::Class, declared, later)
        }
    }
}

/// Start token index of each declaration, used to position errors.
fn decl_starts(tokens: &[Token]) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut expect_decl = true;
    let mut depth = 0usize;
    for (i, t) in tokens.iter().enumerate() {
        match &t.kind {
            TokenKind::Var(_) if expect_decl => {
                starts.push(i);
                expect_decl = false;
            }
            TokenKind::LParen => depth += 1,
            TokenKind::RParen => depth = depth.saturating_sub(1),
            TokenKind::Comma if depth == 0 => expect_decl = true,
            TokenKind::Word(w) if w.eq_ignore_ascii_case("BEGIN") => break,
            _ => {}
        }
    }
    starts
}

fn static_checks(ast: &PatternAst, tokens: &[Token]) -> Result<(), PatternError> {
    let starts = decl_starts(tokens);
    let body_start = tokens
        .iter()
        .position(|t| matches!(&t.kind, TokenKind::Word(w) if w.eq_ignore_ascii_case("BEGIN")))
        .unwrap_or(0);
    let all: Vec<&str> = ast.decls.iter().map(|d| d.name.as_str()).collect();

    for (i, decl) in ast.decls.iter().enumerate() {
        let start = starts.get(i).copied().unwrap_or(0);
        let at = |kind: PatternErrorKind, name: &str| {
            let (line, column) = locate(tokens, name, start);
            PatternError { line, column, kind }
        };
        if ast.decls[..i].iter().any(|d| d.name == decl.name) {
            return Err(at(PatternErrorKind::DuplicateVariable(decl.name.clone()), &decl.name));
        }
        let earlier = &ast.decls[..i];
        let declared = |v: &str| earlier.iter().find(|d| d.name == v).map(|d| d.var_type);
        let later = |v: &str| all.contains(&v);
        match &decl.generator {
            None => {}
            Some(_) if decl.var_type != VarType::Class => {
                return Err(at(
                    PatternErrorKind::Syntax(format!("generated variable ?{} must be CLASS", decl.name)),
                    &decl.name,
                ))
            }
            Some(GenExpr::Expr(expr)) => {
                check_uses(expr, Position::Class, &declared, &later).map_err(|(v, kind)| at(kind, &v))?;
            }
            Some(GenExpr::CreateIntersection(over)) => match earlier.iter().find(|d| &d.name == over) {
                Some(d) if matches!(d.generator, Some(GenExpr::Expr(_))) => {}
                Some(_) => {
                    return Err(at(
                        PatternErrorKind::Syntax(format!(
                            "?{over}.VALUES requires a variable generated from a class expression"
                        )),
                        over,
                    ))
                }
                None if all.contains(&over.as_str()) => {
                    return Err(at(PatternErrorKind::ForwardReference(over.clone()), over))
                }
                None => return Err(at(PatternErrorKind::UndeclaredVariable(over.clone()), over)),
            },
        }
    }

    let declared = |v: &str| ast.decl(v).map(|d| d.var_type);
    let never = |_: &str| false;
    for action in &ast.actions {
        for expr in [&action.subject, &action.object] {
            check_uses(expr, Position::Class, &declared, &never).map_err(|(v, kind)| {
                let (line, column) = locate(tokens, &v, body_start);
                PatternError { line, column, kind }
            })?;
        }
    }
    Ok(())
}

/// Parses and statically checks a pattern.
pub fn parse_pattern(source: &str) -> Result<PatternAst, PatternError> {
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    let tokens = tokenize(source)?;
    let end = {
        let lines = source.split('\n').count().max(1);
        let last = source.rsplit('\n').next().unwrap_or("");
        (lines, last.chars().count() + 1)
    };
    let mut parser = Parser { tokens, pos: 0, end };
    let ast = parser.pattern()?;
    static_checks(&ast, &parser.tokens)?;
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const NUCLEATION: &str = "?cell:CLASS,\n?nucleation:CLASS\nBEGIN\n\tADD ?cell SubClassOf hasNucleation some ?nucleation\nEND;\n";

    pub const KUPO_ANATOMY: &str = "?cell:CLASS,
?anatomyPart:CLASS,
?partOfRestriction:CLASS = cell and part_of some ?anatomyPart,
?anatomyIntersection:CLASS = createIntersection(?partOfRestriction.VALUES)
BEGIN
    ADD ?cell equivalentTo ?anatomyIntersection
END;";

    fn var(n: &str) -> PatternExpr {
        PatternExpr::Var(n.into())
    }

    fn name(n: &str) -> PatternExpr {
        PatternExpr::Name(n.into())
    }

    #[test]
    fn nucleation_pattern() {
        let ast = parse_pattern(NUCLEATION).unwrap();
        assert_eq!(ast.decls.len(), 2);
        assert_eq!(ast.actions.len(), 1);
        let action = &ast.actions[0];
        assert_eq!(action.kind, AxiomKind::SubClassOf);
        assert_eq!(action.subject, var("cell"));
        assert_eq!(
            action.object,
            PatternExpr::Some {
                property: Box::new(name("hasNucleation")),
                filler: Box::new(var("nucleation"))
            }
        );
    }

    #[test]
    fn kupo_anatomy_pattern() {
        let ast = parse_pattern(KUPO_ANATOMY).unwrap();
        assert_eq!(ast.decls.len(), 4);
        assert_eq!(ast.decls.iter().filter(|d| d.is_generated()).count(), 2);
        assert_eq!(ast.actions[0].kind, AxiomKind::EquivalentTo);
        let Some(GenExpr::Expr(PatternExpr::And(parts))) = &ast.decls[2].generator else {
            panic!("{:?}", ast.decls[2]);
        };
        assert_eq!(parts[0], name("cell"));
        assert_eq!(
            ast.decls[3].generator,
            Some(GenExpr::CreateIntersection("partOfRestriction".into()))
        );
    }

    #[test]
    fn keywords_case_insensitive() {
        let ast = parse_pattern("?x:class begin add ?x EquivalentTo a AND b end").unwrap();
        assert_eq!(ast.actions[0].object, PatternExpr::And(vec![name("a"), name("b")]));
    }

    #[test]
    fn undeclared_variable() {
        let e = parse_pattern("?x:CLASS BEGIN ADD ?y SubClassOf ?x END;").unwrap_err();
        assert_eq!(e.kind, PatternErrorKind::UndeclaredVariable("y".into()));
        assert_eq!((e.line, e.column), (1, 20));
    }

    #[test]
    fn forward_reference() {
        let e = parse_pattern("?g:CLASS = a and r some ?x, ?x:CLASS BEGIN ADD ?x SubClassOf ?g END").unwrap_err();
        assert_eq!(e.kind, PatternErrorKind::ForwardReference("x".into()));
        let e = parse_pattern("?i:CLASS = createIntersection(?g.VALUES), ?g:CLASS = a BEGIN ADD ?i SubClassOf ?g END")
            .unwrap_err();
        assert_eq!(e.kind, PatternErrorKind::ForwardReference("g".into()));
    }

    #[test]
    fn type_misuse() {
        let e = parse_pattern("?p:OBJECTPROPERTY BEGIN ADD ?p SubClassOf a END").unwrap_err();
        assert!(matches!(e.kind, PatternErrorKind::TypeMisuse { .. }));
        let e = parse_pattern("?c:CLASS BEGIN ADD a SubClassOf ?c some b END").unwrap_err();
        assert!(matches!(e.kind, PatternErrorKind::TypeMisuse { .. }));
        parse_pattern("?p:OBJECTPROPERTY, ?c:CLASS BEGIN ADD ?c SubClassOf ?p some b END").unwrap();
    }

    #[test]
    fn values_rules() {
        assert!(parse_pattern("?x:CLASS BEGIN ADD ?x.VALUES SubClassOf a END").is_err());
        // over a base variable
        assert!(parse_pattern("?x:CLASS, ?i:CLASS = createIntersection(?x.VALUES) BEGIN ADD ?x SubClassOf ?i END").is_err());
    }

    #[test]
    fn syntax_errors_positioned() {
        let e = parse_pattern("?x:CLASS\nBEGIN\nADD ?x SubClassOf\nEND").unwrap_err();
        assert_eq!((e.line, e.column), (4, 1));
        let e = parse_pattern("?x:CLASS BEGIN END").unwrap_err();
        assert!(matches!(e.kind, PatternErrorKind::Syntax(_)));
        assert!(parse_pattern("").is_err());
        assert!(parse_pattern("?x:CLASS BEGIN ADD ?x SubClassOf (a and b) some c END").is_err());
        assert!(parse_pattern("?x:CLASS BEGIN ADD ?x SubClassOf a END; trailing").is_err());
        assert!(parse_pattern("?x:CLASS, ?x:CLASS BEGIN ADD ?x SubClassOf a END").is_err());
    }

    #[test]
    fn intersection_flattening() {
        let a = parse_pattern("?x:CLASS BEGIN ADD ?x SubClassOf a and b and c END").unwrap();
        let b = parse_pattern("?x:CLASS BEGIN ADD ?x SubClassOf (a and b) and c END").unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.actions[0].object,
            PatternExpr::And(vec![name("a"), name("b"), name("c")])
        );
    }

    #[test]
    fn multiple_actions() {
        let ast = parse_pattern("?x:CLASS BEGIN ADD ?x SubClassOf a; ADD ?x SubClassOf b ADD ?x equivalentTo c END").unwrap();
        assert_eq!(ast.actions.len(), 3);
    }

    #[test]
    fn restriction_chain_right_nested() {
        let ast = parse_pattern("?x:CLASS BEGIN ADD ?x SubClassOf r some s some c END").unwrap();
        let PatternExpr::Some { filler, .. } = &ast.actions[0].object else { panic!() };
        assert!(matches!(**filler, PatternExpr::Some { .. }));
    }
}
