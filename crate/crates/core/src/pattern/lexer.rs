use crate::error::{PatternError, PatternErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    /// `?name`
    Var(String),
    /// `?name.VALUES`
    VarValues(String),
    /// bare, prefixed, or `<full>` name; keywords are recognised by the parser
    Word(String),
    Comma,
    Colon,
    Equals,
    Semicolon,
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_word(c: char) -> bool {
    is_ident(c) || matches!(c, ':' | '-')
}

pub(crate) fn tokenize(source: &str) -> Result<Vec<Token>, PatternError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    let err = |line, column, kind| PatternError { line, column, kind };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        let single = match c {
            ',' => Some(TokenKind::Comma),
            '=' => Some(TokenKind::Equals),
            ';' => Some(TokenKind::Semicolon),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ':' => Some(TokenKind::Colon),
            _ => None,
        };
        if let Some(kind) = single {
            advance(1, &mut i);
            tokens.push(Token { kind, line: start_line, column: start_col });
            continue;
        }
        if c == '?' {
            let mut j = i + 1;
            while j < chars.len() && is_ident(chars[j]) {
                j += 1;
            }
            if j == i + 1 {
                return Err(err(start_line, start_col, PatternErrorKind::Syntax("'?' must be followed by a variable name".into())));
            }
            let name: String = chars[i + 1..j].iter().collect();
            let suffix: String = chars[j..chars.len().min(j + 7)].iter().collect();
            let kind = if suffix == ".VALUES" && !chars.get(j + 7).is_some_and(|&c| is_ident(c)) {
                j += 7;
                TokenKind::VarValues(name)
            } else {
                TokenKind::Var(name)
            };
            advance(j - i, &mut i);
            tokens.push(Token { kind, line: start_line, column: start_col });
            continue;
        }
        if c == '<' {
            let Some(len) = chars[i..].iter().position(|&c| c == '>' || c.is_whitespace()) else {
                return Err(err(start_line, start_col, PatternErrorKind::Syntax("unterminated <IRI>".into())));
            };
            if chars[i + len] != '>' {
                return Err(err(start_line, start_col, PatternErrorKind::Syntax("unterminated <IRI>".into())));
            }
            let text: String = chars[i..=i + len].iter().collect();
            advance(len + 1, &mut i);
            tokens.push(Token { kind: TokenKind::Word(text), line: start_line, column: start_col });
            continue;
        }
        if is_ident(c) {
            let mut j = i;
            // a '.' belongs to the name only between name characters
            while j < chars.len()
                && (is_word(chars[j]) || (chars[j] == '.' && chars.get(j + 1).is_some_and(|&n| is_word(n))))
            {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            advance(j - i, &mut i);
            tokens.push(Token { kind: TokenKind::Word(text), line: start_line, column: start_col });
            continue;
        }
        return Err(err(start_line, start_col, PatternErrorKind::Lexical(c)));
    }
    Ok(tokens)
}
