use std::f64::consts::PI;

use super::CdlError;

pub const KEYWORDS: &[&str] = &[
    "internal",
    "external",
    "statistics",
    "particle",
    "hbs",
    "bs",
    "phase",
    "sorter",
    "exchange",
    "measure",
    "bin",
    "boson",
    "fermion",
    "distinguishable",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    /// Constant expression folded to one value.
    Number,
    /// `$name`, bound at compile time.
    Parameter,
    Punctuation,
    End,
}

impl TokenKind {
    pub fn describe(self) -> &'static str {
        match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Identifier => "identifier",
            TokenKind::Number => "number",
            TokenKind::Parameter => "parameter",
            TokenKind::Punctuation => "punctuation",
            TokenKind::End => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token.
    pub text: String,
    /// Folded value of number tokens.
    pub value: Option<f64>,
    pub line: usize,
    pub col: usize,
    /// Byte offset of the first character.
    pub offset: usize,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }

    fn error(&self, message: impl Into<String>) -> CdlError {
        CdlError::lex(message, self.line, self.col)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `source` into tokens, dropping whitespace and `#` comments. The
/// last token is always [`TokenKind::End`].
pub fn tokenize(source: &str) -> Result<Vec<Token>, CdlError> {
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        cur.eat_while(char::is_whitespace);
        let (line, col, start) = (cur.line, cur.col, cur.pos);
        let Some(c) = cur.peek() else {
            out.push(Token {
                kind: TokenKind::End,
                text: String::new(),
                value: None,
                line,
                col,
                offset: start,
            });
            return Ok(out);
        };
        let (kind, value) = match c {
            '#' => {
                cur.eat_while(|c| c != '\n');
                continue;
            }
            '-' if cur.peek_at(1) == Some('>') => {
                cur.bump();
                cur.bump();
                (TokenKind::Punctuation, None)
            }
            ':' | '=' => {
                cur.bump();
                (TokenKind::Punctuation, None)
            }
            '$' => {
                cur.bump();
                if !cur.peek().is_some_and(is_ident_start) {
                    return Err(CdlError::lex("expected a parameter name after `$`", line, col));
                }
                cur.eat_while(is_ident_char);
                (TokenKind::Parameter, None)
            }
            c if c == '-' || c == '.' || c.is_ascii_digit() => (TokenKind::Number, Some(expression(&mut cur)?)),
            c if is_ident_start(c) => {
                cur.eat_while(is_ident_char);
                let word = &source[start..cur.pos];
                if word == "pi" {
                    // rewind and read as an expression
                    cur.pos = start;
                    cur.col = col;
                    (TokenKind::Number, Some(expression(&mut cur)?))
                } else if KEYWORDS.contains(&word) {
                    (TokenKind::Keyword, None)
                } else {
                    (TokenKind::Identifier, None)
                }
            }
            other => return Err(cur.error(format!("illegal character `{other}`"))),
        };
        out.push(Token {
            kind,
            text: source[start..cur.pos].to_string(),
            value,
            line,
            col,
            offset: start,
        });
    }
}

/// `-`? atom ((`*` | `/`) atom)*, atom = decimal | `pi`; no inner spaces.
fn expression(cur: &mut Cursor) -> Result<f64, CdlError> {
    let negate = if cur.peek() == Some('-') {
        cur.bump();
        true
    } else {
        false
    };
    let mut value = atom(cur)?;
    while let Some(op @ ('*' | '/')) = cur.peek() {
        cur.bump();
        let rhs = atom(cur)?;
        value = if op == '*' { value * rhs } else { value / rhs };
    }
    if cur.peek().is_some_and(is_ident_char) {
        return Err(cur.error("malformed number"));
    }
    if negate {
        value = -value;
    }
    if !value.is_finite() {
        return Err(cur.error("number is not finite"));
    }
    Ok(value)
}

fn atom(cur: &mut Cursor) -> Result<f64, CdlError> {
    let start = cur.pos;
    match cur.peek() {
        Some('p') if cur.peek_at(1) == Some('i') && !cur.peek_at(2).is_some_and(is_ident_char) => {
            cur.bump();
            cur.bump();
            Ok(PI)
        }
        Some(c) if c.is_ascii_digit() || c == '.' => {
            cur.eat_while(|c| c.is_ascii_digit());
            if cur.peek() == Some('.') {
                cur.bump();
                cur.eat_while(|c| c.is_ascii_digit());
            }
            if matches!(cur.peek(), Some('e' | 'E'))
                && (cur.peek_at(1).is_some_and(|c| c.is_ascii_digit())
                    || (matches!(cur.peek_at(1), Some('+' | '-')) && cur.peek_at(2).is_some_and(|c| c.is_ascii_digit())))
            {
                cur.bump();
                cur.bump();
                cur.eat_while(|c| c.is_ascii_digit());
            }
            cur.src[start..cur.pos].parse::<f64>().map_err(|_| cur.error("malformed number"))
        }
        _ => Err(cur.error("expected a number or `pi`")),
    }
}
