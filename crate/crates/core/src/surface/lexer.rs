use std::fmt;

use super::ast::Span;
use super::SurfaceError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Version(String),
    Op(String),
    Backslash,
    Arrow,
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    // keywords
    Module,
    Where,
    Import,
    Let,
    In,
    If,
    Then,
    Else,
    Case,
    Of,
    Ver,
    Unversion,
    True,
    False,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Version(v) => write!(f, "version {v}"),
            Tok::Op(o) => write!(f, "`{o}`"),
            Tok::Backslash => write!(f, "`\\`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Eof => write!(f, "end of input"),
            kw => write!(f, "`{}`", keyword_text(kw)),
        }
    }
}

fn keyword_text(t: &Tok) -> &'static str {
    match t {
        Tok::Module => "module",
        Tok::Where => "where",
        Tok::Import => "import",
        Tok::Let => "let",
        Tok::In => "in",
        Tok::If => "if",
        Tok::Then => "then",
        Tok::Else => "else",
        Tok::Case => "case",
        Tok::Of => "of",
        Tok::Ver => "ver",
        Tok::Unversion => "unversion",
        Tok::True => "true",
        Tok::False => "false",
        _ => "",
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "module" => Tok::Module,
        "where" => Tok::Where,
        "import" => Tok::Import,
        "let" => Tok::Let,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "case" => Tok::Case,
        "of" => Tok::Of,
        "ver" => Tok::Ver,
        "unversion" => Tok::Unversion,
        "true" => Tok::True,
        "false" => Tok::False,
        _ => return None,
    })
}

pub fn is_keyword(s: &str) -> bool {
    keyword(s).is_some()
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const OPS: &[&str] = &["==", "/=", "<=", ">=", "&&", "||", "++", "->", "+", "-", "*", "/", "%", "<", ">", ":", "="];

pub fn lex(src: &str) -> Result<Vec<Token>, SurfaceError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    let span = |start: usize, end: usize, line: u32, line_start: usize| Span {
        start,
        end,
        line,
        col: (src[line_start..start].chars().count() + 1) as u32,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("--") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("{-") {
            let start = i;
            let (l0, ls0) = (line, line_start);
            i += 2;
            loop {
                if i >= bytes.len() {
                    return Err(SurfaceError::Syntax {
                        span: span(start, bytes.len(), l0, ls0),
                        expected: vec!["`-}`".into()],
                        found: "end of input".into(),
                    });
                }
                if src[i..].starts_with("-}") {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    line_start = i + 1;
                }
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut dots = 0;
            while dots < 2 && i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                dots += 1;
            }
            let text = &src[start..i];
            match dots {
                0 => Tok::Int(text.parse().map_err(|_| SurfaceError::Syntax {
                    span: span(start, i, line, line_start),
                    expected: vec!["integer literal in range".into()],
                    found: text.into(),
                })?),
                2 => Tok::Version(text.to_string()),
                _ => {
                    return Err(SurfaceError::Syntax {
                        span: span(start, i, line, line_start),
                        expected: vec!["integer".into(), "version X.Y.Z".into()],
                        found: text.into(),
                    })
                }
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            let text = &src[start..i];
            keyword(text).unwrap_or_else(|| Tok::Ident(text.to_string()))
        } else {
            let simple = match c {
                b'\\' => Some(Tok::Backslash),
                b'(' => Some(Tok::LParen),
                b')' => Some(Tok::RParen),
                b'[' => Some(Tok::LBracket),
                b']' => Some(Tok::RBracket),
                b'{' => Some(Tok::LBrace),
                b'}' => Some(Tok::RBrace),
                b',' => Some(Tok::Comma),
                b';' => Some(Tok::Semi),
                _ => None,
            };
            if let Some(t) = simple {
                i += 1;
                t
            } else if let Some(op) = OPS.iter().find(|op| src[i..].starts_with(**op)) {
                i += op.len();
                match *op {
                    "->" => Tok::Arrow,
                    "=" => Tok::Eq,
                    o => Tok::Op(o.to_string()),
                }
            } else {
                let ch = src[i..].chars().next().unwrap();
                return Err(SurfaceError::Syntax {
                    span: span(start, start + ch.len_utf8(), line, line_start),
                    expected: vec!["a token".into()],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push(Token { tok, span: span(start, i, line, line_start) });
    }
    out.push(Token { tok: Tok::Eof, span: span(bytes.len(), bytes.len(), line, line_start) });
    Ok(out)
}
