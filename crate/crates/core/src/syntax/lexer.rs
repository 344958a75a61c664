use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{line}:{col}: {message}")]
pub struct ParseError {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(file: &str, line: u32, col: u32, message: impl Into<String>) -> ParseError {
        ParseError { file: file.to_string(), line, col, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Bare or quoted name; quoting is lost here and reintroduced by the
    /// printer when the name needs it.
    Name(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    ColonEq,
    Eq,
    Arrow,
    Slash,
    Dollar,
    At,
    Hid,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Name(n) => write!(f, "name {n}"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Semi => write!(f, ";"),
            Tok::Colon => write!(f, ":"),
            Tok::ColonEq => write!(f, ":="),
            Tok::Eq => write!(f, "="),
            Tok::Arrow => write!(f, "->"),
            Tok::Slash => write!(f, "/"),
            Tok::Dollar => write!(f, "$"),
            Tok::At => write!(f, "@"),
            Tok::Hid => write!(f, "?hid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexeme {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub fn is_bare_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '-')
}

pub fn lex(text: &str, file: &str) -> Result<Vec<Lexeme>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! err {
        ($l:expr, $c:expr, $($m:tt)*) => {
            return Err(ParseError::new(file, $l, $c, format!($($m)*)))
        };
    }

    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |i: &mut usize, line: &mut u32, col: &mut u32| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        let simple = |t: Tok| Lexeme { tok: t, line: tline, col: tcol };
        match c {
            '{' => {
                out.push(simple(Tok::LBrace));
                advance(&mut i, &mut line, &mut col);
            }
            '}' => {
                out.push(simple(Tok::RBrace));
                advance(&mut i, &mut line, &mut col);
            }
            '(' => {
                out.push(simple(Tok::LParen));
                advance(&mut i, &mut line, &mut col);
            }
            ')' => {
                out.push(simple(Tok::RParen));
                advance(&mut i, &mut line, &mut col);
            }
            '[' => {
                out.push(simple(Tok::LBracket));
                advance(&mut i, &mut line, &mut col);
            }
            ']' => {
                out.push(simple(Tok::RBracket));
                advance(&mut i, &mut line, &mut col);
            }
            ',' => {
                out.push(simple(Tok::Comma));
                advance(&mut i, &mut line, &mut col);
            }
            ';' => {
                out.push(simple(Tok::Semi));
                advance(&mut i, &mut line, &mut col);
            }
            '=' => {
                out.push(simple(Tok::Eq));
                advance(&mut i, &mut line, &mut col);
            }
            '/' => {
                out.push(simple(Tok::Slash));
                advance(&mut i, &mut line, &mut col);
            }
            '$' => {
                out.push(simple(Tok::Dollar));
                advance(&mut i, &mut line, &mut col);
            }
            '@' => {
                out.push(simple(Tok::At));
                advance(&mut i, &mut line, &mut col);
            }
            ':' => {
                advance(&mut i, &mut line, &mut col);
                if i < chars.len() && chars[i] == '=' {
                    advance(&mut i, &mut line, &mut col);
                    out.push(simple(Tok::ColonEq));
                } else {
                    out.push(simple(Tok::Colon));
                }
            }
            '-' => {
                advance(&mut i, &mut line, &mut col);
                if i < chars.len() && chars[i] == '>' {
                    advance(&mut i, &mut line, &mut col);
                    out.push(simple(Tok::Arrow));
                } else {
                    err!(tline, tcol, "unexpected '-' (names may contain '-' but not start with it)");
                }
            }
            '?' => {
                advance(&mut i, &mut line, &mut col);
                let rest: String = chars[i..].iter().take(3).collect();
                if rest != "hid" {
                    err!(tline, tcol, "expected ?hid");
                }
                for _ in 0..3 {
                    advance(&mut i, &mut line, &mut col);
                }
                if i < chars.len() {
                    let n = chars[i];
                    if n.is_ascii_alphanumeric() || n == '_' || n == '\'' {
                        err!(tline, tcol, "expected ?hid");
                    }
                }
                out.push(simple(Tok::Hid));
            }
            '"' => {
                advance(&mut i, &mut line, &mut col);
                let mut name = String::new();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        err!(tline, tcol, "unterminated quoted name");
                    }
                    if chars[i] == '"' {
                        advance(&mut i, &mut line, &mut col);
                        break;
                    }
                    name.push(chars[i]);
                    advance(&mut i, &mut line, &mut col);
                }
                if name.is_empty() {
                    err!(tline, tcol, "empty quoted name");
                }
                out.push(simple(Tok::Name(name)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while i < chars.len() {
                    let n = chars[i];
                    let continues = n.is_ascii_alphanumeric() || n == '_' || n == '\'';
                    // '-' continues a name unless it starts an "->".
                    let dash = n == '-' && chars.get(i + 1).copied() != Some('>');
                    if continues || dash {
                        name.push(n);
                        advance(&mut i, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(simple(Tok::Name(name)));
            }
            other => err!(tline, tcol, "unexpected character {other:?}"),
        }
    }
    Ok(out)
}
