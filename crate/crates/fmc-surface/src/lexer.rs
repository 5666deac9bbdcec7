use crate::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Star,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Dot,
    Semi,
    Quest,
    Bang,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Eq,
    Oplus,
    NdPlus,
    Hash(String),
    Ident(String, u32),
    Num(String),
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// No whitespace between this token and the previous one.
    pub glued: bool,
}

fn is_delim(c: char) -> bool {
    "[]<>{}().;:,?!=*".contains(c) || c.is_whitespace()
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let mut glued = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            glued = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            glued = false;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            glued = false;
            continue;
        }
        let start = (line, col);
        let (tok, len) = match c {
            '*' => (Tok::Star, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '<' if chars.get(i + 1) == Some(&'+') && chars.get(i + 2) == Some(&'>') => (Tok::Oplus, 3),
            '<' if chars.get(i + 1) == Some(&'|') && chars.get(i + 2) == Some(&'>') => (Tok::NdPlus, 3),
            '<' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            '.' => (Tok::Dot, 1),
            ';' => (Tok::Semi, 1),
            '?' => (Tok::Quest, 1),
            '!' => (Tok::Bang, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ':' => (Tok::Colon, 1),
            ',' => (Tok::Comma, 1),
            '=' => (Tok::Eq, 1),
            '⊕' => (Tok::Oplus, 1),
            '#' => {
                let mut j = i + 1;
                while j < chars.len() && !is_delim(chars[j]) {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(ParseError::syntax(line, col, "expected a constant name after `#`"));
                }
                (Tok::Hash(chars[i + 1..j].iter().collect()), j - i)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                (Tok::Num(chars[i..j].iter().collect()), j - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                let mut index = 0;
                if chars.get(j) == Some(&'\'') {
                    let mut k = j + 1;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    if k == j + 1 {
                        return Err(ParseError::syntax(line, col + (j - i), "expected digits after `'`"));
                    }
                    let digits: String = chars[j + 1..k].iter().collect();
                    index = digits
                        .parse()
                        .map_err(|_| ParseError::syntax(line, col, "variable index out of range"))?;
                    j = k;
                }
                (Tok::Ident(name, index), j - i)
            }
            other => {
                return Err(ParseError::syntax(
                    line,
                    col,
                    &format!("unexpected character `{other}`"),
                ));
            }
        };
        out.push(Token {
            tok,
            line: start.0,
            col: start.1,
            glued,
        });
        glued = true;
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
        glued: false,
    });
    Ok(out)
}
