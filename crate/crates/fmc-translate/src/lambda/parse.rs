//! Concrete syntax of lambda-terms and their types.
//!
//! ```text
//! term   ::= \pat:type. term | loc := choice; term | choice
//! choice ::= app (<+> app)*
//! app    ::= atom atom*
//! atom   ::= x | #v | numeral | !loc | c@atom | () | (term, ..., term)
//! pat    ::= x | () | (pat, ..., pat)
//! type   ::= prod -> type | prod
//! prod   ::= tatom (* tatom)*
//! tatom  ::= o | 1 | (type)
//! ```
//!
//! `λ` may be written for `\`.

use std::sync::Arc;

use fmc_term::{Location, Symbol, VarName};

use super::{LType, Lambda, Pattern};
use crate::TranslateError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(&'static str),
}

const SYMBOLS: [&str; 14] = [
    "<+>", ":=", "->", "\\", "λ", ".", ":", ",", "(", ")", "#", "!", "@", ";",
];
const STAR: &str = "*";

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, TranslateError> {
    let mut out = Vec::new();
    let mut i = 0;
    let bytes: Vec<char> = text.chars().collect();
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && bytes.get(i + 1) == Some(&'-') {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == '\'' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push((Tok::Ident(bytes[start..i].iter().collect()), start));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(bytes[start..i].iter().collect()), start));
            continue;
        }
        for s in SYMBOLS.iter().chain(std::iter::once(&STAR)) {
            let chars: Vec<char> = s.chars().collect();
            if bytes[i..].starts_with(&chars) {
                out.push((Tok::Sym(s), i));
                i += chars.len();
                continue 'outer;
            }
        }
        return Err(TranslateError::Parse(format!(
            "unexpected character `{c}` at offset {i}"
        )));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn error(&self, msg: &str) -> TranslateError {
        match self.toks.get(self.pos) {
            Some((t, at)) => TranslateError::Parse(format!("{msg} at offset {at}, found {t:?}")),
            None => TranslateError::Parse(format!("{msg} at end of input")),
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), TranslateError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<String, TranslateError> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(x)
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn term(&mut self) -> Result<Lambda, TranslateError> {
        if self.eat("\\") || self.eat("λ") {
            let p = self.pattern()?;
            let ty = if self.eat(":") { Some(self.ty()?) } else { None };
            self.expect(".")?;
            let body = self.term()?;
            return Ok(Lambda::abs(p, ty, body));
        }
        if matches!((self.peek(), self.peek2()), (Some(Tok::Ident(_)), Some(Tok::Sym(":=")))) {
            let c = self.ident()?;
            self.pos += 1;
            let n = self.choice()?;
            self.expect(";")?;
            let k = self.term()?;
            return Ok(Lambda::Assign(Location::new(&c), Arc::new(n), Arc::new(k)));
        }
        self.choice()
    }

    fn choice(&mut self) -> Result<Lambda, TranslateError> {
        let mut m = self.app()?;
        while self.eat("<+>") {
            let n = self.app()?;
            m = Lambda::Choice(Arc::new(m), Arc::new(n));
        }
        Ok(m)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(_)) => !matches!(self.peek2(), Some(Tok::Sym(":="))),
            Some(Tok::Num(_)) => true,
            Some(Tok::Sym(s)) => matches!(*s, "#" | "!" | "("),
            None => false,
        }
    }

    fn app(&mut self) -> Result<Lambda, TranslateError> {
        let mut m = self.atom()?;
        while self.starts_atom() {
            let n = self.atom()?;
            m = Lambda::app(m, n);
        }
        // A trailing abstraction is the last argument: `f \x:o. x`.
        if matches!(self.peek(), Some(Tok::Sym("\\" | "λ"))) {
            let n = self.term()?;
            m = Lambda::app(m, n);
        }
        Ok(m)
    }

    fn atom(&mut self) -> Result<Lambda, TranslateError> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                if self.eat("@") {
                    let arg = self.atom()?;
                    return Ok(Lambda::cconst(&Symbol::new(&x), arg));
                }
                Ok(Lambda::Var(var_name(&x)))
            }
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Lambda::VConst(Symbol::new(&n)))
            }
            Some(Tok::Sym("#")) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Ident(v) | Tok::Num(v)) => {
                        self.pos += 1;
                        Ok(Lambda::VConst(Symbol::new(&v)))
                    }
                    _ => Err(self.error("expected a constant after `#`")),
                }
            }
            Some(Tok::Sym("!")) => {
                self.pos += 1;
                let c = self.ident()?;
                Ok(Lambda::Read(Location::new(&c)))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                if self.eat(")") {
                    return Ok(Lambda::unit());
                }
                let mut items = vec![self.term()?];
                while self.eat(",") {
                    items.push(self.term()?);
                }
                self.expect(")")?;
                Ok(Lambda::tuple(items))
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn pattern(&mut self) -> Result<Pattern, TranslateError> {
        if self.eat("(") {
            if self.eat(")") {
                return Ok(Pattern::Tuple(Vec::new()));
            }
            let mut items = vec![self.pattern()?];
            while self.eat(",") {
                items.push(self.pattern()?);
            }
            self.expect(")")?;
            return Ok(Pattern::tuple(items));
        }
        Ok(Pattern::Var(var_name(&self.ident()?)))
    }

    fn ty(&mut self) -> Result<LType, TranslateError> {
        let a = self.prod()?;
        if self.eat("->") {
            let b = self.ty()?;
            return Ok(LType::arrow(a, b));
        }
        Ok(a)
    }

    fn prod(&mut self) -> Result<LType, TranslateError> {
        let mut ts = vec![self.tatom()?];
        while self.eat(STAR) {
            ts.push(self.tatom()?);
        }
        Ok(LType::prod(ts))
    }

    fn tatom(&mut self) -> Result<LType, TranslateError> {
        match self.peek().cloned() {
            Some(Tok::Ident(b)) => {
                self.pos += 1;
                Ok(LType::base(&b))
            }
            Some(Tok::Num(n)) if n == "1" => {
                self.pos += 1;
                Ok(LType::unit())
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => Err(self.error("expected a type")),
        }
    }

    fn finish<T>(&self, v: T) -> Result<T, TranslateError> {
        if self.pos == self.toks.len() {
            Ok(v)
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

fn var_name(s: &str) -> VarName {
    match s.split_once('\'') {
        Some((base, idx)) => VarName::indexed(base, idx.parse().unwrap_or(0)),
        None => VarName::new(s),
    }
}

/// Parse a lambda-term.
pub fn parse_lambda(text: &str) -> Result<Lambda, TranslateError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let m = p.term()?;
    p.finish(m)
}

/// Parse a lambda type.
pub fn parse_ltype(text: &str) -> Result<LType, TranslateError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let t = p.ty()?;
    p.finish(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_round_trips() {
        for s in [
            "\\x:o. x",
            "\\f:o -> o. \\x:o. f (f x)",
            "\\(x, y):o * (o -> o). (y x, ())",
            "c := #3; (\\x:o. !c) (c := #5; #7)",
            "(\\f:o -> o. \\x:o. f (f x)) (m <+> n) #z",
            "k@(x, #v)",
            "\\x. x'2",
        ] {
            let m = parse_lambda(s).unwrap();
            assert_eq!(m.to_string(), s);
            assert_eq!(parse_lambda(&m.to_string()).unwrap(), m);
        }
    }

    #[test]
    fn application_associates_left() {
        let m = parse_lambda("f x y").unwrap();
        assert_eq!(
            m,
            Lambda::app(Lambda::app(Lambda::var("f"), Lambda::var("x")), Lambda::var("y"))
        );
        assert_eq!(parse_lambda("f \\x:o. x").unwrap().to_string(), "f (\\x:o. x)");
    }

    #[test]
    fn types_parse() {
        let t = parse_ltype("(o -> o) -> o * 1").unwrap();
        assert_eq!(t.to_string(), "(o -> o) -> o * 1");
        assert!(parse_ltype("o ->").is_err());
        assert!(parse_lambda("(x").is_err());
    }
}
