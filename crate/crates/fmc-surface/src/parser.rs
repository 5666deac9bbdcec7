use std::collections::{BTreeMap, BTreeSet};

use fmc_term::{sequence, Binder, Computation, Location, MemoryType, Symbol, Value, ValueType, VarName};
use fmc_types::{CompType, Signature};

use crate::lexer::{lex, Tok, Token};
use crate::sugar::{expand, Macro};
use crate::{Definition, ParseError, Program};

enum Atom {
    Star,
    Push(Value, Location),
    Pop(Location, Binder),
    Force(Value),
    Const(Symbol),
    Group(Computation),
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    values: BTreeSet<String>,
    defs: BTreeMap<String, Computation>,
    wildcards: u32,
    line_limit: Option<usize>,
}

impl Parser {
    pub(crate) fn new(text: &str, sig: &Signature) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            values: sig.values.keys().map(|s| s.name().to_string()).collect(),
            defs: BTreeMap::new(),
            wildcards: 0,
            line_limit: None,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn token(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> ParseError {
        let t = self.token();
        ParseError::syntax(t.line, t.col, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn expect_close(&mut self, tok: Tok, open: &Token, close: char) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Unbalanced {
                line: open.line,
                col: open.col,
                expected: close,
                found_line: self.token().line,
                found_col: self.token().col,
            })
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error("unexpected input after the term"))
        }
    }

    fn wildcard(&mut self) -> VarName {
        self.wildcards += 1;
        VarName::indexed("_", self.wildcards)
    }

    // ---- computations -----------------------------------------------------

    pub(crate) fn seq(&mut self) -> Result<Computation, ParseError> {
        let mut m = self.choice()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let n = self.choice()?;
            m = sequence(&m, &n);
        }
        Ok(m)
    }

    fn choice(&mut self) -> Result<Computation, ParseError> {
        let mut m = self.chain()?;
        loop {
            match self.peek() {
                Tok::Oplus => {
                    self.bump();
                    let n = self.chain()?;
                    m = expand(&Macro::Oplus(m, n));
                }
                Tok::NdPlus => {
                    self.bump();
                    let n = self.chain()?;
                    m = expand(&Macro::NdPlus(m, n));
                }
                _ => return Ok(m),
            }
        }
    }

    fn section_marker_ahead(&self) -> bool {
        matches!(self.peek_at(1), Tok::Ident(s, _) if s == "sig" || s == "end")
    }

    fn chain(&mut self) -> Result<Computation, ParseError> {
        let mut atoms = vec![self.atom()?];
        while *self.peek() == Tok::Dot && !self.section_marker_ahead() {
            self.bump();
            atoms.push(self.atom()?);
        }
        Ok(atoms.into_iter().rev().fold(Computation::Star, |acc, atom| match atom {
            Atom::Star => acc,
            Atom::Push(v, a) => Computation::push(v, a, acc),
            Atom::Pop(a, b) => Computation::Pop(a, b, std::sync::Arc::new(acc)),
            Atom::Force(v) => Computation::force(v, acc),
            Atom::Const(c) => Computation::constant(c, acc),
            Atom::Group(g) => sequence(&g, &acc),
        }))
    }

    fn location(&mut self) -> Result<Location, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name, 0) => {
                self.bump();
                Ok(Location::new(&name))
            }
            other => {
                let t = self.token();
                Err(ParseError::BadLocation {
                    line: t.line,
                    col: t.col,
                    found: format!("{other:?}"),
                })
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.peek().clone() {
            Tok::Star => {
                self.bump();
                Ok(Atom::Star)
            }
            Tok::LBrack => {
                let open = self.bump();
                let v = self.value()?;
                self.expect_close(Tok::RBrack, &open, ']')?;
                let glued = self.token().glued;
                let loc = match self.peek() {
                    Tok::Ident(..) if glued => self.location()?,
                    Tok::Num(_) if glued => return Err(self.location().unwrap_err()),
                    _ => Location::main(),
                };
                Ok(Atom::Push(v, loc))
            }
            Tok::Lt => {
                let b = self.binder()?;
                Ok(Atom::Pop(Location::main(), b))
            }
            Tok::Quest => {
                self.bump();
                Ok(Atom::Force(self.value()?))
            }
            Tok::LParen => {
                let open = self.bump();
                let m = self.seq()?;
                self.expect_close(Tok::RParen, &open, ')')?;
                Ok(Atom::Group(m))
            }
            Tok::Hash(s) => {
                self.bump();
                Ok(Atom::Const(Symbol::new(&s)))
            }
            Tok::Ident(name, index) => {
                if *self.peek_at(1) == Tok::Lt {
                    let loc = self.location()?;
                    let b = self.binder()?;
                    return Ok(Atom::Pop(loc, b));
                }
                self.bump();
                match name.as_str() {
                    "set" => Ok(Atom::Group(expand(&Macro::Set(self.location()?)))),
                    "get" => Ok(Atom::Group(expand(&Macro::Get(self.location()?)))),
                    "print" => Ok(Atom::Group(expand(&Macro::Print))),
                    "read" => Ok(Atom::Group(expand(&Macro::Read))),
                    _ if index != 0 => Err(self.error("a computation constant cannot carry an index")),
                    _ => match self.defs.get(&name) {
                        Some(def) => Ok(Atom::Group(def.clone())),
                        None => Ok(Atom::Const(Symbol::new(&name))),
                    },
                }
            }
            _ => Err(self.error("expected a computation")),
        }
    }

    fn binder(&mut self) -> Result<Binder, ParseError> {
        let open = self.expect(Tok::Lt, "`<`")?;
        let var = match self.peek().clone() {
            Tok::Ident(name, 0) if name == "_" => {
                self.bump();
                self.wildcard()
            }
            Tok::Ident(name, index) => {
                self.bump();
                VarName::indexed(&name, index)
            }
            _ => return Err(self.error("expected a variable")),
        };
        let ann = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.value_type()?)
        } else {
            None
        };
        self.expect_close(Tok::Gt, &open, '>')?;
        Ok(Binder { var, ann })
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name, index) => {
                self.bump();
                if index == 0 && self.values.contains(&name) {
                    Ok(Value::Const(Symbol::new(&name)))
                } else {
                    Ok(Value::Var(VarName::indexed(&name, index)))
                }
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Value::Const(Symbol::new(&n)))
            }
            Tok::Hash(s) => {
                self.bump();
                Ok(Value::Const(Symbol::new(&s)))
            }
            Tok::Bang => {
                self.bump();
                let open = self.expect(Tok::LBrace, "`{` after `!`")?;
                let m = self.seq()?;
                self.expect_close(Tok::RBrace, &open, '}')?;
                Ok(Value::thunk(m))
            }
            _ => Err(self.error("expected a value")),
        }
    }

    // ---- types ------------------------------------------------------------

    pub(crate) fn value_type(&mut self) -> Result<ValueType, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name, 0) => {
                self.bump();
                Ok(ValueType::base(&name))
            }
            Tok::LParen => {
                let open = self.bump();
                let t = self.comp_type()?;
                self.expect_close(Tok::RParen, &open, ')')?;
                Ok(t.as_value())
            }
            _ => Err(self.error("expected a value type")),
        }
    }

    fn within_line(&self) -> bool {
        match self.line_limit {
            Some(l) => self.token().line == l,
            None => true,
        }
    }

    /// Items of a memory type as written, grouped by location.
    fn items(&mut self) -> Result<Vec<(Location, ValueType)>, ParseError> {
        let mut out = Vec::new();
        while self.within_line() {
            match self.peek().clone() {
                Tok::Ident(name, 0) if *self.peek_at(1) == Tok::LParen && self.toks[self.pos + 1].glued => {
                    self.bump();
                    let open = self.bump();
                    let loc = Location::new(&name);
                    while *self.peek() != Tok::RParen && !self.at_eof() {
                        out.push((loc.clone(), self.value_type()?));
                    }
                    self.expect_close(Tok::RParen, &open, ')')?;
                }
                Tok::Ident(_, 0) | Tok::LParen => out.push((Location::main(), self.value_type()?)),
                _ => break,
            }
        }
        Ok(out)
    }

    pub(crate) fn comp_type(&mut self) -> Result<CompType, ParseError> {
        let input = self.items()?;
        self.expect(Tok::Gt, "`>` in a computation type")?;
        let output = self.items()?;
        // The input is written top first on each location.
        let mut stacks: BTreeMap<Location, Vec<ValueType>> = BTreeMap::new();
        for (loc, t) in input {
            stacks.entry(loc).or_default().push(t);
        }
        let input = MemoryType::from_stacks(stacks.into_iter().map(|(l, mut v)| {
            v.reverse();
            (l, v)
        }));
        let output = MemoryType::from_stacks(output.into_iter().map(|(l, t)| (l, vec![t])));
        Ok(CompType::new(input, output))
    }

    // ---- programs ---------------------------------------------------------

    pub(crate) fn program(&mut self) -> Result<Program, ParseError> {
        let mut program = Program::default();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Dot if matches!(self.peek_at(1), Tok::Ident(s, _) if s == "sig") => {
                    self.bump();
                    self.bump();
                    self.signature(&mut program.signature)?;
                }
                Tok::Ident(kw, 0) if kw == "def" => {
                    self.bump();
                    let name = match self.bump().tok {
                        Tok::Ident(n, 0) => n,
                        _ => return Err(self.error("expected a definition name")),
                    };
                    let def = self.definition(name.clone())?;
                    if self.defs.contains_key(&name) {
                        return Err(ParseError::DuplicateDefinition(name));
                    }
                    self.defs.insert(name, def.body.clone());
                    program.defs.push(def);
                }
                Tok::Ident(kw, 0) if kw == "main" && matches!(self.peek_at(1), Tok::Colon | Tok::Eq) => {
                    self.bump();
                    let def = self.definition("main".to_string())?;
                    program.main = Some(def);
                }
                _ => {
                    if program.main.is_some() {
                        return Err(self.error("a program has one main term"));
                    }
                    let body = self.seq()?;
                    program.main = Some(Definition {
                        name: "main".to_string(),
                        ty: None,
                        body,
                    });
                }
            }
        }
        program.signature.validate().map_err(ParseError::Signature)?;
        Ok(program)
    }

    fn definition(&mut self, name: String) -> Result<Definition, ParseError> {
        let ty = if *self.peek() == Tok::Colon {
            self.bump();
            Some(self.comp_type()?)
        } else {
            None
        };
        self.expect(Tok::Eq, "`=`")?;
        let body = self.seq()?;
        Ok(Definition { name, ty, body })
    }

    fn signature(&mut self, sig: &mut Signature) -> Result<(), ParseError> {
        loop {
            match self.peek().clone() {
                Tok::Dot if matches!(self.peek_at(1), Tok::Ident(s, _) if s == "end") => {
                    self.bump();
                    self.bump();
                    return Ok(());
                }
                Tok::Eof => return Ok(()),
                Tok::Semi => {
                    self.bump();
                }
                Tok::Ident(kw, 0) => {
                    let line = self.token().line;
                    self.bump();
                    self.line_limit = Some(line);
                    let result = self.sig_statement(&kw, sig);
                    self.line_limit = None;
                    result?;
                }
                _ => return Err(self.error("expected `base`, `val`, `comp` or `.end`")),
            }
        }
    }

    fn symbols(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while self.within_line() {
            match self.peek().clone() {
                Tok::Ident(n, 0) | Tok::Num(n) | Tok::Hash(n) => {
                    self.bump();
                    out.push(n);
                }
                _ => break,
            }
        }
        out
    }

    fn sig_statement(&mut self, kw: &str, sig: &mut Signature) -> Result<(), ParseError> {
        match kw {
            "base" => {
                for n in self.symbols() {
                    sig.bases.insert(Symbol::new(&n));
                }
            }
            "val" => {
                let names = self.symbols();
                self.expect(Tok::Colon, "`:` after constant names")?;
                let t = self.value_type()?;
                for n in names {
                    self.values.insert(n.clone());
                    sig.values.insert(Symbol::new(&n), t.clone());
                }
            }
            "comp" => {
                let names = self.symbols();
                self.expect(Tok::Colon, "`:` after constant names")?;
                let t = self.comp_type()?;
                for n in names {
                    sig.computations.insert(Symbol::new(&n), t.clone());
                }
            }
            other => return Err(self.error(&format!("unknown signature statement `{other}`"))),
        }
        Ok(())
    }
}
