//! Concrete syntax for the functional machine calculus with values.
//!
//! ```text
//! computation ::= * | [value]loc.M | loc<x:type>.M | ?value.M | const.M
//!               | (M) | M ; M | M <+> M | set loc | get loc | print | read
//! value       ::= var | const | #const | numeral | !{M}
//! ```
//!
//! A missing location means `lam`, a trailing `.*` may be left out and
//! `--` starts a line comment. A program file may carry a signature
//! section between `.sig` and `.end`, definitions `def name = M` and a
//! main term `main : type = M` or just `M`.

mod lexer;
mod parser;
mod sugar;

use fmc_term::{Computation, ValueType};
use fmc_types::{CompType, Signature, TypeError};
use thiserror::Error;

pub use sugar::{church_false, church_true, expand, expand_sugar, Macro};

use parser::Parser;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unbalanced bracket, expected `{expected}` (reached {found_line}:{found_col})")]
    Unbalanced {
        line: usize,
        col: usize,
        expected: char,
        found_line: usize,
        found_col: usize,
    },
    #[error("{line}:{col}: not a location name: {found}")]
    BadLocation { line: usize, col: usize, found: String },
    #[error("unknown macro {0}")]
    UnknownMacro(String),
    #[error("duplicate definition {0}")]
    DuplicateDefinition(String),
    #[error("bad signature: {0}")]
    Signature(TypeError),
}

impl ParseError {
    pub(crate) fn syntax(line: usize, col: usize, msg: &str) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            msg: msg.to_string(),
        }
    }
}

/// A named, optionally typed term.
#[derive(Clone, Debug, PartialEq)]
pub struct Definition {
    pub name: String,
    pub ty: Option<CompType>,
    pub body: Computation,
}

/// A parsed `.fmc` file. Definitions are inlined where they are used.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub signature: Signature,
    pub defs: Vec<Definition>,
    pub main: Option<Definition>,
}

/// Parse a computation with no declared constants.
pub fn parse(text: &str) -> Result<Computation, ParseError> {
    parse_with(text, &Signature::default())
}

/// Parse a computation; identifiers declared as value constants in the
/// signature are read as constants rather than variables.
pub fn parse_with(text: &str, sig: &Signature) -> Result<Computation, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let m = p.seq()?;
    p.finish()?;
    Ok(m)
}

/// Parse a value.
pub fn parse_value(text: &str) -> Result<fmc_term::Value, ParseError> {
    match parse(&format!("[{text}]"))? {
        Computation::Push(v, _, k) if k.is_star() => Ok(v),
        _ => Err(ParseError::syntax(1, 1, "expected a single value")),
    }
}

/// Parse a computation type such as `(t > t) t > t` or `Z c(Z) > c(Z)`.
/// Inputs are written top of stack first, outputs bottom first.
pub fn parse_type(text: &str) -> Result<CompType, ParseError> {
    let mut p = Parser::new(text, &Signature::default())?;
    let t = p.comp_type()?;
    p.finish()?;
    Ok(t)
}

/// Parse a value type: a base type or a parenthesised computation type.
pub fn parse_value_type(text: &str) -> Result<ValueType, ParseError> {
    let mut p = Parser::new(text, &Signature::default())?;
    let t = p.value_type()?;
    p.finish()?;
    Ok(t)
}

/// Parse a program file.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    Parser::new(text, &Signature::default())?.program()
}

/// Print a computation in concrete syntax.
pub fn print(m: &Computation) -> String {
    m.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fmc_term::{alpha_eq, Location, MemoryType, Value, VarName};

    #[test]
    fn parses_swap_tree() {
        let m = parse("<x>.<y>.[y].[x]").unwrap();
        let x = VarName::new("x");
        let y = VarName::new("y");
        let expected = Computation::pop_main(
            x.clone(),
            Computation::pop_main(
                y.clone(),
                Computation::push_main(Value::Var(y), Computation::push_main(Value::Var(x), Computation::Star)),
            ),
        );
        assert_eq!(m, expected);
        assert_eq!(parse("*").unwrap(), Computation::Star);
    }

    #[test]
    fn parses_get_combinator() {
        let m = parse("c<x>.[x]c.[x]").unwrap();
        assert_eq!(m, expand(&Macro::Get(Location::new("c"))));
        assert!(alpha_eq(&parse("get c").unwrap(), &m));
    }

    #[test]
    fn sequencing_is_capture_avoiding() {
        // In `<x> ; [x]` the second x is free.
        let m = parse("<x> ; [x]").unwrap();
        assert!(fmc_term::free_vars(&m).contains(&VarName::new("x")));
        let n = parse("<x>.[x]").unwrap();
        assert!(fmc_term::free_vars(&n).is_empty());
    }

    #[test]
    fn state_example_parses() {
        let m = parse("[3].set c;[5].set c").unwrap();
        assert_eq!(m.to_string(), "[3].<x>.c<_>.[x]c.[5].<x>.c<_>.[x]c");
        // A binder of the first part is renamed only if it would capture.
        let m = parse("<x>.[x] ; [x]").unwrap();
        assert_eq!(m.to_string(), "<x'1>.[x'1].[x]");
    }

    #[test]
    fn types_parse_in_written_order() {
        let t = parse_type("s t > t s").unwrap();
        assert_eq!(t.to_string(), "s t > t s");
        assert_eq!(t.input.stack(&Location::main()).last().unwrap(), &ValueType::base("s"));
        let t = parse_type("(t > t) t > t").unwrap();
        assert_eq!(t.to_string(), "(t > t) t > t");
        let t = parse_type("Z c(Z) > c(Z)").unwrap();
        assert_eq!(
            t.output,
            MemoryType::singleton(Location::new("c"), vec![ValueType::base("Z")])
        );
        assert_eq!(parse_type("c(Z) > c(Z) Z").unwrap().to_string(), "c(Z) > c(Z) Z");
        assert_eq!(parse_type(">").unwrap(), CompType::default());
    }

    #[test]
    fn errors_carry_positions() {
        match parse("[x") {
            Err(ParseError::Unbalanced { expected: ']', .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("<x>.[x]7") {
            Err(ParseError::BadLocation { .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("<x>..") {
            Err(ParseError::Syntax { line: 1, col: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn programs_with_signature_and_definitions() {
        let text = "-- swap with constants\n.sig\nbase s t Z\nval c : Z\ncomp tick : Z > Z\n.end\ndef dup = <x>.[x].[x]\nmain : > Z Z = [c].dup\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.defs.len(), 1);
        let main = p.main.unwrap();
        assert_eq!(main.ty.unwrap().to_string(), "> Z Z");
        assert_eq!(main.body.to_string(), "[#c].<x>.[x].[x]");
        assert!(p.signature.computations.contains_key(&fmc_term::Symbol::new("tick")));
    }

    #[test]
    fn sums_expand() {
        let m = parse("* <+> *").unwrap();
        assert_eq!(m.to_string(), "[!{*}].[!{*}].rnd<x>.?x");
        let m = parse("[#a] <|> [#b]").unwrap();
        assert_eq!(m.to_string(), "[!{[#b]}].[!{[#a]}].nd<x>.?x");
    }
}
