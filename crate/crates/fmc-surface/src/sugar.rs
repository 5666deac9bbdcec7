//! Effect combinators and probabilistic sums as plain terms.

use fmc_term::{Computation, Location, Value, VarName};

use crate::ParseError;

/// A named combinator.
#[derive(Clone, Debug, PartialEq)]
pub enum Macro {
    /// `set c = <x>.c<_>.[x]c`
    Set(Location),
    /// `get c = c<x>.[x]c.[x]`
    Get(Location),
    /// `print = <x>.[x]out`
    Print,
    /// `read = in<x>.[x]`
    Read,
    /// `N ⊕ M = [!M].[!N].rnd<x>.?x`
    Oplus(Computation, Computation),
    /// Like `Oplus`, drawing from the location `nd`.
    NdPlus(Computation, Computation),
}

fn var(name: &str) -> VarName {
    VarName::new(name)
}

/// The defining term of a combinator.
pub fn expand(m: &Macro) -> Computation {
    let x = var("x");
    let vx = || Value::Var(var("x"));
    match m {
        Macro::Set(c) => Computation::pop_main(
            x.clone(),
            Computation::pop(
                c.clone(),
                VarName::new("_"),
                Computation::push(vx(), c.clone(), Computation::Star),
            ),
        ),
        Macro::Get(c) => Computation::pop(
            c.clone(),
            x,
            Computation::push(vx(), c.clone(), Computation::push_main(vx(), Computation::Star)),
        ),
        Macro::Print => Computation::pop_main(x, Computation::push(vx(), Location::new("out"), Computation::Star)),
        Macro::Read => Computation::pop(Location::new("in"), x, Computation::push_main(vx(), Computation::Star)),
        Macro::Oplus(n, m) => choice(n, m, Location::new("rnd")),
        Macro::NdPlus(n, m) => choice(n, m, Location::new("nd")),
    }
}

fn choice(n: &Computation, m: &Computation, loc: Location) -> Computation {
    let x = var("x");
    Computation::push_main(
        Value::thunk(m.clone()),
        Computation::push_main(
            Value::thunk(n.clone()),
            Computation::pop(loc, x.clone(), Computation::force(Value::Var(x), Computation::Star)),
        ),
    )
}

/// Expand a combinator given by name and arguments.
///
/// `set` and `get` take a location, `oplus` and `ndplus` take two terms.
pub fn expand_sugar(name: &str, loc: Option<Location>, operands: &[Computation]) -> Result<Computation, ParseError> {
    let needs_loc =
        |loc: Option<Location>| loc.ok_or_else(|| ParseError::UnknownMacro(format!("{name} needs a location")));
    let m = match (name, operands) {
        ("set", []) => Macro::Set(needs_loc(loc)?),
        ("get", []) => Macro::Get(needs_loc(loc)?),
        ("print", []) => Macro::Print,
        ("read", []) => Macro::Read,
        ("oplus", [n, m]) => Macro::Oplus(n.clone(), m.clone()),
        ("ndplus", [n, m]) => Macro::NdPlus(n.clone(), m.clone()),
        _ => return Err(ParseError::UnknownMacro(name.to_string())),
    };
    Ok(expand(&m))
}

/// The Church boolean selecting the top of two values: `<x>.<y>.?x`.
pub fn church_true() -> Computation {
    church(true)
}

/// The Church boolean selecting the second value: `<x>.<y>.?y`.
pub fn church_false() -> Computation {
    church(false)
}

fn church(first: bool) -> Computation {
    let chosen = if first { var("x") } else { var("y") };
    Computation::pop_main(
        var("x"),
        Computation::pop_main(var("y"), Computation::force(Value::Var(chosen), Computation::Star)),
    )
}
