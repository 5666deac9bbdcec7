use std::fmt;

use crate::{occurs_free, Computation, Symbol, Value};

/// Words with a fixed meaning in computation position.
pub const KEYWORDS: &[&str] = &["set", "get", "print", "read", "def", "main", "oplus", "ndplus"];

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

fn write_value_const(f: &mut fmt::Formatter<'_>, c: &Symbol) -> fmt::Result {
    if is_numeral(c.name()) {
        write!(f, "{c}")
    } else {
        write!(f, "#{c}")
    }
}

fn write_comp_const(f: &mut fmt::Formatter<'_>, c: &Symbol) -> fmt::Result {
    if is_identifier(c.name()) && !KEYWORDS.contains(&c.name()) {
        write!(f, "{c}")
    } else {
        write!(f, "#{c}")
    }
}

impl fmt::Display for Computation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_star() {
            return write!(f, "*");
        }
        let mut m = self;
        let mut first = true;
        while !m.is_star() {
            if !first {
                write!(f, ".")?;
            }
            first = false;
            match m {
                Computation::Star => unreachable!(),
                Computation::Const(c, _) => write_comp_const(f, c)?,
                Computation::Push(v, a, _) => {
                    write!(f, "[{v}]")?;
                    if !a.is_main() {
                        write!(f, "{a}")?;
                    }
                }
                Computation::Pop(a, b, k) => {
                    if !a.is_main() {
                        write!(f, "{a}")?;
                    }
                    if occurs_free(&b.var, k) {
                        write!(f, "<{}", b.var)?;
                    } else {
                        write!(f, "<_")?;
                    }
                    if let Some(t) = &b.ann {
                        write!(f, ":{t}")?;
                    }
                    write!(f, ">")?;
                }
                Computation::Force(v, _) => write!(f, "?{v}")?,
            }
            m = m.continuation().expect("not star");
        }
        Ok(())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Var(x) => write!(f, "{x}"),
            Value::Const(c) => write_value_const(f, c),
            Value::Thunk(m) => write!(f, "!{{{m}}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Location, ValueType, VarName};

    #[test]
    fn elides_main_location_and_trailing_star() {
        let x = VarName::new("x");
        let m = Computation::pop_main(
            x.clone(),
            Computation::push(
                Value::Var(x.clone()),
                Location::new("c"),
                Computation::push_main(Value::Var(x), Computation::Star),
            ),
        );
        assert_eq!(m.to_string(), "<x>.[x]c.[x]");
        assert_eq!(Computation::Star.to_string(), "*");
    }

    #[test]
    fn unused_binders_print_as_wildcards() {
        let m = Computation::pop(
            Location::new("c"),
            VarName::new("z"),
            Computation::push_main(Value::constant("5"), Computation::Star),
        );
        assert_eq!(m.to_string(), "c<_>.[5]");
    }

    #[test]
    fn thunks_constants_and_annotations() {
        let f = VarName::new("f");
        let ty = ValueType::main_arrow(vec![ValueType::base("t")], vec![ValueType::base("t")]);
        let m = Computation::pop_annotated(
            Location::main(),
            f.clone(),
            ty,
            Computation::force(
                Value::Var(f),
                Computation::push_main(Value::thunk(Computation::Star), Computation::Star),
            ),
        );
        assert_eq!(m.to_string(), "<f:(t > t)>.?f.[!{*}]");
        let c = Computation::push_main(
            Value::constant("c"),
            Computation::constant(Symbol::new("tick"), Computation::Star),
        );
        assert_eq!(c.to_string(), "[#c].tick");
    }
}
