//! Terms of the functional machine calculus with values.
//!
//! A [`Computation`] is a sequence of machine actions ending in `*`:
//! pushes `[V]a`, pops `a<x>`, forces `?V` and computation constants.
//! A [`Value`] is a variable, a value constant or a thunk `!{M}`.
//! Locations name the stacks of the machine memory; the main location
//! is `lam` and is left implicit in surface syntax.

mod alpha;
mod name;
mod ops;
mod print;
mod syntax;
mod ty;
mod vector;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub use alpha::{alpha_eq, alpha_eq_value, canonical};
pub use name::{NameSupply, VarName};
pub use ops::{
    free_vars, free_vars_value, max_index, occurs_free, rename, sequence, size, substitute, substitute_value,
};
pub use print::KEYWORDS;
pub use syntax::{Binder, Computation, Value};
pub use ty::{ArrowDisplay, MemoryType, StackType, ValueType};
pub use vector::{vector_pop, vector_push};

/// Name of the main location.
pub const MAIN: &str = "lam";

/// A named stack of the machine memory.
///
/// Locations are ordered with `lam` first and the rest lexicographically.
/// This order fixes the expansion of vector notation and the layout of
/// collapsed memories.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Location(Arc<str>);

impl Location {
    pub fn new(name: &str) -> Location {
        assert!(!name.is_empty(), "location names are nonempty");
        Location(Arc::from(name))
    }

    pub fn main() -> Location {
        Location::new(MAIN)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_main(&self) -> bool {
        &*self.0 == MAIN
    }
}

impl Ord for Location {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_main(), other.is_main()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Location {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Location {
    fn from(s: &str) -> Location {
        Location::new(s)
    }
}

/// A constant symbol, either a value constant or a computation constant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Symbol {
        Symbol::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_location_sorts_first() {
        let mut locs = [Location::new("c"), Location::new("lam"), Location::new("a")];
        locs.sort();
        let names: Vec<_> = locs.iter().map(|l| l.name().to_string()).collect();
        assert_eq!(names, ["lam", "a", "c"]);
    }
}
