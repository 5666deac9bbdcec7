use std::fmt;
use std::sync::Arc;

/// A variable name: a base identifier and a freshness index.
///
/// Index 0 is the name as written; fresh names reuse the base with a
/// positive index and print as `x'3`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName {
    base: Arc<str>,
    index: u32,
}

impl VarName {
    pub fn new(base: &str) -> VarName {
        VarName::indexed(base, 0)
    }

    pub fn indexed(base: &str, index: u32) -> VarName {
        VarName {
            base: Arc::from(base),
            index,
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}'{}", self.base, self.index)
        }
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> VarName {
        VarName::new(s)
    }
}

/// A supply of fresh variable names.
///
/// Every name handed out carries an index above the starting point, so a
/// supply created above the largest index of some terms never clashes with
/// a name occurring in them.
#[derive(Clone, Debug)]
pub struct NameSupply {
    next: u32,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply { next: 1 }
    }

    /// A supply whose names all have index greater than `index`.
    pub fn above(index: u32) -> NameSupply {
        NameSupply { next: index + 1 }
    }

    pub fn fresh(&mut self, base: &str) -> VarName {
        let name = VarName::indexed(base, self.next);
        self.next += 1;
        name
    }

    /// Fresh name with the same base as `like`.
    pub fn refresh(&mut self, like: &VarName) -> VarName {
        self.fresh(like.base())
    }

    /// Make sure later names have index greater than `index`.
    pub fn reserve(&mut self, index: u32) {
        self.next = self.next.max(index + 1);
    }
}

impl Default for NameSupply {
    fn default() -> Self {
        NameSupply::new()
    }
}
