use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::{Location, Symbol};

/// A simple value type: a base type or a memory transformer `?s_A > !t_A`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ValueType {
    Base(Symbol),
    Arrow(Arc<MemoryType>, Arc<MemoryType>),
}

/// A stack type, bottom first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct StackType(pub Vec<ValueType>);

/// A memory type: one stack type per location.
///
/// Locations with an empty stack type are never stored, so structural
/// equality is equality of memory types.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct MemoryType(BTreeMap<Location, StackType>);

impl ValueType {
    pub fn base(name: &str) -> ValueType {
        ValueType::Base(Symbol::new(name))
    }

    pub fn arrow(input: MemoryType, output: MemoryType) -> ValueType {
        ValueType::Arrow(Arc::new(input), Arc::new(output))
    }

    /// The arrow between two main-location stacks, both bottom first.
    pub fn main_arrow(input: Vec<ValueType>, output: Vec<ValueType>) -> ValueType {
        ValueType::arrow(MemoryType::main(input), MemoryType::main(output))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, ValueType::Base(_))
    }

    /// Nesting depth of arrows: base types have order 0.
    pub fn order(&self) -> usize {
        match self {
            ValueType::Base(_) => 0,
            ValueType::Arrow(i, o) => 1 + i.order().max(o.order()),
        }
    }
}

impl StackType {
    pub fn new(items: Vec<ValueType>) -> StackType {
        StackType(items)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> StackType {
        StackType(self.0.iter().rev().cloned().collect())
    }

    pub fn concat(&self, top: &StackType) -> StackType {
        let mut items = self.0.clone();
        items.extend(top.0.iter().cloned());
        StackType(items)
    }
}

impl MemoryType {
    pub fn empty() -> MemoryType {
        MemoryType::default()
    }

    /// The singleton memory type `a(!t)`.
    pub fn singleton(loc: Location, items: Vec<ValueType>) -> MemoryType {
        let mut m = MemoryType::empty();
        m.set(loc, StackType(items));
        m
    }

    pub fn main(items: Vec<ValueType>) -> MemoryType {
        MemoryType::singleton(Location::main(), items)
    }

    pub fn from_stacks<I: IntoIterator<Item = (Location, Vec<ValueType>)>>(stacks: I) -> MemoryType {
        let mut m = MemoryType::empty();
        for (loc, items) in stacks {
            let mut cur = m.stack(&loc).to_vec();
            cur.extend(items);
            m.set(loc, StackType(cur));
        }
        m
    }

    /// The stack at a location, bottom first; empty when absent.
    pub fn stack(&self, loc: &Location) -> &[ValueType] {
        self.0.get(loc).map(|s| s.0.as_slice()).unwrap_or(&[])
    }

    pub fn set(&mut self, loc: Location, stack: StackType) {
        if stack.is_empty() {
            self.0.remove(&loc);
        } else {
            self.0.insert(loc, stack);
        }
    }

    pub fn push(&mut self, loc: &Location, ty: ValueType) {
        self.0.entry(loc.clone()).or_default().0.push(ty);
    }

    pub fn pop(&mut self, loc: &Location) -> Option<ValueType> {
        let stack = self.0.get_mut(loc)?;
        let top = stack.0.pop();
        if stack.is_empty() {
            self.0.remove(loc);
        }
        top
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Locations with a nonempty stack, in location order.
    pub fn locations(&self) -> impl Iterator<Item = &Location> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Location, &StackType)> {
        self.0.iter()
    }

    /// Total number of items over all locations.
    pub fn len(&self) -> usize {
        self.0.values().map(|s| s.len()).sum()
    }

    /// Pointwise concatenation with `top` placed above `self`.
    pub fn concat(&self, top: &MemoryType) -> MemoryType {
        let mut out = self.clone();
        for (loc, s) in top.iter() {
            let joined = StackType(out.stack(loc).to_vec()).concat(s);
            out.set(loc.clone(), joined);
        }
        out
    }

    /// Highest arrow nesting among the items.
    pub fn order(&self) -> usize {
        self.0
            .values()
            .flat_map(|s| s.0.iter())
            .map(ValueType::order)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Base(s) => write!(f, "{s}"),
            ValueType::Arrow(i, o) => write!(f, "({})", ArrowDisplay(i, o)),
        }
    }
}

/// Prints a computation type `?s_A > !t_A`.
///
/// The input is written top of stack first, the output bottom first, so
/// that the written input is the mirror image of how the same memory is
/// written as an output.
pub struct ArrowDisplay<'a>(pub &'a MemoryType, pub &'a MemoryType);

impl fmt::Display for ArrowDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let input = input_words(self.0);
        let output = output_words(self.1);
        match (input.is_empty(), output.is_empty()) {
            (true, true) => write!(f, ">"),
            (true, false) => write!(f, "> {}", output.join(" ")),
            (false, true) => write!(f, "{} >", input.join(" ")),
            (false, false) => write!(f, "{} > {}", input.join(" "), output.join(" ")),
        }
    }
}

fn group(loc: &Location, items: Vec<String>) -> Vec<String> {
    if loc.is_main() {
        items
    } else {
        vec![format!("{}({})", loc, items.join(" "))]
    }
}

fn input_words(m: &MemoryType) -> Vec<String> {
    let mut words = Vec::new();
    for (loc, s) in m.iter() {
        words.extend(group(loc, s.0.iter().rev().map(|t| t.to_string()).collect()));
    }
    words
}

fn output_words(m: &MemoryType) -> Vec<String> {
    let mut words = Vec::new();
    for (loc, s) in m.iter().collect::<Vec<_>>().into_iter().rev() {
        words.extend(group(loc, s.0.iter().map(|t| t.to_string()).collect()));
    }
    words
}

impl fmt::Display for MemoryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", output_words(self).join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: &str) -> ValueType {
        ValueType::base(n)
    }

    #[test]
    fn arrow_printing_mirrors_input() {
        // x : s on top, y : t below.
        let input = MemoryType::main(vec![b("t"), b("s")]);
        let output = MemoryType::main(vec![b("t"), b("s")]);
        assert_eq!(ArrowDisplay(&input, &output).to_string(), "s t > t s");
        let c = Location::new("c");
        let input = MemoryType::from_stacks([(Location::main(), vec![b("Z")]), (c.clone(), vec![b("Z")])]);
        let output = MemoryType::singleton(c.clone(), vec![b("Z")]);
        assert_eq!(ArrowDisplay(&input, &output).to_string(), "Z c(Z) > c(Z)");
        let output = MemoryType::from_stacks([(Location::main(), vec![b("Z")]), (c, vec![b("Z")])]);
        assert_eq!(ArrowDisplay(&MemoryType::empty(), &output).to_string(), "> c(Z) Z");
    }

    #[test]
    fn empty_stacks_are_not_stored() {
        let mut m = MemoryType::main(vec![b("a")]);
        m.pop(&Location::main());
        assert_eq!(m, MemoryType::empty());
        m.set(Location::new("c"), StackType::default());
        assert!(m.is_empty());
    }

    #[test]
    fn concat_is_pointwise() {
        let c = Location::new("c");
        let lower = MemoryType::from_stacks([(Location::main(), vec![b("a")]), (c.clone(), vec![b("x")])]);
        let upper = MemoryType::singleton(c.clone(), vec![b("y")]);
        let m = lower.concat(&upper);
        assert_eq!(m.stack(&c), &[b("x"), b("y")]);
        assert_eq!(m.stack(&Location::main()), &[b("a")]);
    }
}
