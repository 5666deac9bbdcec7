use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use fmc_term::{alpha_eq_value, Location, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Stuck, Violation};

struct Node {
    value: Value,
    below: Option<Arc<Node>>,
}

/// A persistent stack: cloning is O(1), so trace snapshots share structure.
#[derive(Clone, Default)]
pub struct Stack {
    top: Option<Arc<Node>>,
    len: usize,
}

impl Stack {
    pub fn new() -> Stack {
        Stack::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, value: Value) {
        let below = self.top.take();
        self.top = Some(Arc::new(Node { value, below }));
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<Value> {
        let node = self.top.take()?;
        self.top = node.below.clone();
        self.len -= 1;
        Some(node.value.clone())
    }

    pub fn peek(&self) -> Option<&Value> {
        self.top.as_ref().map(|n| &n.value)
    }

    /// Items bottom first.
    pub fn to_vec(&self) -> Vec<Value> {
        let mut out = Vec::with_capacity(self.len);
        let mut node = self.top.as_deref();
        while let Some(n) = node {
            out.push(n.value.clone());
            node = n.below.as_deref();
        }
        out.reverse();
        out
    }
}

impl FromIterator<Value> for Stack {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Stack {
        let mut s = Stack::new();
        for v in iter {
            s.push(v);
        }
        s
    }
}

impl Drop for Stack {
    // Unlink iteratively so long stacks do not overflow the call stack.
    fn drop(&mut self) {
        let mut node = self.top.take();
        while let Some(n) = node {
            match Arc::try_unwrap(n) {
                Ok(mut n) => node = n.below.take(),
                Err(_) => break,
            }
        }
    }
}

impl fmt::Debug for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.to_vec().iter().map(|v| v.to_string()))
            .finish()
    }
}

/// The source of a read-only stream location.
#[derive(Clone, Debug)]
pub enum Stream {
    /// Church booleans drawn from a seeded generator; never runs out.
    Random(Box<ChaCha8Rng>),
    /// A finite list, first element popped first.
    Script(VecDeque<Value>),
}

impl Stream {
    pub fn random(seed: u64) -> Stream {
        Stream::Random(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn script(values: Vec<Value>) -> Stream {
        Stream::Script(values.into())
    }

    fn next(&mut self) -> Option<Value> {
        match self {
            Stream::Random(rng) => Some(church(rng.gen_bool(0.5))),
            Stream::Script(items) => items.pop_front(),
        }
    }
}

/// The Church boolean thunk: `!{<x>.<y>.?x}` for true, `!{<x>.<y>.?y}` for false.
pub fn church(b: bool) -> Value {
    Value::thunk(if b {
        fmc_surface::church_true()
    } else {
        fmc_surface::church_false()
    })
}

/// How a location may be used.
#[derive(Clone, Debug, Default)]
pub enum Policy {
    #[default]
    Plain,
    /// Pops draw from the stream; pushes are rejected.
    ReadStream(Stream),
    /// Pushes append; pops are rejected.
    WriteStream,
    /// A stack of depth at most one.
    Cell,
}

/// A family of stacks and streams indexed by location.
#[derive(Clone, Debug, Default)]
pub struct Memory {
    stacks: BTreeMap<Location, Stack>,
    policies: BTreeMap<Location, Policy>,
}

impl Memory {
    pub fn new() -> Memory {
        Memory::default()
    }

    /// A plain memory with the given stacks, bottom first.
    pub fn from_stacks<I: IntoIterator<Item = (Location, Vec<Value>)>>(stacks: I) -> Memory {
        let mut m = Memory::new();
        for (loc, items) in stacks {
            m.set_stack(loc, items);
        }
        m
    }

    /// A plain memory holding `items` on the main stack.
    pub fn main(items: Vec<Value>) -> Memory {
        Memory::from_stacks([(Location::main(), items)])
    }

    pub fn with_policy(mut self, loc: Location, policy: Policy) -> Memory {
        self.set_policy(loc, policy);
        self
    }

    pub fn set_policy(&mut self, loc: Location, policy: Policy) {
        self.policies.insert(loc, policy);
    }

    pub fn policy(&self, loc: &Location) -> &Policy {
        static PLAIN: Policy = Policy::Plain;
        self.policies.get(loc).unwrap_or(&PLAIN)
    }

    /// Replace a stack wholesale, bypassing policies.
    pub fn set_stack(&mut self, loc: Location, items: Vec<Value>) {
        if items.is_empty() {
            self.stacks.remove(&loc);
        } else {
            self.stacks.insert(loc, items.into_iter().collect());
        }
    }

    /// Items at a location, bottom first. Unread stream elements are not included.
    pub fn stack(&self, loc: &Location) -> Vec<Value> {
        self.stacks.get(loc).map(Stack::to_vec).unwrap_or_default()
    }

    pub fn depth(&self, loc: &Location) -> usize {
        self.stacks.get(loc).map_or(0, Stack::len)
    }

    pub fn push(&mut self, loc: &Location, v: Value) -> Result<(), Stuck> {
        match self.policy(loc) {
            Policy::ReadStream(_) => return Err(Stuck::PolicyViolation(loc.clone(), Violation::PushToReadStream)),
            Policy::Cell if self.depth(loc) >= 1 => {
                return Err(Stuck::PolicyViolation(loc.clone(), Violation::CellOverflow))
            }
            _ => {}
        }
        self.stacks.entry(loc.clone()).or_default().push(v);
        Ok(())
    }

    pub fn pop(&mut self, loc: &Location) -> Result<Value, Stuck> {
        match self.policies.get_mut(loc) {
            Some(Policy::WriteStream) => {
                return Err(Stuck::PolicyViolation(loc.clone(), Violation::PopFromWriteStream))
            }
            Some(Policy::ReadStream(s)) => return s.next().ok_or_else(|| Stuck::EmptyPop(loc.clone())),
            _ => {}
        }
        let stack = self.stacks.get_mut(loc).ok_or_else(|| Stuck::EmptyPop(loc.clone()))?;
        let v = stack.pop().ok_or_else(|| Stuck::EmptyPop(loc.clone()))?;
        if stack.is_empty() {
            self.stacks.remove(loc);
        }
        Ok(v)
    }

    /// Non-empty stacks, bottom first.
    pub fn stacks(&self) -> BTreeMap<Location, Vec<Value>> {
        self.stacks.iter().map(|(l, s)| (l.clone(), s.to_vec())).collect()
    }

    pub fn locations(&self) -> impl Iterator<Item = &Location> {
        self.stacks.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.stacks.is_empty()
    }

    /// Same stacks, with values compared up to alpha-equivalence.
    pub fn same_stacks(&self, other: &Memory) -> bool {
        let (a, b) = (self.stacks(), other.stacks());
        a.len() == b.len()
            && a.iter().zip(&b).all(|((la, sa), (lb, sb))| {
                la == lb && sa.len() == sb.len() && sa.iter().zip(sb).all(|(v, w)| alpha_eq_value(v, w))
            })
    }

    /// Every stored value is closed.
    pub fn is_closed(&self) -> bool {
        self.stacks
            .values()
            .all(|s| s.to_vec().iter().all(|v| fmc_term::free_vars_value(v).is_empty()))
    }

    /// `below` stacked underneath `self`, location by location.
    pub fn under(&self, below: &Memory) -> Memory {
        let mut out = self.clone();
        for (loc, items) in below.stacks() {
            let mut all = items;
            all.extend(self.stack(&loc));
            out.set_stack(loc, all);
        }
        out
    }

    /// The stacks as JSON: location name to printed values, bottom first.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .stacks
            .iter()
            .map(|(l, s)| {
                let items = s
                    .to_vec()
                    .iter()
                    .map(|v| serde_json::Value::String(v.to_string()))
                    .collect();
                (l.name().to_string(), serde_json::Value::Array(items))
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stacks.is_empty() {
            return write!(f, "ε");
        }
        for (i, (l, s)) in self.stacks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let items: Vec<String> = s.to_vec().iter().map(|v| v.to_string()).collect();
            write!(f, "{}[{}]", l, items.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stack_is_lifo_and_persistent() {
        let mut s: Stack = [Value::constant("1"), Value::constant("2")].into_iter().collect();
        let snapshot = s.clone();
        assert_eq!(s.pop(), Some(Value::constant("2")));
        assert_eq!(s.len(), 1);
        assert_eq!(snapshot.to_vec(), vec![Value::constant("1"), Value::constant("2")]);
    }

    #[test]
    fn policies_are_enforced() {
        let c = Location::new("c");
        let mut m = Memory::new().with_policy(c.clone(), Policy::Cell);
        m.push(&c, Value::constant("0")).unwrap();
        assert_eq!(
            m.push(&c, Value::constant("1")),
            Err(Stuck::PolicyViolation(c.clone(), Violation::CellOverflow))
        );
        let out = Location::new("out");
        let mut m = Memory::new().with_policy(out.clone(), Policy::WriteStream);
        m.push(&out, Value::constant("1")).unwrap();
        assert!(matches!(
            m.pop(&out),
            Err(Stuck::PolicyViolation(_, Violation::PopFromWriteStream))
        ));
        let inp = Location::new("in");
        let mut m = Memory::new().with_policy(
            inp.clone(),
            Policy::ReadStream(Stream::script(vec![Value::constant("7")])),
        );
        assert_eq!(m.pop(&inp), Ok(Value::constant("7")));
        assert_eq!(m.pop(&inp), Err(Stuck::EmptyPop(inp.clone())));
        assert!(m.push(&inp, Value::constant("1")).is_err());
    }

    #[test]
    fn random_stream_is_seeded() {
        let rnd = Location::new("rnd");
        let draw = |seed| {
            let mut m = Memory::new().with_policy(rnd.clone(), Policy::ReadStream(Stream::random(seed)));
            (0..16).map(|_| m.pop(&rnd).unwrap().to_string()).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert!(draw(3).iter().all(|v| v == "!{<x>.<_>.?x}" || v == "!{<_>.<y>.?y}"));
    }
}
