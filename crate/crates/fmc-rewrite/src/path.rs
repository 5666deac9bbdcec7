use std::fmt;

use fmc_term::{Computation, Value};

/// One move from a node to a child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    /// From an action to its continuation.
    Next,
    /// From a push or force to its value.
    Value,
    /// From a thunk to its body.
    Body,
}

/// An address of a computation or value inside a computation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<Dir>);

impl Path {
    pub fn root() -> Path {
        Path::default()
    }

    pub fn child(&self, d: Dir) -> Path {
        let mut p = self.0.clone();
        p.push(d);
        Path(p)
    }
}

impl fmt::Display for Path {
    /// Runs of `Next` are compressed: `3.v.b.1` is three continuations,
    /// the value, the thunk body and one more continuation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut run = 0;
        for d in &self.0 {
            match d {
                Dir::Next => run += 1,
                other => {
                    if run > 0 {
                        parts.push(run.to_string());
                        run = 0;
                    }
                    parts.push(if *other == Dir::Value { "v" } else { "b" }.to_string());
                }
            }
        }
        if run > 0 || parts.is_empty() {
            parts.push(run.to_string());
        }
        write!(f, "{}", parts.join("."))
    }
}

/// A subterm of either sort.
#[derive(Clone, Debug, PartialEq)]
pub enum Focus {
    Comp(Computation),
    Val(Value),
}

enum Frame {
    Next(Computation),
    Value(Computation),
    Body,
}

/// Rebuild `m` with the subterm at `path` replaced by `f` of it.
/// Returns `None` if the path does not exist or `f` declines.
pub(crate) fn replace_at(m: &Computation, path: &[Dir], f: impl FnOnce(Focus) -> Option<Focus>) -> Option<Computation> {
    let mut frames = Vec::with_capacity(path.len());
    let mut cur = Focus::Comp(m.clone());
    for d in path {
        cur = match (cur, d) {
            (Focus::Comp(c), Dir::Next) => {
                let k = c.continuation()?.clone();
                frames.push(Frame::Next(c));
                Focus::Comp(k)
            }
            (Focus::Comp(c), Dir::Value) => {
                let v = match &c {
                    Computation::Push(v, _, _) | Computation::Force(v, _) => v.clone(),
                    _ => return None,
                };
                frames.push(Frame::Value(c));
                Focus::Val(v)
            }
            (Focus::Val(Value::Thunk(body)), Dir::Body) => {
                frames.push(Frame::Body);
                Focus::Comp((*body).clone())
            }
            _ => return None,
        };
    }
    let mut cur = f(cur)?;
    while let Some(frame) = frames.pop() {
        cur = match (frame, cur) {
            (Frame::Next(parent), Focus::Comp(k)) => Focus::Comp(parent.with_continuation(k)),
            (Frame::Value(parent), Focus::Val(v)) => Focus::Comp(match parent {
                Computation::Push(_, a, k) => Computation::Push(v, a, k),
                Computation::Force(_, k) => Computation::Force(v, k),
                _ => unreachable!("value frames are pushes and forces"),
            }),
            (Frame::Body, Focus::Comp(c)) => Focus::Val(Value::thunk(c)),
            _ => return None,
        };
    }
    match cur {
        Focus::Comp(c) => Some(c),
        Focus::Val(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_print_compressed() {
        assert_eq!(Path::root().to_string(), "0");
        let p = Path(vec![Dir::Next, Dir::Next, Dir::Value, Dir::Body, Dir::Next]);
        assert_eq!(p.to_string(), "2.v.b.1");
    }

    #[test]
    fn replace_inside_a_thunk() {
        let m = Computation::push_main(
            Value::thunk(Computation::force(Value::var("x"), Computation::Star)),
            Computation::Star,
        );
        let out = replace_at(&m, &[Dir::Value, Dir::Body], |_| Some(Focus::Comp(Computation::Star))).unwrap();
        assert_eq!(
            out,
            Computation::push_main(Value::thunk(Computation::Star), Computation::Star)
        );
        assert!(replace_at(&m, &[Dir::Next, Dir::Next], Some).is_none());
    }
}
