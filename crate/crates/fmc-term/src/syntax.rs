use std::sync::Arc;

use crate::{Location, Symbol, ValueType, VarName};

/// A pop binder with an optional type annotation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Binder {
    pub var: VarName,
    pub ann: Option<ValueType>,
}

impl Binder {
    pub fn new(var: VarName) -> Binder {
        Binder { var, ann: None }
    }

    pub fn annotated(var: VarName, ty: ValueType) -> Binder {
        Binder { var, ann: Some(ty) }
    }
}

/// A computation: a finite sequence of actions ending in `Star`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub enum Computation {
    /// The empty computation `*`.
    #[default]
    Star,
    /// A computation constant `c.M`.
    Const(Symbol, Arc<Computation>),
    /// Push `[V]a.M`.
    Push(Value, Location, Arc<Computation>),
    /// Pop `a<x>.M`.
    Pop(Location, Binder, Arc<Computation>),
    /// Force `?V.M`.
    Force(Value, Arc<Computation>),
}

/// A value: variable, value constant or thunk.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    Var(VarName),
    Const(Symbol),
    Thunk(Arc<Computation>),
}

impl Computation {
    pub fn star() -> Computation {
        Computation::Star
    }

    pub fn push(value: Value, loc: Location, then: Computation) -> Computation {
        Computation::Push(value, loc, Arc::new(then))
    }

    pub fn push_main(value: Value, then: Computation) -> Computation {
        Computation::push(value, Location::main(), then)
    }

    pub fn pop(loc: Location, var: VarName, then: Computation) -> Computation {
        Computation::Pop(loc, Binder::new(var), Arc::new(then))
    }

    pub fn pop_main(var: VarName, then: Computation) -> Computation {
        Computation::pop(Location::main(), var, then)
    }

    pub fn pop_annotated(loc: Location, var: VarName, ty: ValueType, then: Computation) -> Computation {
        Computation::Pop(loc, Binder::annotated(var, ty), Arc::new(then))
    }

    pub fn force(value: Value, then: Computation) -> Computation {
        Computation::Force(value, Arc::new(then))
    }

    pub fn constant(sym: Symbol, then: Computation) -> Computation {
        Computation::Const(sym, Arc::new(then))
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Computation::Star)
    }

    /// The continuation of the head action, if any.
    pub fn continuation(&self) -> Option<&Computation> {
        match self {
            Computation::Star => None,
            Computation::Const(_, m)
            | Computation::Push(_, _, m)
            | Computation::Pop(_, _, m)
            | Computation::Force(_, m) => Some(m),
        }
    }

    /// Replace the continuation of the head action.
    pub fn with_continuation(&self, then: Computation) -> Computation {
        let then = Arc::new(then);
        match self {
            Computation::Star => Computation::Star,
            Computation::Const(c, _) => Computation::Const(c.clone(), then),
            Computation::Push(v, a, _) => Computation::Push(v.clone(), a.clone(), then),
            Computation::Pop(a, b, _) => Computation::Pop(a.clone(), b.clone(), then),
            Computation::Force(v, _) => Computation::Force(v.clone(), then),
        }
    }

    /// Every location mentioned by an action, including inside thunks.
    pub fn locations(&self) -> std::collections::BTreeSet<Location> {
        let mut out = std::collections::BTreeSet::new();
        collect_locations(self, &mut out);
        out
    }

    /// True when no constant occurs anywhere in the term.
    pub fn is_constant_free(&self) -> bool {
        let mut m = self;
        loop {
            match m {
                Computation::Star => return true,
                Computation::Const(..) => return false,
                Computation::Push(v, _, k) | Computation::Force(v, k) => {
                    if !v.is_constant_free() {
                        return false;
                    }
                    m = k;
                }
                Computation::Pop(_, _, k) => m = k,
            }
        }
    }

    /// Drop all binder annotations.
    pub fn erase_annotations(&self) -> Computation {
        match self {
            Computation::Star => Computation::Star,
            Computation::Const(c, m) => Computation::constant(c.clone(), m.erase_annotations()),
            Computation::Push(v, a, m) => Computation::push(v.erase_annotations(), a.clone(), m.erase_annotations()),
            Computation::Pop(a, b, m) => Computation::pop(a.clone(), b.var.clone(), m.erase_annotations()),
            Computation::Force(v, m) => Computation::force(v.erase_annotations(), m.erase_annotations()),
        }
    }
}

fn collect_locations(m: &Computation, out: &mut std::collections::BTreeSet<Location>) {
    let mut m = m;
    loop {
        match m {
            Computation::Star => return,
            Computation::Const(_, k) => m = k,
            Computation::Push(v, a, k) => {
                out.insert(a.clone());
                if let Value::Thunk(n) = v {
                    collect_locations(n, out);
                }
                m = k;
            }
            Computation::Pop(a, _, k) => {
                out.insert(a.clone());
                m = k;
            }
            Computation::Force(v, k) => {
                if let Value::Thunk(n) = v {
                    collect_locations(n, out);
                }
                m = k;
            }
        }
    }
}

impl Value {
    pub fn var(name: &str) -> Value {
        Value::Var(VarName::new(name))
    }

    pub fn constant(sym: &str) -> Value {
        Value::Const(Symbol::new(sym))
    }

    pub fn thunk(body: Computation) -> Value {
        Value::Thunk(Arc::new(body))
    }

    pub fn is_constant_free(&self) -> bool {
        match self {
            Value::Var(_) => true,
            Value::Const(_) => false,
            Value::Thunk(m) => m.is_constant_free(),
        }
    }

    pub fn erase_annotations(&self) -> Value {
        match self {
            Value::Thunk(m) => Value::thunk(m.erase_annotations()),
            v => v.clone(),
        }
    }
}
