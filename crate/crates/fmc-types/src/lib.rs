//! Simple types for the functional machine calculus with values.
//!
//! Types are `t ::= a | ?s_A > !t_A`: a computation consumes a memory of
//! type `s_A` and produces one of type `t_A`. The checker synthesises a
//! minimal type for a term and accepts any expansion of it, i.e. the
//! same stack of extra items added at the bottom of input and output.

mod deriv;
mod infer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fmc_term::{ArrowDisplay, Computation, Location, MemoryType, Symbol, Value, ValueType, VarName};
use thiserror::Error;

pub use deriv::{CompDerivation, Rule, ValueDerivation};

/// A computation type `?s_A > !t_A`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CompType {
    pub input: MemoryType,
    pub output: MemoryType,
}

impl CompType {
    pub fn new(input: MemoryType, output: MemoryType) -> CompType {
        CompType { input, output }
    }

    /// The identity type `?t_A > !t_A`.
    pub fn identity(t: MemoryType) -> CompType {
        CompType::new(t.clone(), t)
    }

    /// Expansion by `t`: `?s?t > !t!u` from `?s > !u`.
    pub fn expand(&self, t: &MemoryType) -> CompType {
        CompType::new(t.concat(&self.input), t.concat(&self.output))
    }

    pub fn as_value(&self) -> ValueType {
        ValueType::arrow(self.input.clone(), self.output.clone())
    }
}

impl fmt::Display for CompType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ArrowDisplay(&self.input, &self.output))
    }
}

/// Base types and typed constants.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Signature {
    pub bases: BTreeSet<Symbol>,
    pub values: BTreeMap<Symbol, ValueType>,
    pub computations: BTreeMap<Symbol, CompType>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn with_base(mut self, name: &str) -> Signature {
        self.bases.insert(Symbol::new(name));
        self
    }

    pub fn with_value(mut self, name: &str, ty: ValueType) -> Signature {
        self.values.insert(Symbol::new(name), ty);
        self
    }

    pub fn with_computation(mut self, name: &str, ty: CompType) -> Signature {
        self.computations.insert(Symbol::new(name), ty);
        self
    }

    /// Checks that constant names are unique and every base type is declared.
    pub fn validate(&self) -> Result<(), TypeError> {
        for sym in self.values.keys() {
            if self.computations.contains_key(sym) {
                return Err(TypeError::DuplicateConstant(sym.clone()));
            }
        }
        for t in self.values.values() {
            self.check_type(t)?;
        }
        for t in self.computations.values() {
            self.check_memory(&t.input)?;
            self.check_memory(&t.output)?;
        }
        Ok(())
    }

    /// Every base type occurring in `t` is declared.
    pub fn check_type(&self, t: &ValueType) -> Result<(), TypeError> {
        match t {
            ValueType::Base(b) if self.bases.contains(b) => Ok(()),
            ValueType::Base(b) => Err(TypeError::UnknownBase(b.clone())),
            ValueType::Arrow(i, o) => {
                self.check_memory(i)?;
                self.check_memory(o)
            }
        }
    }

    pub fn check_memory(&self, m: &MemoryType) -> Result<(), TypeError> {
        m.iter()
            .flat_map(|(_, s)| s.0.iter())
            .try_for_each(|t| self.check_type(t))
    }
}

/// A typing context, innermost binding last.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context(pub Vec<(VarName, ValueType)>);

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn with(mut self, x: &str, t: ValueType) -> Context {
        self.0.push((VarName::new(x), t));
        self
    }

    pub fn lookup(&self, x: &VarName) -> Option<&ValueType> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TypeError {
    #[error("unbound variable {0}")]
    UnboundVariable(VarName),
    #[error("location {loc} has too few inputs: the term needs {needed}, the type provides {provided}")]
    LocationArityMismatch {
        loc: Location,
        needed: usize,
        provided: usize,
    },
    #[error("unknown constant {0}")]
    ConstantUnknown(Symbol),
    #[error("unknown base type {0}")]
    UnknownBase(Symbol),
    #[error("constant {0} declared twice")]
    DuplicateConstant(Symbol),
    #[error("type mismatch: expected {expected}, found {found}")]
    AnnotationMismatch { expected: String, found: String },
    #[error("binder {0} needs a type annotation")]
    MissingAnnotation(VarName),
    #[error("cannot force {0}: its type is not known to be a function type")]
    UnresolvedForce(String),
    #[error("derivation does not match the term: {0}")]
    DerivationMismatch(String),
}

/// Whether pop binders must carry annotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Unannotated binders are given metavariables resolved by unification.
    #[default]
    Lenient,
    /// Every pop binder must be annotated.
    Annotated,
}

/// Check a computation against a type, returning its derivation.
pub fn check(
    sig: &Signature,
    ctx: &Context,
    term: &Computation,
    against: &CompType,
) -> Result<CompDerivation, TypeError> {
    check_with(sig, ctx, term, against, Mode::Lenient)
}

pub fn check_with(
    sig: &Signature,
    ctx: &Context,
    term: &Computation,
    against: &CompType,
    mode: Mode,
) -> Result<CompDerivation, TypeError> {
    sig.check_memory(&against.input)?;
    sig.check_memory(&against.output)?;
    infer::Checker::new(sig, ctx, mode).check(term, Some(against))
}

/// Synthesise the minimal type of a computation. Type variables left
/// unconstrained are reported as base types named `_0`, `_1`, ...
pub fn infer(sig: &Signature, ctx: &Context, term: &Computation) -> Result<CompDerivation, TypeError> {
    infer::Checker::new(sig, ctx, Mode::Lenient).check(term, None)
}

/// Check a value against a value type.
pub fn check_value(
    sig: &Signature,
    ctx: &Context,
    v: &Value,
    against: &ValueType,
) -> Result<ValueDerivation, TypeError> {
    sig.check_type(against)?;
    infer::Checker::new(sig, ctx, Mode::Lenient).check_value(v, Some(against))
}

/// Synthesise the type of a value.
pub fn infer_value(sig: &Signature, ctx: &Context, v: &Value) -> Result<ValueDerivation, TypeError> {
    infer::Checker::new(sig, ctx, Mode::Lenient).check_value(v, None)
}

/// Derivations for `M`, `N` and `M;N` whose types compose by the
/// sequencing rule: `M : ?r > !s`, `N : ?s > !t`, `M;N : ?r > !t`.
pub struct Sequenced {
    pub first: CompDerivation,
    pub second: CompDerivation,
    pub whole: CompDerivation,
}

/// Check `M;N` against a type and split the derivation at the seam.
pub fn check_sequenced(
    sig: &Signature,
    ctx: &Context,
    m: &Computation,
    n: &Computation,
    against: &CompType,
) -> Result<Sequenced, TypeError> {
    let joined = fmc_term::sequence(m, n);
    let whole = check(sig, ctx, &joined, against)?;
    let mut node = &whole;
    let mut cur = m;
    while let Some(next) = cur.continuation() {
        node = node.next().expect("derivation follows the term");
        cur = next;
    }
    let middle = node.ty().input.clone();
    let first = check(sig, ctx, m, &CompType::new(against.input.clone(), middle.clone()))?;
    let second = check(sig, ctx, n, &CompType::new(middle, against.output.clone()))?;
    Ok(Sequenced { first, second, whole })
}
