use fmc_term::{Location, Symbol, ValueType, VarName};

use crate::CompType;

/// The typing rule at the root of a derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Id,
    Push,
    Pop,
    Force,
    Const,
}

/// A typing derivation for a computation.
///
/// Every node records the full memory type in force at that point of the
/// term (`ty.input`) and the output of the whole term (`ty.output`), so a
/// consumer can walk the term and know the type of every stack slot.
#[derive(Clone, Debug, PartialEq)]
pub enum CompDerivation {
    Id {
        ty: CompType,
    },
    Push {
        ty: CompType,
        value: ValueDerivation,
        loc: Location,
        then: Box<CompDerivation>,
    },
    Pop {
        ty: CompType,
        loc: Location,
        var: VarName,
        var_ty: ValueType,
        then: Box<CompDerivation>,
    },
    /// `?V.M` where `instance` is the part of the value's type used here:
    /// its input is taken from the top of the memory and its output pushed.
    Force {
        ty: CompType,
        value: ValueDerivation,
        instance: CompType,
        then: Box<CompDerivation>,
    },
    Const {
        ty: CompType,
        sym: Symbol,
        instance: CompType,
        then: Box<CompDerivation>,
    },
}

/// A typing derivation for a value.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueDerivation {
    Var { name: VarName, ty: ValueType },
    Const { sym: Symbol, ty: ValueType },
    Thunk { ty: ValueType, body: Box<CompDerivation> },
}

impl CompDerivation {
    pub fn ty(&self) -> &CompType {
        match self {
            CompDerivation::Id { ty }
            | CompDerivation::Push { ty, .. }
            | CompDerivation::Pop { ty, .. }
            | CompDerivation::Force { ty, .. }
            | CompDerivation::Const { ty, .. } => ty,
        }
    }

    pub fn rule(&self) -> Rule {
        match self {
            CompDerivation::Id { .. } => Rule::Id,
            CompDerivation::Push { .. } => Rule::Push,
            CompDerivation::Pop { .. } => Rule::Pop,
            CompDerivation::Force { .. } => Rule::Force,
            CompDerivation::Const { .. } => Rule::Const,
        }
    }

    /// The derivation of the continuation.
    pub fn next(&self) -> Option<&CompDerivation> {
        match self {
            CompDerivation::Id { .. } => None,
            CompDerivation::Push { then, .. }
            | CompDerivation::Pop { then, .. }
            | CompDerivation::Force { then, .. }
            | CompDerivation::Const { then, .. } => Some(then),
        }
    }

    /// Visit every value derivation, including those nested in thunks.
    pub fn for_each_value(&self, f: &mut dyn FnMut(&ValueDerivation)) {
        let mut node = Some(self);
        while let Some(d) = node {
            match d {
                CompDerivation::Push { value, .. } | CompDerivation::Force { value, .. } => {
                    f(value);
                    if let ValueDerivation::Thunk { body, .. } = value {
                        body.for_each_value(f);
                    }
                }
                _ => {}
            }
            node = d.next();
        }
    }
}

impl ValueDerivation {
    pub fn ty(&self) -> &ValueType {
        match self {
            ValueDerivation::Var { ty, .. } | ValueDerivation::Const { ty, .. } | ValueDerivation::Thunk { ty, .. } => {
                ty
            }
        }
    }
}
