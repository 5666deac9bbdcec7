use std::collections::BTreeMap;
use std::sync::Arc;

use fmc_term::{Location, ValueType, VarName};
use fmc_types::{CompDerivation, ValueDerivation};

use crate::{Count, Kind, MeasureError, SemFun, SemMem};

/// A typed term stripped to what the interpretation needs.
pub(crate) enum Code {
    Id,
    Push(Val, Location, Arc<Code>),
    Pop(Location, VarName, Arc<Code>),
    Force(Val, Arc<Code>),
}

pub(crate) enum Val {
    Var(VarName),
    Thunk(ValueType, Arc<Code>),
}

pub(crate) fn compile(d: &CompDerivation) -> Result<Arc<Code>, MeasureError> {
    let mut spine = Vec::new();
    let mut node = d;
    loop {
        match node {
            CompDerivation::Id { .. } => break,
            CompDerivation::Const { sym, .. } => return Err(MeasureError::OutOfFragment(sym.clone())),
            _ => {}
        }
        spine.push(node);
        node = node.next().expect("non-identity nodes have a continuation");
    }
    let mut code = Arc::new(Code::Id);
    for n in spine.into_iter().rev() {
        code = Arc::new(match n {
            CompDerivation::Push { value, loc, .. } => Code::Push(compile_value(value)?, loc.clone(), code),
            CompDerivation::Pop { loc, var, .. } => Code::Pop(loc.clone(), var.clone(), code),
            CompDerivation::Force { value, .. } => Code::Force(compile_value(value)?, code),
            CompDerivation::Id { .. } | CompDerivation::Const { .. } => unreachable!("spine holds actions only"),
        });
    }
    Ok(code)
}

pub(crate) fn compile_value(d: &ValueDerivation) -> Result<Val, MeasureError> {
    match d {
        ValueDerivation::Var { name, .. } => Ok(Val::Var(name.clone())),
        ValueDerivation::Const { sym, .. } => Err(MeasureError::OutOfFragment(sym.clone())),
        ValueDerivation::Thunk { ty, body } => Ok(Val::Thunk(ty.clone(), compile(body)?)),
    }
}

pub(crate) type Env<C> = BTreeMap<VarName, SemFun<C>>;

pub(crate) fn closure<C: Count>(ty: ValueType, code: Arc<Code>, env: Env<C>, kind: Kind) -> SemFun<C> {
    SemFun::new(ty, move |mem| run(&code, env.clone(), kind, mem))
}

fn value<C: Count>(v: &Val, env: &Env<C>, kind: Kind) -> Result<SemFun<C>, MeasureError> {
    match v {
        Val::Var(x) => env
            .get(x)
            .cloned()
            .ok_or_else(|| MeasureError::DerivationMismatch(format!("no value for {x}"))),
        Val::Thunk(ty, body) => Ok(closure(ty.clone(), body.clone(), env.clone(), kind)),
    }
}

pub(crate) fn run<C: Count>(
    code: &Code,
    mut env: Env<C>,
    kind: Kind,
    mut mem: SemMem<C>,
) -> Result<(C, SemMem<C>), MeasureError> {
    let mut count = C::zero();
    let mut cur = code;
    loop {
        match cur {
            Code::Id => return Ok((count, mem)),
            Code::Push(v, a, k) => {
                let f = value(v, &env, kind)?;
                count = count.plus(&C::one());
                if kind == Kind::Strong {
                    count = count.plus(&f.collapse()?);
                }
                mem.push(a, f);
                cur = k;
            }
            Code::Pop(a, x, k) => {
                let f = mem.pop(a)?;
                env.insert(x.clone(), f);
                count = count.plus(&C::one());
                cur = k;
            }
            Code::Force(v, k) => {
                let f = value(v, &env, kind)?;
                let (n, out) = f.apply(mem)?;
                count = count.plus(&n);
                mem = out;
                cur = k;
            }
        }
    }
}
