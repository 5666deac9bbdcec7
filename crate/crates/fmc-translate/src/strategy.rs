//! Call-by-name and call-by-value translations of the lambda-calculus.
//!
//! ```text
//! cbn(x)        = ?x                    cbv(x)        = [x]
//! cbn(M N)      = [!{cbn N}].cbn M      cbv(M N)      = cbv N ; cbv M ; <f>.?f
//! cbn(\x. M)    = <x>.cbn M             cbv(\x. M)    = [!{<x>.cbv M}]
//! cbn(#v)       = [v]                   cbv(#v)       = [v]
//! cbn(c@M)      = cbn M ; c             cbv(c@M)      = cbv M ; c
//! M <+> N       = [!N'].[!M'].rnd<b>.?b        with M', N' translated alike
//! c := N; M     = N' ; set c ; M'
//! !c            = get c
//! ```
//!
//! The random stream at `rnd` holds Church booleans; true selects the
//! left branch. Value constants are of base type under call-by-name.

use fmc_surface::{expand, Macro};
use fmc_term::{sequence, Binder, Computation, Location, MemoryType, Value, ValueType, VarName};
use fmc_types::{CompType, Context, Signature};

use crate::lambda::{LContext, LSignature, LType, Lambda, Pattern};
use crate::TranslateError;

fn single_var(p: &Pattern, m: &Lambda) -> Result<VarName, TranslateError> {
    match p {
        Pattern::Var(x) => Ok(x.clone()),
        Pattern::Tuple(_) => Err(TranslateError::UnsupportedConstruct(format!(
            "pattern abstraction in {m}"
        ))),
    }
}

fn effect(
    m: &Lambda,
    tr: &dyn Fn(&Lambda) -> Result<Computation, TranslateError>,
) -> Result<Computation, TranslateError> {
    match m {
        Lambda::Choice(l, r) => Ok(expand(&Macro::Oplus(tr(l)?, tr(r)?))),
        Lambda::Assign(c, n, k) => Ok(sequence(&tr(n)?, &sequence(&expand(&Macro::Set(c.clone())), &tr(k)?))),
        Lambda::Read(c) => Ok(expand(&Macro::Get(c.clone()))),
        _ => unreachable!("only effects reach here"),
    }
}

/// The call-by-name translation.
pub fn cbn(m: &Lambda) -> Result<Computation, TranslateError> {
    match m {
        Lambda::Var(x) => Ok(Computation::force(Value::Var(x.clone()), Computation::Star)),
        Lambda::VConst(v) => Ok(Computation::push_main(Value::Const(v.clone()), Computation::Star)),
        Lambda::CConst(c, n) => Ok(sequence(&cbn(n)?, &Computation::constant(c.clone(), Computation::Star))),
        Lambda::App(f, n) => Ok(Computation::push_main(Value::thunk(cbn(n)?), cbn(f)?)),
        Lambda::Abs(p, ann, body) => {
            let x = single_var(p, m)?;
            let binder = match ann {
                Some(a) => Binder::annotated(x, cbn_type(a)?),
                None => Binder::new(x),
            };
            Ok(Computation::Pop(Location::main(), binder, cbn(body)?.into()))
        }
        Lambda::Tuple(_) => Err(TranslateError::UnsupportedConstruct(format!("tuple {m}"))),
        Lambda::Choice(..) | Lambda::Assign(..) | Lambda::Read(_) => effect(m, &cbn),
    }
}

/// The call-by-value translation.
pub fn cbv(m: &Lambda) -> Result<Computation, TranslateError> {
    match m {
        Lambda::Var(x) => Ok(Computation::push_main(Value::Var(x.clone()), Computation::Star)),
        Lambda::VConst(v) => Ok(Computation::push_main(Value::Const(v.clone()), Computation::Star)),
        Lambda::CConst(c, n) => Ok(sequence(&cbv(n)?, &Computation::constant(c.clone(), Computation::Star))),
        Lambda::App(f, n) => {
            let f_var = VarName::new("f");
            let call = Computation::pop_main(f_var.clone(), Computation::force(Value::Var(f_var), Computation::Star));
            Ok(sequence(&cbv(n)?, &sequence(&cbv(f)?, &call)))
        }
        Lambda::Abs(p, ann, body) => {
            let x = single_var(p, m)?;
            let binder = match ann {
                Some(a) => Binder::annotated(x, cbv_type(a)?),
                None => Binder::new(x),
            };
            let fun = Computation::Pop(Location::main(), binder, cbv(body)?.into());
            Ok(Computation::push_main(Value::thunk(fun), Computation::Star))
        }
        Lambda::Tuple(_) => Err(TranslateError::UnsupportedConstruct(format!("tuple {m}"))),
        Lambda::Choice(..) | Lambda::Assign(..) | Lambda::Read(_) => effect(m, &cbv),
    }
}

/// `A_v`: base types stay, `A -> B` becomes `?A_v > !B_v`.
pub fn cbv_type(a: &LType) -> Result<ValueType, TranslateError> {
    match a {
        LType::Base(b) => Ok(ValueType::Base(b.clone())),
        LType::Arrow(a, b) => Ok(ValueType::main_arrow(vec![cbv_type(a)?], vec![cbv_type(b)?])),
        LType::Prod(_) => Err(TranslateError::UnsupportedConstruct(format!("product type {a}"))),
    }
}

/// The computation type of `cbn(M)` for `M : A1 -> ... -> Am -> o`:
/// the argument thunks with `A1` on top, and one `o` out.
pub fn cbn_comp_type(a: &LType) -> Result<CompType, TranslateError> {
    let mut args = Vec::new();
    let mut cur = a;
    loop {
        match cur {
            LType::Base(b) => {
                args.reverse();
                return Ok(CompType::new(
                    MemoryType::main(args),
                    MemoryType::main(vec![ValueType::Base(b.clone())]),
                ));
            }
            LType::Arrow(x, y) => {
                args.push(cbn_type(x)?);
                cur = y;
            }
            LType::Prod(_) => return Err(TranslateError::UnsupportedConstruct(format!("product type {a}"))),
        }
    }
}

/// `A_n`: the type of a thunk standing for a term of type `A`.
pub fn cbn_type(a: &LType) -> Result<ValueType, TranslateError> {
    Ok(cbn_comp_type(a)?.as_value())
}

fn context(ctx: &LContext, tr: fn(&LType) -> Result<ValueType, TranslateError>) -> Result<Context, TranslateError> {
    let mut out = Vec::new();
    for (x, t) in ctx.0.iter().rev() {
        out.push((x.clone(), tr(t)?));
    }
    Ok(Context(out))
}

/// The context of `cbv(M)`: each variable at `A_v`.
pub fn cbv_context(ctx: &LContext) -> Result<Context, TranslateError> {
    context(ctx, cbv_type)
}

/// The context of `cbn(M)`: each variable at `A_n`.
pub fn cbn_context(ctx: &LContext) -> Result<Context, TranslateError> {
    context(ctx, cbn_type)
}

/// The type of `cbv(M)` for `M : A`: nothing in, `A_v` out.
pub fn cbv_comp_type(a: &LType) -> Result<CompType, TranslateError> {
    Ok(CompType::new(MemoryType::empty(), MemoryType::main(vec![cbv_type(a)?])))
}

/// The signature the call-by-value translation of terms over `sig` uses.
pub fn cbv_signature(sig: &LSignature) -> Result<Signature, TranslateError> {
    let mut out = Signature::new();
    for b in &sig.bases {
        out = out.with_base(b.name());
    }
    for (v, t) in &sig.values {
        out = out.with_value(v.name(), cbv_type(t)?);
    }
    for (c, (a, b)) in &sig.computations {
        let ty = CompType::new(
            MemoryType::main(vec![cbv_type(a)?]),
            MemoryType::main(vec![cbv_type(b)?]),
        );
        out = out.with_computation(c.name(), ty);
    }
    Ok(out)
}

/// The signature the call-by-name translation of terms over `sig` uses.
/// Constants must be of base type.
pub fn cbn_signature(sig: &LSignature) -> Result<Signature, TranslateError> {
    let base = |t: &LType| match t {
        LType::Base(b) => Ok(ValueType::Base(b.clone())),
        _ => Err(TranslateError::UnsupportedConstruct(format!(
            "constant of non-base type {t} under call-by-name"
        ))),
    };
    let mut out = Signature::new();
    for b in &sig.bases {
        out = out.with_base(b.name());
    }
    for (v, t) in &sig.values {
        out = out.with_value(v.name(), base(t)?);
    }
    for (c, (a, b)) in &sig.computations {
        out = out.with_computation(
            c.name(),
            CompType::new(MemoryType::main(vec![base(a)?]), MemoryType::main(vec![base(b)?])),
        );
    }
    Ok(out)
}
