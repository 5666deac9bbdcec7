//! The sequential lambda-calculus (the main location only) and the
//! lambda-calculus with patterns.
//!
//! The free functor sends `Π ⊢ M : A` to a closed term of type
//! `⟦Π⟧ > ⟦A⟧`, the context becoming the input stack with its leftmost
//! variable at the bottom:
//!
//! ```text
//! ⟦Π', y, Π ⊢ y⟧   = <?x>.<?y>.<?z>.[!y]
//! ⟦Π ⊢ #v⟧         = <?x>.[v]
//! ⟦Π ⊢ c@M⟧        = ⟦Π ⊢ M⟧ ; c
//! ⟦Π ⊢ (M, N)⟧     = <?x>.([!x].⟦M⟧ ; [!x].⟦N⟧)
//! ⟦Π ⊢ ()⟧         = <?x>
//! ⟦Π ⊢ M N⟧        = <?x>.([!x].⟦N⟧ ; [!x].⟦M⟧) ; <f>.?f
//! ⟦Π ⊢ \p:A. M⟧    = <?x>.[!{[!x] ; ⟦p:A, Π ⊢ M⟧}]
//! ⟦o⟧ = o   ⟦A -> B⟧ = ?⟦A⟧ > !⟦B⟧   ⟦A * B⟧ = ⟦A⟧ ⟦B⟧   ⟦1⟧ = ε
//! ```
//!
//! The interpretation back runs the term on a stack of lambda-terms:
//! a pop binds, a push evaluates its value, a force applies the value to
//! the tuple of its inputs and pushes the projections of the result, and
//! a thunk `!{M} : ?s > !t` becomes `\(s1, ..., sn). ⟦M⟧(s)`.

use std::collections::BTreeMap;

use fmc_term::{
    sequence, vector_pop, vector_push, Binder, Computation, Location, MemoryType, NameSupply, Value, ValueType, VarName,
};
use fmc_types::{check, CompDerivation, CompType, Context, Signature, ValueDerivation};

use crate::lambda::{infer, LContext, LSignature, LType, Lambda, Pattern};
use crate::TranslateError;

/// The stack of slot types standing for a lambda type, bottom first.
pub fn slots(a: &LType) -> Vec<ValueType> {
    match a {
        LType::Base(b) => vec![ValueType::Base(b.clone())],
        LType::Arrow(x, y) => vec![ValueType::main_arrow(slots(x), slots(y))],
        LType::Prod(ts) => ts.iter().flat_map(slots).collect(),
    }
}

/// The input stack standing for a context, leftmost variable at the bottom.
pub fn context_slots(ctx: &LContext) -> Vec<ValueType> {
    ctx.0.iter().flat_map(|(_, t)| slots(t)).collect()
}

/// The type `⟦Π⟧ > ⟦A⟧` of the free functor's image of `Π ⊢ M : A`.
pub fn free_functor_type(ctx: &LContext, a: &LType) -> CompType {
    CompType::new(MemoryType::main(context_slots(ctx)), MemoryType::main(slots(a)))
}

fn main_stack(m: &MemoryType, what: &str) -> Result<Vec<ValueType>, TranslateError> {
    if m.locations().any(|l| !l.is_main()) {
        return Err(TranslateError::IllTyped(format!(
            "{what} uses a location other than the main one"
        )));
    }
    Ok(m.stack(&Location::main()).to_vec())
}

/// The lambda type of a sequential value type: `?s > !t` becomes `⟦s⟧ -> ⟦t⟧`
/// with stacks read as products.
pub fn lambda_type(t: &ValueType) -> Result<LType, TranslateError> {
    match t {
        ValueType::Base(b) => Ok(LType::Base(b.clone())),
        ValueType::Arrow(i, o) => Ok(LType::arrow(
            stack_type(&main_stack(i, "a type")?)?,
            stack_type(&main_stack(o, "a type")?)?,
        )),
    }
}

/// A stack read as the product of its items, bottom first.
pub fn stack_type(s: &[ValueType]) -> Result<LType, TranslateError> {
    Ok(LType::prod(s.iter().map(lambda_type).collect::<Result<_, _>>()?))
}

/// The lambda signature of a sequential signature.
pub fn lambda_signature(sig: &Signature) -> Result<LSignature, TranslateError> {
    let mut out = LSignature::new();
    for b in &sig.bases {
        out = out.with_base(b.name());
    }
    for (v, t) in &sig.values {
        out = out.with_value(v.name(), lambda_type(t)?);
    }
    for (c, ty) in &sig.computations {
        let dom = stack_type(&main_stack(&ty.input, "a constant")?)?;
        let cod = stack_type(&main_stack(&ty.output, "a constant")?)?;
        out = out.with_computation(c.name(), dom, cod);
    }
    Ok(out)
}

/// The sequential signature of a lambda signature. Value constants must
/// stand for a single slot.
pub fn slc_signature(sig: &LSignature) -> Result<Signature, TranslateError> {
    let mut out = Signature::new();
    for b in &sig.bases {
        out = out.with_base(b.name());
    }
    for (v, t) in &sig.values {
        match slots(t).as_slice() {
            [one] => out = out.with_value(v.name(), one.clone()),
            _ => {
                return Err(TranslateError::UnsupportedConstruct(format!(
                    "value constant {v} of product type {t}"
                )))
            }
        }
    }
    for (c, (a, b)) in &sig.computations {
        out = out.with_computation(
            c.name(),
            CompType::new(MemoryType::main(slots(a)), MemoryType::main(slots(b))),
        );
    }
    Ok(out)
}

struct Layout {
    binders: Vec<Binder>,
    /// Slot range of each context entry.
    ranges: Vec<std::ops::Range<usize>>,
}

impl Layout {
    fn pop_all(&self, then: Computation) -> Computation {
        vector_pop(&BTreeMap::from([(Location::main(), self.binders.clone())]), then)
    }

    fn push(&self, range: std::ops::Range<usize>, then: Computation) -> Computation {
        let values = self.binders[range].iter().map(|b| Value::Var(b.var.clone())).collect();
        vector_push(&BTreeMap::from([(Location::main(), values)]), then)
    }

    fn push_all(&self, then: Computation) -> Computation {
        self.push(0..self.binders.len(), then)
    }
}

struct Functor {
    supply: NameSupply,
}

impl Functor {
    fn layout(&mut self, ctx: &LContext) -> Layout {
        let mut binders = Vec::new();
        let mut ranges = Vec::new();
        for (x, t) in &ctx.0 {
            let start = binders.len();
            for s in slots(t) {
                binders.push(Binder::annotated(self.supply.fresh(x.base()), s));
            }
            ranges.push(start..binders.len());
        }
        Layout { binders, ranges }
    }

    fn term(&mut self, ctx: &LContext, m: &Lambda) -> Result<Computation, TranslateError> {
        match m {
            Lambda::Var(y) => {
                let i = ctx
                    .0
                    .iter()
                    .position(|(x, _)| x == y)
                    .ok_or_else(|| TranslateError::IllTyped(format!("unbound variable {y}")))?;
                let l = self.layout(ctx);
                Ok(l.pop_all(l.push(l.ranges[i].clone(), Computation::Star)))
            }
            Lambda::VConst(v) => {
                let l = self.layout(ctx);
                Ok(l.pop_all(Computation::push_main(Value::Const(v.clone()), Computation::Star)))
            }
            Lambda::CConst(c, n) => Ok(sequence(
                &self.term(ctx, n)?,
                &Computation::constant(c.clone(), Computation::Star),
            )),
            Lambda::Tuple(ms) => {
                let l = self.layout(ctx);
                let mut body = Computation::Star;
                for n in ms.iter().rev() {
                    body = sequence(&l.push_all(self.term(ctx, n)?), &body);
                }
                Ok(l.pop_all(body))
            }
            Lambda::App(f, n) => {
                let l = self.layout(ctx);
                let fv = self.supply.fresh("f");
                let call = Computation::pop_main(fv.clone(), Computation::force(Value::Var(fv), Computation::Star));
                let body = sequence(
                    &l.push_all(self.term(ctx, n)?),
                    &sequence(&l.push_all(self.term(ctx, f)?), &call),
                );
                Ok(l.pop_all(body))
            }
            Lambda::Abs(p, ann, body) => {
                let a = ann
                    .as_ref()
                    .ok_or_else(|| TranslateError::IllTyped(format!("binder {p} needs a type annotation")))?;
                let inner = ctx.extend(p.bind(a)?);
                let l = self.layout(ctx);
                let thunk = Value::thunk(l.push_all(self.term(&inner, body)?));
                Ok(l.pop_all(Computation::push_main(thunk, Computation::Star)))
            }
            Lambda::Choice(..) | Lambda::Assign(..) | Lambda::Read(_) => Err(TranslateError::UnsupportedConstruct(
                format!("effects have no sequential counterpart: {m}"),
            )),
        }
    }
}

/// The free functor on a typed term `Π ⊢ M`, with its type `⟦Π⟧ > ⟦A⟧`.
pub fn free_functor(sig: &LSignature, ctx: &LContext, m: &Lambda) -> Result<(Computation, CompType), TranslateError> {
    let a = infer(sig, ctx, m)?;
    let top = ctx
        .0
        .iter()
        .map(|(x, _)| x.index())
        .max()
        .unwrap_or(0)
        .max(m.max_index());
    let mut f = Functor {
        supply: NameSupply::above(top),
    };
    let term = f.term(ctx, m)?;
    Ok((term, free_functor_type(ctx, &a)))
}

struct Interp {
    supply: NameSupply,
}

type Env = BTreeMap<VarName, Lambda>;

fn lambda_types(s: &[ValueType]) -> Result<Vec<LType>, TranslateError> {
    s.iter().map(lambda_type).collect()
}

impl Interp {
    fn take(stack: &mut Vec<Lambda>, n: usize) -> Result<Lambda, TranslateError> {
        if stack.len() < n {
            return Err(TranslateError::IllTyped("stack underflow while interpreting".into()));
        }
        Ok(Lambda::tuple(stack.split_off(stack.len() - n)))
    }

    fn spread(stack: &mut Vec<Lambda>, out: &[ValueType], result: Lambda) -> Result<(), TranslateError> {
        let ts = lambda_types(out)?;
        for i in 0..ts.len() {
            stack.push(Lambda::proj(i, &ts, result.clone()));
        }
        Ok(())
    }

    fn comp(
        &mut self,
        d: &CompDerivation,
        mut stack: Vec<Lambda>,
        mut env: Env,
    ) -> Result<Vec<Lambda>, TranslateError> {
        let mut node = d;
        loop {
            match node {
                CompDerivation::Id { .. } => return Ok(stack),
                CompDerivation::Push { value, loc, then, .. } => {
                    main_only(loc)?;
                    stack.push(self.value(value, &env)?);
                    node = then;
                }
                CompDerivation::Pop { loc, var, then, .. } => {
                    main_only(loc)?;
                    let top = stack
                        .pop()
                        .ok_or_else(|| TranslateError::IllTyped("stack underflow while interpreting".into()))?;
                    env.insert(var.clone(), top);
                    node = then;
                }
                CompDerivation::Force {
                    value, instance, then, ..
                } => {
                    let input = main_stack(&instance.input, "a force")?;
                    let output = main_stack(&instance.output, "a force")?;
                    let arg = Self::take(&mut stack, input.len())?;
                    let f = self.value(value, &env)?;
                    Self::spread(&mut stack, &output, Lambda::app(f, arg))?;
                    node = then;
                }
                CompDerivation::Const {
                    sym, instance, then, ..
                } => {
                    let input = main_stack(&instance.input, "a constant")?;
                    let output = main_stack(&instance.output, "a constant")?;
                    let arg = Self::take(&mut stack, input.len())?;
                    Self::spread(&mut stack, &output, Lambda::cconst(sym, arg))?;
                    node = then;
                }
            }
        }
    }

    fn value(&mut self, d: &ValueDerivation, env: &Env) -> Result<Lambda, TranslateError> {
        match d {
            ValueDerivation::Var { name, .. } => {
                Ok(env.get(name).cloned().unwrap_or_else(|| Lambda::Var(name.clone())))
            }
            ValueDerivation::Const { sym, .. } => Ok(Lambda::VConst(sym.clone())),
            ValueDerivation::Thunk { body, .. } => {
                let input = main_stack(&body.ty().input, "a thunk")?;
                let vars: Vec<VarName> = input.iter().map(|_| self.supply.fresh("s")).collect();
                let pattern = Pattern::tuple(vars.iter().cloned().map(Pattern::Var).collect());
                let ann = LType::prod(lambda_types(&input)?);
                let stack = vars.into_iter().map(Lambda::Var).collect();
                let out = self.comp(body, stack, env.clone())?;
                Ok(Lambda::abs(pattern, Some(ann), Lambda::tuple(out)))
            }
        }
    }
}

fn main_only(loc: &Location) -> Result<(), TranslateError> {
    if loc.is_main() {
        Ok(())
    } else {
        Err(TranslateError::IllTyped(format!("location {loc} in a sequential term")))
    }
}

/// Interpret a closed sequential term of type `?s > !t` applied to the
/// lambda-terms `inputs` for the slots of `s`, bottom first. The result
/// has type `⟦t⟧`.
pub fn interpret_slc_with(
    sig: &Signature,
    m: &Computation,
    ty: &CompType,
    inputs: Vec<Lambda>,
) -> Result<Lambda, TranslateError> {
    let input = main_stack(&ty.input, "the input type")?;
    main_stack(&ty.output, "the output type")?;
    if inputs.len() != input.len() {
        return Err(TranslateError::IllTyped(format!(
            "{} inputs for a stack of {}",
            inputs.len(),
            input.len()
        )));
    }
    let d = check(sig, &Context::new(), m, ty)?;
    let top = inputs.iter().map(Lambda::max_index).max().unwrap_or(0);
    let mut interp = Interp {
        supply: NameSupply::above(top),
    };
    Ok(Lambda::tuple(interp.comp(&d, inputs, Env::new())?))
}

/// Interpret a closed sequential term of type `?s > !t` as an open
/// lambda-term over one fresh variable per input slot.
pub fn interpret_slc(sig: &Signature, m: &Computation, ty: &CompType) -> Result<(LContext, Lambda), TranslateError> {
    let input = main_stack(&ty.input, "the input type")?;
    let mut supply = NameSupply::above(fmc_term::max_index(m));
    let mut ctx = Vec::new();
    for t in &input {
        ctx.push((supply.fresh("i"), lambda_type(t)?));
    }
    let inputs = ctx.iter().map(|(x, _)| Lambda::Var(x.clone())).collect();
    let body = interpret_slc_with(sig, m, ty, inputs)?;
    ctx.reverse();
    Ok((LContext(ctx), body))
}

/// The lambda-terms filling the slots of a context: each variable, or the
/// components of one of product type.
pub fn context_inputs(ctx: &LContext) -> Vec<Lambda> {
    fn go(t: &LType, m: Lambda, out: &mut Vec<Lambda>) {
        match t {
            LType::Prod(ts) => {
                for (i, u) in ts.iter().enumerate() {
                    go(u, Lambda::proj(i, ts, m.clone()), out);
                }
            }
            _ => out.push(m),
        }
    }
    let mut out = Vec::new();
    for (x, t) in &ctx.0 {
        go(t, Lambda::Var(x.clone()), &mut out);
    }
    out
}
