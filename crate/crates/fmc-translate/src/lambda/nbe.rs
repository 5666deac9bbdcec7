//! Normalisation by evaluation: beta, pattern-matching beta, eta and
//! surjective pairing. Normal forms are eta-long, so two terms are equal
//! in the theory exactly when their normal forms are alpha-equal.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::rc::Rc;

use fmc_term::VarName;

use super::{infer, LContext, LSignature, LType, Lambda, Pattern};
use crate::TranslateError;

type Fun = Rc<dyn Fn(Sem) -> Result<Sem, TranslateError>>;

#[derive(Clone)]
enum Sem {
    Lam(Fun),
    Tuple(Vec<Sem>),
    /// A neutral term of base type.
    Neutral(Lambda),
}

type Env = BTreeMap<VarName, Sem>;

struct Kit {
    sig: LSignature,
    next: Cell<u32>,
}

impl Kit {
    fn fresh(&self) -> VarName {
        let i = self.next.get();
        self.next.set(i + 1);
        VarName::indexed("x", i)
    }
}

fn unsupported(m: &Lambda) -> TranslateError {
    TranslateError::UnsupportedConstruct(format!("the normaliser covers pure terms only: {m}"))
}

fn shape(what: &str) -> TranslateError {
    TranslateError::IllTyped(format!("normaliser met {what}"))
}

fn apply(f: Sem, arg: Sem) -> Result<Sem, TranslateError> {
    match f {
        Sem::Lam(f) => f(arg),
        _ => Err(shape("an application of a non-function")),
    }
}

fn reflect(kit: &Rc<Kit>, ty: &LType, ne: Lambda) -> Sem {
    match ty {
        LType::Base(_) => Sem::Neutral(ne),
        LType::Arrow(a, b) => {
            let (kit, a, b) = (kit.clone(), a.clone(), b.clone());
            Sem::Lam(Rc::new(move |s| {
                let arg = reify(&kit, &a, s)?;
                Ok(reflect(&kit, &b, Lambda::app(ne.clone(), arg)))
            }))
        }
        LType::Prod(ts) => Sem::Tuple(
            ts.iter()
                .enumerate()
                .map(|(i, t)| reflect(kit, t, Lambda::proj(i, ts, ne.clone())))
                .collect(),
        ),
    }
}

fn reify(kit: &Rc<Kit>, ty: &LType, s: Sem) -> Result<Lambda, TranslateError> {
    match (ty, s) {
        (LType::Base(_), Sem::Neutral(ne)) => Ok(ne),
        (LType::Arrow(a, b), f @ Sem::Lam(_)) => {
            let x = kit.fresh();
            let body = apply(f, reflect(kit, a, Lambda::Var(x.clone())))?;
            Ok(Lambda::abs(Pattern::Var(x), Some((**a).clone()), reify(kit, b, body)?))
        }
        (LType::Prod(ts), Sem::Tuple(ss)) if ts.len() == ss.len() => Ok(Lambda::Tuple(
            ts.iter()
                .zip(ss)
                .map(|(t, s)| reify(kit, t, s))
                .collect::<Result<_, _>>()?,
        )),
        (ty, _) => Err(shape(&format!("a value of the wrong shape for {ty}"))),
    }
}

fn bind(p: &Pattern, s: Sem, env: &mut Env) -> Result<(), TranslateError> {
    match (p, s) {
        (Pattern::Var(x), s) => {
            env.insert(x.clone(), s);
            Ok(())
        }
        (Pattern::Tuple(ps), Sem::Tuple(ss)) if ps.len() == ss.len() => {
            for (p, s) in ps.iter().zip(ss) {
                bind(p, s, env)?;
            }
            Ok(())
        }
        _ => Err(shape(&format!("a value not matching the pattern {p}"))),
    }
}

fn eval(kit: &Rc<Kit>, env: &Env, m: &Lambda) -> Result<Sem, TranslateError> {
    match m {
        Lambda::Var(x) => env
            .get(x)
            .cloned()
            .ok_or_else(|| TranslateError::IllTyped(format!("unbound variable {x}"))),
        Lambda::VConst(v) => Ok(reflect(kit, kit.sig.value(v)?, m.clone())),
        Lambda::CConst(c, n) => {
            let (dom, cod) = kit.sig.computation(c)?.clone();
            let arg = reify(kit, &dom, eval(kit, env, n)?)?;
            Ok(reflect(kit, &cod, Lambda::cconst(c, arg)))
        }
        Lambda::App(f, n) => apply(eval(kit, env, f)?, eval(kit, env, n)?),
        Lambda::Abs(p, _, body) => {
            let (kit, env, p, body) = (kit.clone(), env.clone(), p.clone(), body.clone());
            Ok(Sem::Lam(Rc::new(move |s| {
                let mut inner = env.clone();
                bind(&p, s, &mut inner)?;
                eval(&kit, &inner, &body)
            })))
        }
        Lambda::Tuple(ms) => Ok(Sem::Tuple(
            ms.iter().map(|n| eval(kit, env, n)).collect::<Result<_, _>>()?,
        )),
        Lambda::Choice(..) | Lambda::Assign(..) | Lambda::Read(_) => Err(unsupported(m)),
    }
}

/// The beta-eta normal form of a typed pure term.
pub fn normalize(sig: &LSignature, ctx: &LContext, m: &Lambda) -> Result<Lambda, TranslateError> {
    let ty = infer(sig, ctx, m)?;
    let top = ctx
        .0
        .iter()
        .map(|(x, _)| x.index())
        .max()
        .unwrap_or(0)
        .max(m.max_index());
    let kit = Rc::new(Kit {
        sig: sig.clone(),
        next: Cell::new(top + 1),
    });
    let mut env = Env::new();
    for (x, t) in ctx.0.iter().rev() {
        env.insert(x.clone(), reflect(&kit, t, Lambda::Var(x.clone())));
    }
    reify(&kit, &ty, eval(&kit, &env, m)?)
}
