//! Seeded generation of typed lambda-terms.
//!
//! Products are flat: their components are neither products nor the unit
//! type. Every base type has at least one constant, so every type is
//! inhabited.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fmc_term::VarName;

use crate::lambda::{LContext, LSignature, LType, Lambda, Pattern};

#[derive(Clone, Debug)]
pub struct LGenConfig {
    /// Base types with their value constants.
    pub bases: Vec<(String, Vec<String>)>,
    /// Largest nesting of arrows and products in a generated type.
    pub type_depth: usize,
    pub products: bool,
    /// Largest number of variables in a generated context.
    pub max_context: usize,
}

impl Default for LGenConfig {
    fn default() -> Self {
        LGenConfig {
            bases: vec![
                ("o".into(), vec!["a".into(), "b".into()]),
                ("s".into(), vec!["e".into()]),
            ],
            type_depth: 2,
            products: true,
            max_context: 2,
        }
    }
}

pub struct LGen {
    rng: ChaCha8Rng,
    cfg: LGenConfig,
    counter: usize,
}

impl LGen {
    pub fn new(seed: u64, cfg: LGenConfig) -> LGen {
        LGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
            counter: 0,
        }
    }

    pub fn signature(&self) -> LSignature {
        let mut sig = LSignature::new();
        for (b, cs) in &self.cfg.bases {
            sig = sig.with_base(b);
            for c in cs {
                sig = sig.with_value(c, LType::base(b));
            }
        }
        sig
    }

    fn base(&mut self) -> LType {
        let (b, _) = self.cfg.bases.choose(&mut self.rng).expect("at least one base type");
        LType::base(b)
    }

    /// A type that is not a product.
    fn single(&mut self, depth: usize) -> LType {
        if depth == 0 || self.rng.gen_bool(0.45) {
            self.base()
        } else {
            let a = self.ty(depth - 1);
            let b = self.ty(depth - 1);
            LType::arrow(a, b)
        }
    }

    /// A type with at most `depth` nested arrows and products.
    pub fn ty(&mut self, depth: usize) -> LType {
        if self.cfg.products && depth > 0 {
            let roll = self.rng.gen_range(0..10);
            if roll == 0 {
                return LType::unit();
            }
            if roll <= 2 {
                let n = self.rng.gen_range(2..=3);
                return LType::Prod((0..n).map(|_| self.single(depth - 1)).collect());
            }
        }
        self.single(depth)
    }

    fn fresh(&mut self, prefix: &str) -> VarName {
        self.counter += 1;
        VarName::new(&format!("{prefix}{}", self.counter))
    }

    pub fn context(&mut self) -> LContext {
        let n = self.rng.gen_range(0..=self.cfg.max_context);
        let mut ctx = LContext::new();
        for _ in 0..n {
            let t = self.ty(self.cfg.type_depth);
            let x = self.fresh("z");
            ctx.0.push((x, t));
        }
        ctx
    }

    fn pattern(&mut self, ty: &LType) -> (Pattern, Vec<(VarName, LType)>) {
        match ty {
            LType::Prod(ts) if self.rng.gen_bool(0.6) => {
                let mut ps = Vec::new();
                let mut binds = Vec::new();
                for t in ts {
                    let x = self.fresh("x");
                    ps.push(Pattern::Var(x.clone()));
                    binds.push((x, t.clone()));
                }
                (Pattern::Tuple(ps), binds)
            }
            _ => {
                let x = self.fresh("x");
                (Pattern::Var(x.clone()), vec![(x, ty.clone())])
            }
        }
    }

    /// Variables whose type ends in `ty` after some arguments.
    fn heads(ctx: &LContext, ty: &LType) -> Vec<(VarName, Vec<LType>)> {
        let mut out = Vec::new();
        for (x, t) in &ctx.0 {
            if ctx.lookup(x) != Some(t) {
                continue;
            }
            let mut args = Vec::new();
            let mut cur = t;
            loop {
                if cur == ty {
                    out.push((x.clone(), args.clone()));
                }
                match cur {
                    LType::Arrow(a, b) => {
                        args.push((**a).clone());
                        cur = b;
                    }
                    _ => break,
                }
            }
        }
        out
    }

    fn intro(&mut self, ctx: &LContext, ty: &LType, budget: usize) -> Lambda {
        match ty {
            LType::Base(b) => {
                let cs = &self
                    .cfg
                    .bases
                    .iter()
                    .find(|(n, _)| n == b.name())
                    .expect("known base")
                    .1;
                Lambda::constant(cs.choose(&mut self.rng).expect("inhabited base"))
            }
            LType::Arrow(a, b) => {
                let (p, binds) = self.pattern(a);
                let inner = ctx.extend(binds);
                let body = self.term(&inner, b, budget.saturating_sub(1));
                Lambda::abs(p, Some((**a).clone()), body)
            }
            LType::Prod(ts) => {
                let share = budget.saturating_sub(1) / ts.len().max(1);
                Lambda::Tuple(ts.iter().map(|t| self.term(ctx, t, share)).collect())
            }
        }
    }

    /// A term of type `ty` in `ctx`, of size roughly at most `budget`.
    pub fn term(&mut self, ctx: &LContext, ty: &LType, budget: usize) -> Lambda {
        let heads = Self::heads(ctx, ty);
        let exact: Vec<VarName> = heads
            .iter()
            .filter(|(_, a)| a.is_empty())
            .map(|(x, _)| x.clone())
            .collect();
        if budget <= 2 {
            if let Some(x) = exact.choose(&mut self.rng) {
                if self.rng.gen_bool(0.8) {
                    return Lambda::Var(x.clone());
                }
            }
            return self.intro(ctx, ty, budget);
        }
        match self.rng.gen_range(0..10) {
            0..=1 if !exact.is_empty() => Lambda::Var(exact.choose(&mut self.rng).expect("non-empty").clone()),
            2..=4 if heads.iter().any(|(_, a)| !a.is_empty()) => {
                let spines: Vec<&(VarName, Vec<LType>)> = heads.iter().filter(|(_, a)| !a.is_empty()).collect();
                let (x, args) = (*spines.choose(&mut self.rng).expect("non-empty")).clone();
                let share = (budget - 1) / (args.len() + 1);
                args.iter().fold(Lambda::Var(x), |f, a| {
                    let arg = self.term(ctx, a, share);
                    Lambda::app(f, arg)
                })
            }
            5..=6 => {
                let a = self.ty(1);
                let f_ty = LType::arrow(a.clone(), ty.clone());
                let budget = budget - 1;
                let f = self.intro(ctx, &f_ty, budget / 2 + budget % 2);
                let n = self.term(ctx, &a, budget / 2);
                Lambda::app(f, n)
            }
            _ => self.intro(ctx, ty, budget),
        }
    }

    /// A term of at most `max_size` nodes with its context and type.
    pub fn sample(&mut self, max_size: usize) -> (LContext, Lambda, LType) {
        loop {
            let ctx = self.context();
            let ty = self.ty(self.cfg.type_depth);
            let m = self.term(&ctx, &ty, max_size);
            if m.size() <= max_size {
                return (ctx, m, ty);
            }
        }
    }

    /// A closed term of type `ty` with at most `max_size` nodes, if one is
    /// found in a bounded number of attempts.
    pub fn closed(&mut self, ty: &LType, max_size: usize) -> Option<Lambda> {
        (0..200)
            .map(|_| self.term(&LContext::new(), ty, max_size))
            .find(|m| m.size() <= max_size)
    }
}
