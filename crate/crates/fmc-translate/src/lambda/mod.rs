//! The simply typed lambda-calculus with pattern matching.
//!
//! ```text
//! A ::= o | A -> B | A * ... * A | 1
//! p ::= x | (p, ..., p) | ()
//! M ::= x | #v | c@M | M N | \p:A. M | (M, ..., M) | ()
//!     | M <+> N | c := N; M | !c
//! ```
//!
//! The last line holds the effectful extensions, used only by the
//! call-by-name and call-by-value translations. Contexts list the most
//! recently bound variable first.

mod eval;
mod nbe;
mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use fmc_term::{Location, Symbol, VarName};

use crate::TranslateError;

pub use eval::cbv_eval;
pub use nbe::normalize;
pub use parse::{parse_lambda, parse_ltype};

/// A simple type. Products have zero or at least two components.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum LType {
    Base(Symbol),
    Arrow(Arc<LType>, Arc<LType>),
    Prod(Vec<LType>),
}

impl LType {
    pub fn base(name: &str) -> LType {
        LType::Base(Symbol::new(name))
    }

    pub fn arrow(a: LType, b: LType) -> LType {
        LType::Arrow(Arc::new(a), Arc::new(b))
    }

    pub fn unit() -> LType {
        LType::Prod(Vec::new())
    }

    /// The product of `ts`; a single component stands for itself.
    pub fn prod(mut ts: Vec<LType>) -> LType {
        if ts.len() == 1 {
            ts.pop().expect("one component")
        } else {
            LType::Prod(ts)
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, LType::Prod(ts) if ts.is_empty())
    }

    /// Nesting depth of arrows and products.
    pub fn depth(&self) -> usize {
        match self {
            LType::Base(_) => 0,
            LType::Arrow(a, b) => 1 + a.depth().max(b.depth()),
            LType::Prod(ts) => 1 + ts.iter().map(LType::depth).max().unwrap_or(0),
        }
    }
}

/// A linear pattern.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Pattern {
    Var(VarName),
    Tuple(Vec<Pattern>),
}

impl Pattern {
    pub fn var(x: &str) -> Pattern {
        Pattern::Var(VarName::new(x))
    }

    /// The tuple pattern of `ps`; a single pattern stands for itself.
    pub fn tuple(mut ps: Vec<Pattern>) -> Pattern {
        if ps.len() == 1 {
            ps.pop().expect("one component")
        } else {
            Pattern::Tuple(ps)
        }
    }

    /// The variables bound, left to right.
    pub fn vars(&self) -> Vec<VarName> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarName>) {
        match self {
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Tuple(ps) => ps.iter().for_each(|p| p.collect_vars(out)),
        }
    }

    pub fn is_linear(&self) -> bool {
        let vars = self.vars();
        vars.iter().collect::<BTreeSet<_>>().len() == vars.len()
    }

    /// Bind the pattern at `ty`: the variables with their types, left to right.
    pub fn bind(&self, ty: &LType) -> Result<Vec<(VarName, LType)>, TranslateError> {
        match (self, ty) {
            (Pattern::Var(x), _) => Ok(vec![(x.clone(), ty.clone())]),
            (Pattern::Tuple(ps), LType::Prod(ts)) if ps.len() == ts.len() => {
                let mut out = Vec::new();
                for (p, t) in ps.iter().zip(ts) {
                    out.extend(p.bind(t)?);
                }
                Ok(out)
            }
            _ => Err(TranslateError::IllTyped(format!(
                "pattern {self} does not match type {ty}"
            ))),
        }
    }
}

/// A lambda-term.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Lambda {
    Var(VarName),
    VConst(Symbol),
    /// A computation constant applied to its argument, `c@M`.
    CConst(Symbol, Arc<Lambda>),
    App(Arc<Lambda>, Arc<Lambda>),
    /// `\p:A. M`; the annotation is needed by every typed operation.
    Abs(Pattern, Option<LType>, Arc<Lambda>),
    /// Tuples have zero or at least two components.
    Tuple(Vec<Lambda>),
    /// Probabilistic choice `M <+> N`.
    Choice(Arc<Lambda>, Arc<Lambda>),
    /// `c := N; M`
    Assign(Location, Arc<Lambda>, Arc<Lambda>),
    /// `!c`
    Read(Location),
}

impl Lambda {
    pub fn var(x: &str) -> Lambda {
        Lambda::Var(VarName::new(x))
    }

    pub fn constant(v: &str) -> Lambda {
        Lambda::VConst(Symbol::new(v))
    }

    pub fn app(m: Lambda, n: Lambda) -> Lambda {
        Lambda::App(Arc::new(m), Arc::new(n))
    }

    pub fn abs(p: Pattern, ty: Option<LType>, body: Lambda) -> Lambda {
        Lambda::Abs(p, ty, Arc::new(body))
    }

    pub fn cconst(c: &Symbol, arg: Lambda) -> Lambda {
        Lambda::CConst(c.clone(), Arc::new(arg))
    }

    /// The tuple of `ms`; a single component stands for itself.
    pub fn tuple(mut ms: Vec<Lambda>) -> Lambda {
        if ms.len() == 1 {
            ms.pop().expect("one component")
        } else {
            Lambda::Tuple(ms)
        }
    }

    pub fn unit() -> Lambda {
        Lambda::Tuple(Vec::new())
    }

    /// Component `i` of a term of product type `ts`, as a pattern match.
    pub fn proj(i: usize, ts: &[LType], m: Lambda) -> Lambda {
        if ts.len() == 1 {
            return m;
        }
        let vars: Vec<VarName> = (0..ts.len()).map(|k| VarName::indexed("p", k as u32 + 1)).collect();
        let pat = Pattern::Tuple(vars.iter().cloned().map(Pattern::Var).collect());
        Lambda::app(
            Lambda::abs(pat, Some(LType::Prod(ts.to_vec())), Lambda::Var(vars[i].clone())),
            m,
        )
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Lambda::Var(_) | Lambda::VConst(_) | Lambda::Read(_) => 1,
            Lambda::CConst(_, m) | Lambda::Abs(_, _, m) => 1 + m.size(),
            Lambda::App(m, n) | Lambda::Choice(m, n) | Lambda::Assign(_, m, n) => 1 + m.size() + n.size(),
            Lambda::Tuple(ms) => 1 + ms.iter().map(Lambda::size).sum::<usize>(),
        }
    }

    /// Whether the term avoids the effectful extensions.
    pub fn is_pure(&self) -> bool {
        match self {
            Lambda::Var(_) | Lambda::VConst(_) => true,
            Lambda::CConst(_, m) | Lambda::Abs(_, _, m) => m.is_pure(),
            Lambda::App(m, n) => m.is_pure() && n.is_pure(),
            Lambda::Tuple(ms) => ms.iter().all(Lambda::is_pure),
            Lambda::Choice(..) | Lambda::Assign(..) | Lambda::Read(_) => false,
        }
    }

    /// The largest freshness index of any name in the term.
    pub fn max_index(&self) -> u32 {
        match self {
            Lambda::Var(x) => x.index(),
            Lambda::VConst(_) | Lambda::Read(_) => 0,
            Lambda::CConst(_, m) => m.max_index(),
            Lambda::Abs(p, _, m) => p
                .vars()
                .iter()
                .map(VarName::index)
                .max()
                .unwrap_or(0)
                .max(m.max_index()),
            Lambda::App(m, n) | Lambda::Choice(m, n) | Lambda::Assign(_, m, n) => m.max_index().max(n.max_index()),
            Lambda::Tuple(ms) => ms.iter().map(Lambda::max_index).max().unwrap_or(0),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
        match self {
            Lambda::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Lambda::VConst(_) | Lambda::Read(_) => {}
            Lambda::CConst(_, m) => m.collect_free(bound, out),
            Lambda::Abs(p, _, m) => {
                let vars = p.vars();
                let n = vars.len();
                bound.extend(vars);
                m.collect_free(bound, out);
                bound.truncate(bound.len() - n);
            }
            Lambda::App(m, n) | Lambda::Choice(m, n) | Lambda::Assign(_, m, n) => {
                m.collect_free(bound, out);
                n.collect_free(bound, out);
            }
            Lambda::Tuple(ms) => ms.iter().for_each(|m| m.collect_free(bound, out)),
        }
    }

    /// `{v/x}M` for a closed `v`.
    pub fn subst_closed(&self, x: &VarName, v: &Lambda) -> Lambda {
        match self {
            Lambda::Var(y) if y == x => v.clone(),
            Lambda::Var(_) | Lambda::VConst(_) | Lambda::Read(_) => self.clone(),
            Lambda::CConst(c, m) => Lambda::CConst(c.clone(), Arc::new(m.subst_closed(x, v))),
            Lambda::Abs(p, t, m) => {
                if p.vars().contains(x) {
                    self.clone()
                } else {
                    Lambda::Abs(p.clone(), t.clone(), Arc::new(m.subst_closed(x, v)))
                }
            }
            Lambda::App(m, n) => Lambda::app(m.subst_closed(x, v), n.subst_closed(x, v)),
            Lambda::Choice(m, n) => Lambda::Choice(Arc::new(m.subst_closed(x, v)), Arc::new(n.subst_closed(x, v))),
            Lambda::Assign(c, n, m) => Lambda::Assign(
                c.clone(),
                Arc::new(n.subst_closed(x, v)),
                Arc::new(m.subst_closed(x, v)),
            ),
            Lambda::Tuple(ms) => Lambda::Tuple(ms.iter().map(|m| m.subst_closed(x, v)).collect()),
        }
    }
}

/// Equality up to renaming of bound variables. Annotations must agree.
pub fn alpha_eq(m: &Lambda, n: &Lambda) -> bool {
    Alpha::default().eq(m, n)
}

#[derive(Default)]
struct Alpha {
    left: HashMap<VarName, Vec<usize>>,
    right: HashMap<VarName, Vec<usize>>,
    next: usize,
}

impl Alpha {
    fn eq(&mut self, m: &Lambda, n: &Lambda) -> bool {
        match (m, n) {
            (Lambda::Var(x), Lambda::Var(y)) => {
                match (
                    self.left.get(x).and_then(|s| s.last()),
                    self.right.get(y).and_then(|s| s.last()),
                ) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Lambda::VConst(a), Lambda::VConst(b)) => a == b,
            (Lambda::Read(a), Lambda::Read(b)) => a == b,
            (Lambda::CConst(a, m), Lambda::CConst(b, n)) => a == b && self.eq(m, n),
            (Lambda::App(m1, m2), Lambda::App(n1, n2)) | (Lambda::Choice(m1, m2), Lambda::Choice(n1, n2)) => {
                self.eq(m1, n1) && self.eq(m2, n2)
            }
            (Lambda::Assign(a, m1, m2), Lambda::Assign(b, n1, n2)) => a == b && self.eq(m1, n1) && self.eq(m2, n2),
            (Lambda::Tuple(ms), Lambda::Tuple(ns)) => {
                ms.len() == ns.len() && ms.iter().zip(ns).all(|(m, n)| self.eq(m, n))
            }
            (Lambda::Abs(p, s, m), Lambda::Abs(q, t, n)) => {
                if s != t || !same_shape(p, q) {
                    return false;
                }
                let (xs, ys) = (p.vars(), q.vars());
                for (x, y) in xs.iter().zip(&ys) {
                    self.left.entry(x.clone()).or_default().push(self.next);
                    self.right.entry(y.clone()).or_default().push(self.next);
                    self.next += 1;
                }
                let out = self.eq(m, n);
                for (x, y) in xs.iter().zip(&ys) {
                    self.left.get_mut(x).map(Vec::pop);
                    self.right.get_mut(y).map(Vec::pop);
                }
                out
            }
            _ => false,
        }
    }
}

fn same_shape(p: &Pattern, q: &Pattern) -> bool {
    match (p, q) {
        (Pattern::Var(_), Pattern::Var(_)) => true,
        (Pattern::Tuple(ps), Pattern::Tuple(qs)) => {
            ps.len() == qs.len() && ps.iter().zip(qs).all(|(p, q)| same_shape(p, q))
        }
        _ => false,
    }
}

/// Base types, typed constants and the types of memory cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LSignature {
    pub bases: BTreeSet<Symbol>,
    pub values: BTreeMap<Symbol, LType>,
    /// Computation constants `c : A -> B`, applied as `c@M`.
    pub computations: BTreeMap<Symbol, (LType, LType)>,
    pub cells: BTreeMap<Location, LType>,
}

impl LSignature {
    pub fn new() -> LSignature {
        LSignature::default()
    }

    pub fn with_base(mut self, name: &str) -> LSignature {
        self.bases.insert(Symbol::new(name));
        self
    }

    pub fn with_value(mut self, name: &str, ty: LType) -> LSignature {
        self.values.insert(Symbol::new(name), ty);
        self
    }

    pub fn with_computation(mut self, name: &str, dom: LType, cod: LType) -> LSignature {
        self.computations.insert(Symbol::new(name), (dom, cod));
        self
    }

    pub fn with_cell(mut self, loc: &str, ty: LType) -> LSignature {
        self.cells.insert(Location::new(loc), ty);
        self
    }

    pub fn value(&self, v: &Symbol) -> Result<&LType, TranslateError> {
        self.values
            .get(v)
            .ok_or_else(|| TranslateError::IllTyped(format!("unknown value constant {v}")))
    }

    pub fn computation(&self, c: &Symbol) -> Result<&(LType, LType), TranslateError> {
        self.computations
            .get(c)
            .ok_or_else(|| TranslateError::IllTyped(format!("unknown computation constant {c}")))
    }

    pub fn cell(&self, c: &Location) -> Result<&LType, TranslateError> {
        self.cells
            .get(c)
            .ok_or_else(|| TranslateError::IllTyped(format!("undeclared cell {c}")))
    }
}

/// A typing context, most recently bound variable first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LContext(pub Vec<(VarName, LType)>);

impl LContext {
    pub fn new() -> LContext {
        LContext::default()
    }

    /// Add `x : ty` at the right end (the oldest position).
    pub fn with(mut self, x: &str, ty: LType) -> LContext {
        self.0.push((VarName::new(x), ty));
        self
    }

    pub fn lookup(&self, x: &VarName) -> Option<&LType> {
        self.0.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    /// `vars, Π`: the new bindings come first.
    pub fn extend(&self, vars: Vec<(VarName, LType)>) -> LContext {
        let mut out = vars;
        out.extend(self.0.iter().cloned());
        LContext(out)
    }
}

impl fmt::Display for LContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(x, t)| format!("{x}:{t}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// The type of `m`. Every abstraction must be annotated.
pub fn infer(sig: &LSignature, ctx: &LContext, m: &Lambda) -> Result<LType, TranslateError> {
    let mismatch = |what: &str, expected: &LType, found: &LType| {
        TranslateError::IllTyped(format!("{what}: expected {expected}, found {found}"))
    };
    match m {
        Lambda::Var(x) => ctx
            .lookup(x)
            .cloned()
            .ok_or_else(|| TranslateError::IllTyped(format!("unbound variable {x}"))),
        Lambda::VConst(v) => sig.value(v).cloned(),
        Lambda::CConst(c, n) => {
            let (dom, cod) = sig.computation(c)?;
            let t = infer(sig, ctx, n)?;
            if &t != dom {
                return Err(mismatch(&format!("argument of {c}"), dom, &t));
            }
            Ok(cod.clone())
        }
        Lambda::App(f, n) => match infer(sig, ctx, f)? {
            LType::Arrow(a, b) => {
                let t = infer(sig, ctx, n)?;
                if t != *a {
                    return Err(mismatch(&format!("argument in {m}"), &a, &t));
                }
                Ok((*b).clone())
            }
            other => Err(TranslateError::IllTyped(format!(
                "{f} has type {other}, not a function type"
            ))),
        },
        Lambda::Abs(p, ann, body) => {
            let a = ann
                .as_ref()
                .ok_or_else(|| TranslateError::IllTyped(format!("binder {p} needs a type annotation")))?;
            if !p.is_linear() {
                return Err(TranslateError::IllTyped(format!("pattern {p} is not linear")));
            }
            let b = infer(sig, &ctx.extend(p.bind(a)?), body)?;
            Ok(LType::arrow(a.clone(), b))
        }
        Lambda::Tuple(ms) => Ok(LType::prod(
            ms.iter().map(|n| infer(sig, ctx, n)).collect::<Result<_, _>>()?,
        )),
        Lambda::Choice(l, r) => {
            let (a, b) = (infer(sig, ctx, l)?, infer(sig, ctx, r)?);
            if a != b {
                return Err(mismatch("branches of a choice", &a, &b));
            }
            Ok(a)
        }
        Lambda::Assign(c, n, k) => {
            let cell = sig.cell(c)?;
            let t = infer(sig, ctx, n)?;
            if &t != cell {
                return Err(mismatch(&format!("value assigned to {c}"), cell, &t));
            }
            infer(sig, ctx, k)
        }
        Lambda::Read(c) => sig.cell(c).cloned(),
    }
}

impl fmt::Display for LType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &LType, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                LType::Base(b) => write!(f, "{b}"),
                LType::Prod(ts) if ts.is_empty() => f.write_str("1"),
                LType::Prod(ts) => {
                    if level > 1 {
                        f.write_str("(")?;
                    }
                    for (i, t) in ts.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" * ")?;
                        }
                        go(t, 2, f)?;
                    }
                    if level > 1 {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                LType::Arrow(a, b) => {
                    if level > 0 {
                        f.write_str("(")?;
                    }
                    go(a, 1, f)?;
                    f.write_str(" -> ")?;
                    go(b, 0, f)?;
                    if level > 0 {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(x) => write!(f, "{x}"),
            Pattern::Tuple(ps) => {
                let parts: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

impl fmt::Display for Lambda {
    /// Levels: 0 any term, 1 a choice operand, 2 a function, 3 an atom.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(m: &Lambda, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let open = |f: &mut fmt::Formatter<'_>, need: u8| if level > need { f.write_str("(") } else { Ok(()) };
            let close = |f: &mut fmt::Formatter<'_>, need: u8| if level > need { f.write_str(")") } else { Ok(()) };
            match m {
                Lambda::Var(x) => write!(f, "{x}"),
                Lambda::VConst(v) => write!(f, "#{v}"),
                Lambda::Read(c) => write!(f, "!{c}"),
                Lambda::CConst(c, n) => {
                    write!(f, "{c}@")?;
                    go(n, 3, f)
                }
                Lambda::Tuple(ms) => {
                    f.write_str("(")?;
                    for (i, n) in ms.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        go(n, 0, f)?;
                    }
                    f.write_str(")")
                }
                Lambda::App(g, n) => {
                    open(f, 2)?;
                    go(g, 2, f)?;
                    f.write_str(" ")?;
                    go(n, 3, f)?;
                    close(f, 2)
                }
                Lambda::Choice(l, r) => {
                    open(f, 1)?;
                    go(l, 1, f)?;
                    f.write_str(" <+> ")?;
                    go(r, 2, f)?;
                    close(f, 1)
                }
                Lambda::Abs(p, t, body) => {
                    open(f, 0)?;
                    write!(f, "\\{p}")?;
                    if let Some(t) = t {
                        write!(f, ":{t}")?;
                    }
                    f.write_str(". ")?;
                    go(body, 0, f)?;
                    close(f, 0)
                }
                Lambda::Assign(c, n, k) => {
                    open(f, 0)?;
                    write!(f, "{c} := ")?;
                    go(n, 1, f)?;
                    f.write_str("; ")?;
                    go(k, 0, f)?;
                    close(f, 0)
                }
            }
        }
        go(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> LType {
        LType::base("o")
    }

    #[test]
    fn types_print_with_minimal_parentheses() {
        let t = LType::arrow(LType::arrow(o(), o()), LType::Prod(vec![o(), LType::arrow(o(), o())]));
        assert_eq!(t.to_string(), "(o -> o) -> o * (o -> o)");
        assert_eq!(LType::unit().to_string(), "1");
        assert_eq!(LType::prod(vec![o()]), o());
    }

    #[test]
    fn alpha_equivalence_respects_binding() {
        let id = |x: &str| Lambda::abs(Pattern::var(x), Some(o()), Lambda::var(x));
        assert!(alpha_eq(&id("x"), &id("y")));
        let k = |x: &str, y: &str| {
            Lambda::abs(
                Pattern::var(x),
                Some(o()),
                Lambda::abs(Pattern::var(y), Some(o()), Lambda::var(x)),
            )
        };
        assert!(alpha_eq(&k("x", "y"), &k("a", "b")));
        assert!(!alpha_eq(&k("x", "y"), &k("x", "x")));
        assert!(!alpha_eq(&Lambda::var("x"), &Lambda::var("y")));
    }

    #[test]
    fn typing_with_patterns() {
        let sig = LSignature::new().with_base("o").with_value("c", o());
        let swap = Lambda::abs(
            Pattern::Tuple(vec![Pattern::var("x"), Pattern::var("y")]),
            Some(LType::Prod(vec![o(), LType::arrow(o(), o())])),
            Lambda::Tuple(vec![Lambda::var("y"), Lambda::var("x")]),
        );
        let t = infer(&sig, &LContext::new(), &swap).unwrap();
        assert_eq!(t.to_string(), "o * (o -> o) -> (o -> o) * o");
        let bad = Lambda::app(Lambda::constant("c"), Lambda::constant("c"));
        assert!(infer(&sig, &LContext::new(), &bad).is_err());
        let nonlinear = Lambda::abs(
            Pattern::Tuple(vec![Pattern::var("x"), Pattern::var("x")]),
            Some(LType::Prod(vec![o(), o()])),
            Lambda::var("x"),
        );
        assert!(infer(&sig, &LContext::new(), &nonlinear).is_err());
    }

    #[test]
    fn the_newest_binding_shadows() {
        let ctx = LContext::new().with("x", o());
        let inner = ctx.extend(vec![(VarName::new("x"), LType::arrow(o(), o()))]);
        assert_eq!(inner.lookup(&VarName::new("x")), Some(&LType::arrow(o(), o())));
    }
}
