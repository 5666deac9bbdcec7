//! Type synthesis by symbolic execution of the stacks.
//!
//! Each location holds a stack of (possibly unknown) types. Popping an empty
//! stack records a demand on the input. A thunk gets a flexible type: any
//! expansion of the minimal type of its body, fixed once it meets a concrete
//! function type.

use std::collections::BTreeMap;
use std::rc::Rc;

use fmc_term::{occurs_free, Computation, Location, MemoryType, Symbol, Value, ValueType, VarName};

use crate::{CompDerivation, CompType, Context, Mode, Signature, TypeError, ValueDerivation};

#[derive(Clone, Debug)]
enum Ty {
    Base(Symbol),
    Arrow(Rc<Mem>, Rc<Mem>),
    Meta(usize),
}

/// Per-location stacks, bottom first. Missing locations are empty.
type Mem = BTreeMap<Location, Vec<Ty>>;

#[derive(Clone, Debug)]
enum MetaState {
    Unbound,
    Flex(Rc<Mem>, Rc<Mem>),
    Bound(Ty),
}

enum Raw {
    Id,
    Push(RawValue, Location, Box<Raw>),
    Pop(Location, VarName, Ty, Box<Raw>),
    Force(RawValue, Mem, Mem, Box<Raw>),
    Const(Symbol, Mem, Mem, Box<Raw>),
}

enum RawValue {
    Var(VarName, Ty),
    Const(Symbol, Ty),
    Thunk(Ty, Box<Raw>),
}

enum Step {
    Push(RawValue, Location),
    Pop(Location, VarName, Ty),
    Force(RawValue, Mem, Mem),
    Const(Symbol, Mem, Mem),
}

pub(crate) struct Checker<'a> {
    sig: &'a Signature,
    ctx: &'a Context,
    mode: Mode,
    metas: Vec<MetaState>,
    names: BTreeMap<usize, usize>,
}

fn stack_of<'m>(m: &'m Mem, loc: &Location) -> &'m [Ty] {
    m.get(loc).map(|v| v.as_slice()).unwrap_or(&[])
}

impl<'a> Checker<'a> {
    pub(crate) fn new(sig: &'a Signature, ctx: &'a Context, mode: Mode) -> Checker<'a> {
        Checker {
            sig,
            ctx,
            mode,
            metas: Vec::new(),
            names: BTreeMap::new(),
        }
    }

    pub(crate) fn check(
        &mut self,
        term: &Computation,
        against: Option<&CompType>,
    ) -> Result<CompDerivation, TypeError> {
        for (_, t) in &self.ctx.0 {
            self.sig.check_type(t)?;
        }
        match against {
            Some(t) => {
                // Run the term on the given input so that pops see concrete types.
                let given = self.lift_memory(&t.input);
                let (demand, out, raw) = self.synth_spine(term, &mut Vec::new(), given)?;
                if let Some((loc, d)) = demand.into_iter().find(|(_, d)| !d.is_empty()) {
                    let provided = t.input.stack(&loc).len();
                    return Err(TypeError::LocationArityMismatch {
                        loc,
                        needed: provided + d.len(),
                        provided,
                    });
                }
                let expected = self.lift_memory(&t.output);
                self.unify_mem(&expected, &out)?;
                self.build(&raw, t.input.clone(), &t.output)
            }
            None => {
                let (input, output, raw) = self.synth(term, &mut Vec::new())?;
                let (i, o) = (self.zonk_mem(&input), self.zonk_mem(&output));
                self.build(&raw, i, &o)
            }
        }
    }

    pub(crate) fn check_value(&mut self, v: &Value, against: Option<&ValueType>) -> Result<ValueDerivation, TypeError> {
        for (_, t) in &self.ctx.0 {
            self.sig.check_type(t)?;
        }
        let (t, raw) = self.synth_value(v, &mut Vec::new())?;
        if let Some(a) = against {
            let a = self.lift_value_type(a);
            self.unify(&a, &t)?;
        }
        self.build_value(&raw)
    }

    // ---- conversion -------------------------------------------------------

    fn lift_value_type(&self, t: &ValueType) -> Ty {
        match t {
            ValueType::Base(b) => Ty::Base(b.clone()),
            ValueType::Arrow(i, o) => Ty::Arrow(Rc::new(self.lift_memory(i)), Rc::new(self.lift_memory(o))),
        }
    }

    fn lift_memory(&self, m: &MemoryType) -> Mem {
        m.iter()
            .map(|(l, s)| (l.clone(), s.0.iter().map(|t| self.lift_value_type(t)).collect()))
            .collect()
    }

    fn fresh(&mut self) -> Ty {
        self.metas.push(MetaState::Unbound);
        Ty::Meta(self.metas.len() - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        loop {
            match &t {
                Ty::Meta(i) => match &self.metas[*i] {
                    MetaState::Bound(u) => t = u.clone(),
                    _ => return t,
                },
                _ => return t,
            }
        }
    }

    fn zonk(&mut self, t: &Ty) -> ValueType {
        match self.resolve(t) {
            Ty::Base(b) => ValueType::Base(b),
            Ty::Arrow(i, o) => ValueType::arrow(self.zonk_mem(&i), self.zonk_mem(&o)),
            Ty::Meta(i) => match self.metas[i].clone() {
                MetaState::Flex(r, s) => ValueType::arrow(self.zonk_mem(&r), self.zonk_mem(&s)),
                _ => {
                    let next = self.names.len();
                    let k = *self.names.entry(i).or_insert(next);
                    ValueType::base(&format!("_{k}"))
                }
            },
        }
    }

    fn zonk_mem(&mut self, m: &Mem) -> MemoryType {
        let stacks: Vec<(Location, Vec<ValueType>)> = m
            .iter()
            .map(|(l, s)| (l.clone(), s.iter().map(|t| self.zonk(t)).collect()))
            .collect();
        MemoryType::from_stacks(stacks)
    }

    fn show(&mut self, t: &Ty) -> String {
        self.zonk(t).to_string()
    }

    // ---- unification ------------------------------------------------------

    fn occurs(&self, i: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Base(_) => false,
            Ty::Arrow(a, b) => self.occurs_mem(i, &a) || self.occurs_mem(i, &b),
            Ty::Meta(j) => {
                if i == j {
                    return true;
                }
                match &self.metas[j] {
                    MetaState::Flex(r, s) => self.occurs_mem(i, r) || self.occurs_mem(i, s),
                    _ => false,
                }
            }
        }
    }

    fn occurs_mem(&self, i: usize, m: &Mem) -> bool {
        m.values().flatten().any(|t| self.occurs(i, t))
    }

    fn mismatch(&mut self, expected: &Ty, found: &Ty) -> TypeError {
        TypeError::AnnotationMismatch {
            expected: self.show(expected),
            found: self.show(found),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), TypeError> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (Ty::Meta(i), Ty::Meta(j)) if i == j => Ok(()),
            (Ty::Meta(i), _) if matches!(self.metas[*i], MetaState::Unbound) => self.bind(*i, &b, &a),
            (_, Ty::Meta(j)) if matches!(self.metas[*j], MetaState::Unbound) => self.bind(*j, &a, &b),
            (Ty::Meta(i), Ty::Meta(j)) => {
                let (r1, s1) = self.flex(*i);
                let (r2, s2) = self.flex(*j);
                let (r, s) = self.merge(&r1, &s1, &r2, &s2)?;
                self.metas[*i] = MetaState::Flex(Rc::new(r), Rc::new(s));
                self.metas[*j] = MetaState::Bound(Ty::Meta(*i));
                Ok(())
            }
            (Ty::Meta(i), Ty::Arrow(inp, out)) | (Ty::Arrow(inp, out), Ty::Meta(i)) => {
                let (r, s) = self.flex(*i);
                let concrete = Ty::Arrow(inp.clone(), out.clone());
                if self.occurs(*i, &concrete) {
                    return Err(self.mismatch(&a, &b));
                }
                self.expansion(&r, &s, inp, out)?;
                self.metas[*i] = MetaState::Bound(concrete);
                Ok(())
            }
            (Ty::Base(x), Ty::Base(y)) if x == y => Ok(()),
            (Ty::Arrow(i1, o1), Ty::Arrow(i2, o2)) => {
                self.unify_mem(i1, i2)?;
                self.unify_mem(o1, o2)
            }
            _ => Err(self.mismatch(&a, &b)),
        }
    }

    fn bind(&mut self, i: usize, t: &Ty, meta: &Ty) -> Result<(), TypeError> {
        if self.occurs(i, t) {
            return Err(self.mismatch(meta, t));
        }
        self.metas[i] = MetaState::Bound(t.clone());
        Ok(())
    }

    fn flex(&self, i: usize) -> (Mem, Mem) {
        match &self.metas[i] {
            MetaState::Flex(r, s) => ((**r).clone(), (**s).clone()),
            other => panic!("metavariable {i} is not flexible: {other:?}"),
        }
    }

    fn unify_mem(&mut self, a: &Mem, b: &Mem) -> Result<(), TypeError> {
        let locs: Vec<Location> = a.keys().chain(b.keys()).cloned().collect();
        for loc in locs {
            let sa = stack_of(a, &loc).to_vec();
            let sb = stack_of(b, &loc).to_vec();
            if sa.len() != sb.len() {
                return Err(TypeError::AnnotationMismatch {
                    expected: format!("{} item(s) on {}", sa.len(), loc),
                    found: format!("{} item(s)", sb.len()),
                });
            }
            for (x, y) in sa.iter().zip(&sb) {
                self.unify(x, y)?;
            }
        }
        Ok(())
    }

    /// `outer` must be an expansion of `inner`: the same extra items at the
    /// bottom of input and output, on every location.
    fn expansion(&mut self, inner_in: &Mem, inner_out: &Mem, outer_in: &Mem, outer_out: &Mem) -> Result<(), TypeError> {
        let mut locs: Vec<Location> = inner_in
            .keys()
            .chain(inner_out.keys())
            .chain(outer_in.keys())
            .chain(outer_out.keys())
            .cloned()
            .collect();
        locs.sort();
        locs.dedup();
        for loc in locs {
            let r = stack_of(inner_in, &loc).to_vec();
            let s = stack_of(inner_out, &loc).to_vec();
            let i = stack_of(outer_in, &loc).to_vec();
            let o = stack_of(outer_out, &loc).to_vec();
            if i.len() < r.len() {
                return Err(TypeError::LocationArityMismatch {
                    loc,
                    needed: r.len(),
                    provided: i.len(),
                });
            }
            let k = i.len() - r.len();
            if o.len() != s.len() + k {
                return Err(TypeError::AnnotationMismatch {
                    expected: format!("{} output item(s) on {}", o.len(), loc),
                    found: format!("{} output item(s) after {} passed through", s.len() + k, k),
                });
            }
            for n in 0..k {
                self.unify(&i[n], &o[n])?;
            }
            for (x, y) in i[k..].iter().zip(&r) {
                self.unify(x, y)?;
            }
            for (x, y) in o[k..].iter().zip(&s) {
                self.unify(x, y)?;
            }
        }
        Ok(())
    }

    /// Least common expansion of two flexible types.
    fn merge(&mut self, r1: &Mem, s1: &Mem, r2: &Mem, s2: &Mem) -> Result<(Mem, Mem), TypeError> {
        let mut locs: Vec<Location> = r1
            .keys()
            .chain(s1.keys())
            .chain(r2.keys())
            .chain(s2.keys())
            .cloned()
            .collect();
        locs.sort();
        locs.dedup();
        let mut r = Mem::new();
        let mut s = Mem::new();
        for loc in locs {
            let (a_in, a_out, b_in, b_out) = {
                let x = (stack_of(r1, &loc).to_vec(), stack_of(s1, &loc).to_vec());
                let y = (stack_of(r2, &loc).to_vec(), stack_of(s2, &loc).to_vec());
                if x.0.len() >= y.0.len() {
                    (x.0, x.1, y.0, y.1)
                } else {
                    (y.0, y.1, x.0, x.1)
                }
            };
            let single = |v: Vec<Ty>| Mem::from([(loc.clone(), v)]);
            self.expansion(
                &single(b_in),
                &single(b_out),
                &single(a_in.clone()),
                &single(a_out.clone()),
            )?;
            r.insert(loc.clone(), a_in);
            s.insert(loc.clone(), a_out);
        }
        Ok((r, s))
    }

    // ---- synthesis --------------------------------------------------------

    fn synth(&mut self, m: &Computation, env: &mut Vec<(VarName, Ty)>) -> Result<(Mem, Mem, Raw), TypeError> {
        let mark = env.len();
        let result = self.synth_spine(m, env, Mem::new());
        env.truncate(mark);
        result
    }

    fn synth_spine(
        &mut self,
        m: &Computation,
        env: &mut Vec<(VarName, Ty)>,
        mut stacks: Mem,
    ) -> Result<(Mem, Mem, Raw), TypeError> {
        let mut demands: BTreeMap<Location, Vec<Ty>> = BTreeMap::new();
        let mut steps = Vec::new();
        let mut cur = m;
        loop {
            match cur {
                Computation::Star => break,
                Computation::Push(v, a, k) => {
                    let (t, rv) = self.synth_value(v, env)?;
                    stacks.entry(a.clone()).or_default().push(t);
                    steps.push(Step::Push(rv, a.clone()));
                    cur = k;
                }
                Computation::Pop(a, b, k) => {
                    let t = self.pop(&mut stacks, &mut demands, a);
                    let ty = match &b.ann {
                        Some(ann) => {
                            self.sig.check_type(ann)?;
                            let at = self.lift_value_type(ann);
                            self.unify(&at, &t)?;
                            at
                        }
                        None => {
                            if self.mode == Mode::Annotated && occurs_free(&b.var, k) {
                                return Err(TypeError::MissingAnnotation(b.var.clone()));
                            }
                            t
                        }
                    };
                    env.push((b.var.clone(), ty.clone()));
                    steps.push(Step::Pop(a.clone(), b.var.clone(), ty));
                    cur = k;
                }
                Computation::Force(v, k) => {
                    let (t, rv) = self.synth_value(v, env)?;
                    let (r, s) = self.arrow_of(&t, v)?;
                    self.apply(&mut stacks, &mut demands, &r, &s)?;
                    steps.push(Step::Force(rv, r, s));
                    cur = k;
                }
                Computation::Const(c, k) => {
                    let ct = self
                        .sig
                        .computations
                        .get(c)
                        .cloned()
                        .ok_or_else(|| TypeError::ConstantUnknown(c.clone()))?;
                    let r = self.lift_memory(&ct.input);
                    let s = self.lift_memory(&ct.output);
                    self.apply(&mut stacks, &mut demands, &r, &s)?;
                    steps.push(Step::Const(c.clone(), r, s));
                    cur = k;
                }
            }
        }
        let input: Mem = demands
            .into_iter()
            .map(|(l, d)| (l, d.into_iter().rev().collect()))
            .collect();
        let raw = steps.into_iter().rev().fold(Raw::Id, |acc, step| match step {
            Step::Push(v, a) => Raw::Push(v, a, Box::new(acc)),
            Step::Pop(a, x, t) => Raw::Pop(a, x, t, Box::new(acc)),
            Step::Force(v, r, s) => Raw::Force(v, r, s, Box::new(acc)),
            Step::Const(c, r, s) => Raw::Const(c, r, s, Box::new(acc)),
        });
        Ok((input, stacks, raw))
    }

    fn pop(&mut self, stacks: &mut Mem, demands: &mut BTreeMap<Location, Vec<Ty>>, loc: &Location) -> Ty {
        if let Some(t) = stacks.get_mut(loc).and_then(|s| s.pop()) {
            return t;
        }
        let t = self.fresh();
        demands.entry(loc.clone()).or_default().push(t.clone());
        t
    }

    fn apply(
        &mut self,
        stacks: &mut Mem,
        demands: &mut BTreeMap<Location, Vec<Ty>>,
        r: &Mem,
        s: &Mem,
    ) -> Result<(), TypeError> {
        for (loc, items) in r {
            for item in items.iter().rev() {
                let got = self.pop(stacks, demands, loc);
                self.unify(item, &got)?;
            }
        }
        for (loc, items) in s {
            stacks.entry(loc.clone()).or_default().extend(items.iter().cloned());
        }
        Ok(())
    }

    fn arrow_of(&mut self, t: &Ty, v: &Value) -> Result<(Mem, Mem), TypeError> {
        match self.resolve(t) {
            Ty::Arrow(i, o) => Ok(((*i).clone(), (*o).clone())),
            Ty::Meta(i) => match &self.metas[i] {
                MetaState::Flex(r, s) => Ok(((**r).clone(), (**s).clone())),
                _ => Err(TypeError::UnresolvedForce(v.to_string())),
            },
            Ty::Base(b) => Err(TypeError::AnnotationMismatch {
                expected: "a function type".to_string(),
                found: b.to_string(),
            }),
        }
    }

    fn synth_value(&mut self, v: &Value, env: &mut Vec<(VarName, Ty)>) -> Result<(Ty, RawValue), TypeError> {
        match v {
            Value::Var(x) => {
                let t = match env.iter().rev().find(|(y, _)| y == x) {
                    Some((_, t)) => t.clone(),
                    None => match self.ctx.lookup(x) {
                        Some(t) => self.lift_value_type(t),
                        None => return Err(TypeError::UnboundVariable(x.clone())),
                    },
                };
                Ok((t.clone(), RawValue::Var(x.clone(), t)))
            }
            Value::Const(c) => {
                let t = self
                    .sig
                    .values
                    .get(c)
                    .map(|t| self.lift_value_type(t))
                    .ok_or_else(|| TypeError::ConstantUnknown(c.clone()))?;
                Ok((t.clone(), RawValue::Const(c.clone(), t)))
            }
            Value::Thunk(n) => {
                let (i, o, raw) = self.synth(n, env)?;
                self.metas.push(MetaState::Flex(Rc::new(i), Rc::new(o)));
                let t = Ty::Meta(self.metas.len() - 1);
                Ok((t.clone(), RawValue::Thunk(t, Box::new(raw))))
            }
        }
    }

    // ---- derivations ------------------------------------------------------

    fn build(&mut self, raw: &Raw, input: MemoryType, output: &MemoryType) -> Result<CompDerivation, TypeError> {
        let ty = CompType::new(input.clone(), output.clone());
        let mut mem = input;
        Ok(match raw {
            Raw::Id => {
                if &mem != output {
                    return Err(TypeError::DerivationMismatch(format!(
                        "final memory {mem} differs from the output {output}"
                    )));
                }
                CompDerivation::Id { ty }
            }
            Raw::Push(v, loc, k) => {
                let value = self.build_value(v)?;
                mem.push(loc, value.ty().clone());
                CompDerivation::Push {
                    ty,
                    value,
                    loc: loc.clone(),
                    then: Box::new(self.build(k, mem, output)?),
                }
            }
            Raw::Pop(loc, x, t, k) => {
                let var_ty = self.zonk(t);
                match mem.pop(loc) {
                    Some(top) if top == var_ty => {}
                    other => {
                        return Err(TypeError::DerivationMismatch(format!(
                            "pop of {x} on {loc} finds {other:?}, expected {var_ty}"
                        )))
                    }
                }
                CompDerivation::Pop {
                    ty,
                    loc: loc.clone(),
                    var: x.clone(),
                    var_ty,
                    then: Box::new(self.build(k, mem, output)?),
                }
            }
            Raw::Force(v, r, s, k) => {
                let value = self.build_value(v)?;
                let instance = CompType::new(self.zonk_mem(r), self.zonk_mem(s));
                mem = transform(mem, &instance)?;
                CompDerivation::Force {
                    ty,
                    value,
                    instance,
                    then: Box::new(self.build(k, mem, output)?),
                }
            }
            Raw::Const(c, r, s, k) => {
                let instance = CompType::new(self.zonk_mem(r), self.zonk_mem(s));
                mem = transform(mem, &instance)?;
                CompDerivation::Const {
                    ty,
                    sym: c.clone(),
                    instance,
                    then: Box::new(self.build(k, mem, output)?),
                }
            }
        })
    }

    fn build_value(&mut self, raw: &RawValue) -> Result<ValueDerivation, TypeError> {
        Ok(match raw {
            RawValue::Var(x, t) => ValueDerivation::Var {
                name: x.clone(),
                ty: self.zonk(t),
            },
            RawValue::Const(c, t) => ValueDerivation::Const {
                sym: c.clone(),
                ty: self.zonk(t),
            },
            RawValue::Thunk(t, body) => {
                let ty = self.zonk(t);
                let (i, o) = match &ty {
                    ValueType::Arrow(i, o) => ((**i).clone(), (**o).clone()),
                    other => return Err(TypeError::DerivationMismatch(format!("thunk typed {other}"))),
                };
                let body = self.build(body, i, &o)?;
                ValueDerivation::Thunk {
                    ty,
                    body: Box::new(body),
                }
            }
        })
    }
}

/// Take the instance input off the top of `mem` and push its output.
pub(crate) fn transform(mut mem: MemoryType, instance: &CompType) -> Result<MemoryType, TypeError> {
    for (loc, items) in instance.input.iter() {
        for expected in items.0.iter().rev() {
            match mem.pop(loc) {
                Some(t) if &t == expected => {}
                other => {
                    return Err(TypeError::DerivationMismatch(format!(
                        "instance input {expected} on {loc}, memory has {other:?}"
                    )))
                }
            }
        }
    }
    Ok(mem.concat(&instance.output))
}
