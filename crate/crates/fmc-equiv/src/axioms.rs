use std::collections::BTreeMap;
use std::fmt;

use fmc_gen::{Gen, GenConfig};
use fmc_term::{
    free_vars_value, max_index, occurs_free, sequence, substitute, vector_pop, vector_push, Binder, Computation,
    Location, MemoryType, NameSupply, Value, ValueType, VarName,
};
use fmc_types::{check, CompType, Context, Signature};

use crate::EquivError;

/// The generating laws of the equational theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Id,
    LocalBeta,
    Force,
    Thunk,
    Eta,
    Diagonal,
    Terminal,
    Interchange,
    Relocation,
    Permutation,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::Id,
        Axiom::LocalBeta,
        Axiom::Force,
        Axiom::Thunk,
        Axiom::Eta,
        Axiom::Diagonal,
        Axiom::Terminal,
        Axiom::Interchange,
        Axiom::Relocation,
        Axiom::Permutation,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Axiom::Id => "id",
            Axiom::LocalBeta => "local-beta",
            Axiom::Force => "force",
            Axiom::Thunk => "thunk",
            Axiom::Eta => "eta",
            Axiom::Diagonal => "diagonal",
            Axiom::Terminal => "terminal",
            Axiom::Interchange => "interchange",
            Axiom::Relocation => "relocation",
            Axiom::Permutation => "permutation",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Axiom {
    type Err = String;

    fn from_str(s: &str) -> Result<Axiom, String> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| format!("unknown axiom `{s}`"))
    }
}

/// Parameters of an axiom instance. Which are needed depends on the law:
///
/// ```text
/// id            <?x_A>.[!x_A]            = *                 memory s_A
/// local-beta    [V]a.a<f>.?f             = ?V                value, a
/// force         ?!M                      = M                 comp
/// thunk         [!?V]a                   = [V]a              value, a
/// eta           S;<?x_A>.[![!x_A].N]a    = [!S;N]a           producer, comp, a
/// diagonal      S;<?x_A>.[!x_A].[!x_A]   = S;S               producer
/// terminal      S;<?x_A>                 = *                 producer
/// interchange   S;<?x_A>.(P;[!x_A])      = P;S               producer, other
/// relocation    [V]a.a<y>.[y]b           = [V]b              value, a, b
/// permutation   [V]b.a<x>.M              = a<x>.[V]b.M       value, var, comp, a, b
/// ```
///
/// Closed terms come with their types; for permutation, `comp` may use
/// `var` free and its input has the pushed `V` on top of `b`.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub memory: Option<MemoryType>,
    pub value: Option<(Value, ValueType)>,
    pub comp: Option<(Computation, CompType)>,
    pub producer: Option<(Computation, MemoryType)>,
    pub other: Option<(Computation, CompType)>,
    pub var: Option<(VarName, ValueType)>,
    pub a: Option<Location>,
    pub b: Option<Location>,
}

/// Both sides of one law at a type.
#[derive(Clone, Debug)]
pub struct AxiomInstance {
    pub axiom: Axiom,
    pub params: Params,
    pub ty: CompType,
    pub lhs: Computation,
    pub rhs: Computation,
}

impl fmt::Display for AxiomInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} = {} : {}", self.axiom, self.lhs, self.rhs, self.ty)
    }
}

fn need<T: Clone>(p: &Option<T>, name: &'static str) -> Result<T, EquivError> {
    p.clone().ok_or(EquivError::MissingParameter(name))
}

fn arrow(t: &ValueType) -> Result<CompType, EquivError> {
    match t {
        ValueType::Arrow(i, o) => Ok(CompType::new((**i).clone(), (**o).clone())),
        ValueType::Base(b) => Err(EquivError::SideConditionViolated(format!(
            "value of base type {b} where a computation type is needed"
        ))),
    }
}

/// Binders for every slot of `t`, bottom first, and the matching values.
fn vector(
    t: &MemoryType,
    supply: &mut NameSupply,
) -> (BTreeMap<Location, Vec<Binder>>, BTreeMap<Location, Vec<Value>>) {
    let mut binders = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (l, s) in t.iter() {
        let xs: Vec<Binder> =
            s.0.iter()
                .map(|u| Binder::annotated(supply.fresh("x"), u.clone()))
                .collect();
        values.insert(l.clone(), xs.iter().map(|b| Value::Var(b.var.clone())).collect());
        binders.insert(l.clone(), xs);
    }
    (binders, values)
}

/// `t` with the top of each stack given by `top` removed, if it is there.
fn strip_top(t: &MemoryType, top: &MemoryType) -> Option<MemoryType> {
    let mut out = t.clone();
    for (l, s) in top.iter() {
        let whole = t.stack(l);
        if !whole.ends_with(&s.0) {
            return None;
        }
        out.set(
            l.clone(),
            fmc_term::StackType::new(whole[..whole.len() - s.len()].to_vec()),
        );
    }
    Some(out)
}

fn distinct(a: &Location, b: &Location) -> Result<(), EquivError> {
    if a == b {
        return Err(EquivError::SideConditionViolated(format!(
            "locations must differ, both are {a}"
        )));
    }
    Ok(())
}

fn supply_for(terms: &[&Computation]) -> NameSupply {
    NameSupply::above(terms.iter().map(|t| max_index(t)).max().unwrap_or(0))
}

/// Build both sides of `axiom` from `params` and check them at the law's type.
pub fn instantiate_axiom(sig: &Signature, axiom: Axiom, params: Params) -> Result<AxiomInstance, EquivError> {
    let p = &params;
    let (lhs, rhs, ty) = match axiom {
        Axiom::Id => {
            let s = need(&p.memory, "memory")?;
            let (xs, vs) = vector(&s, &mut NameSupply::new());
            (
                vector_pop(&xs, vector_push(&vs, Computation::Star)),
                Computation::Star,
                CompType::identity(s),
            )
        }
        Axiom::LocalBeta => {
            let (v, t) = need(&p.value, "value")?;
            let a = need(&p.a, "a")?;
            let ty = arrow(&t)?;
            let vt = Computation::push_main(v.clone(), Computation::Star);
            let f = supply_for(&[&vt]).fresh("f");
            let body = Computation::force(Value::Var(f.clone()), Computation::Star);
            let lhs = Computation::push(
                v.clone(),
                a.clone(),
                Computation::Pop(a, Binder::annotated(f, t), body.into()),
            );
            (lhs, Computation::force(v, Computation::Star), ty)
        }
        Axiom::Force => {
            let (m, ty) = need(&p.comp, "comp")?;
            (Computation::force(Value::thunk(m.clone()), Computation::Star), m, ty)
        }
        Axiom::Thunk => {
            let (v, t) = need(&p.value, "value")?;
            let a = need(&p.a, "a")?;
            arrow(&t)?;
            let wrapped = Value::thunk(Computation::force(v.clone(), Computation::Star));
            let ty = CompType::new(MemoryType::empty(), MemoryType::singleton(a.clone(), vec![t]));
            (
                Computation::push(wrapped, a.clone(), Computation::Star),
                Computation::push(v, a, Computation::Star),
                ty,
            )
        }
        Axiom::Eta => {
            let (s, st) = need(&p.producer, "producer")?;
            let (n, nt) = need(&p.comp, "comp")?;
            let a = need(&p.a, "a")?;
            let rest = strip_top(&nt.input, &st)
                .ok_or_else(|| EquivError::SideConditionViolated(format!("input of {n} does not end with {st}")))?;
            let (xs, vs) = vector(&st, &mut supply_for(&[&s, &n]));
            let inner = Value::thunk(vector_push(&vs, n.clone()));
            let lhs = sequence(
                &s,
                &vector_pop(&xs, Computation::push(inner, a.clone(), Computation::Star)),
            );
            let rhs = Computation::push(Value::thunk(sequence(&s, &n)), a.clone(), Computation::Star);
            let t = ValueType::arrow(rest, nt.output.clone());
            (
                lhs,
                rhs,
                CompType::new(MemoryType::empty(), MemoryType::singleton(a, vec![t])),
            )
        }
        Axiom::Diagonal => {
            let (s, st) = need(&p.producer, "producer")?;
            let (xs, vs) = vector(&st, &mut supply_for(&[&s]));
            let lhs = sequence(
                &s,
                &vector_pop(&xs, vector_push(&vs, vector_push(&vs, Computation::Star))),
            );
            (
                lhs,
                sequence(&s, &s),
                CompType::new(MemoryType::empty(), st.concat(&st)),
            )
        }
        Axiom::Terminal => {
            let (s, st) = need(&p.producer, "producer")?;
            let (xs, _) = vector(&st, &mut supply_for(&[&s]));
            (
                sequence(&s, &vector_pop(&xs, Computation::Star)),
                Computation::Star,
                CompType::default(),
            )
        }
        Axiom::Interchange => {
            let (s, st) = need(&p.producer, "producer")?;
            let (q, qt) = need(&p.other, "other")?;
            let (xs, vs) = vector(&st, &mut supply_for(&[&s, &q]));
            if xs.values().flatten().any(|x| occurs_free(&x.var, &q)) {
                return Err(EquivError::SideConditionViolated(
                    "a popped variable is free in P".into(),
                ));
            }
            let lhs = sequence(&s, &vector_pop(&xs, sequence(&q, &vector_push(&vs, Computation::Star))));
            (
                lhs,
                sequence(&q, &s),
                CompType::new(qt.input.clone(), qt.output.concat(&st)),
            )
        }
        Axiom::Relocation => {
            let (v, t) = need(&p.value, "value")?;
            let a = need(&p.a, "a")?;
            let b = need(&p.b, "b")?;
            distinct(&a, &b)?;
            let vt = Computation::push_main(v.clone(), Computation::Star);
            let y = supply_for(&[&vt]).fresh("y");
            let body = Computation::push(Value::Var(y.clone()), b.clone(), Computation::Star);
            let lhs = Computation::push(
                v.clone(),
                a.clone(),
                Computation::Pop(a, Binder::annotated(y, t.clone()), body.into()),
            );
            let ty = CompType::new(MemoryType::empty(), MemoryType::singleton(b.clone(), vec![t]));
            (lhs, Computation::push(v, b, Computation::Star), ty)
        }
        Axiom::Permutation => {
            let (v, vt) = need(&p.value, "value")?;
            let (x, r) = need(&p.var, "var")?;
            let (m, mt) = need(&p.comp, "comp")?;
            let a = need(&p.a, "a")?;
            let b = need(&p.b, "b")?;
            distinct(&a, &b)?;
            if free_vars_value(&v).contains(&x) {
                return Err(EquivError::SideConditionViolated(format!("{x} is free in {v}")));
            }
            let mut input = strip_top(&mt.input, &MemoryType::singleton(b.clone(), vec![vt])).ok_or_else(|| {
                EquivError::SideConditionViolated(format!("input of {m} has no pushed value on top of {b}"))
            })?;
            input.push(&a, r.clone());
            let binder = Binder::annotated(x, r);
            let lhs = Computation::push(
                v.clone(),
                b.clone(),
                Computation::Pop(a.clone(), binder.clone(), m.clone().into()),
            );
            let rhs = Computation::Pop(a, binder, Computation::push(v, b, m).into());
            (lhs, rhs, CompType::new(input, mt.output.clone()))
        }
    };
    for (side, t) in [("lhs", &lhs), ("rhs", &rhs)] {
        check(sig, &Context::new(), t, &ty).map_err(|error| EquivError::IllTyped {
            side: format!("{axiom} {side} {t}"),
            error,
        })?;
    }
    Ok(AxiomInstance {
        axiom,
        params,
        ty,
        lhs,
        rhs,
    })
}

/// The global beta law `[V]a.a<x>.M = {V/x}M`, which the theory derives.
pub fn derived_global_beta(v: &Value, a: &Location, x: &Binder, m: &Computation) -> (Computation, Computation) {
    let lhs = Computation::push(
        v.clone(),
        a.clone(),
        Computation::Pop(a.clone(), x.clone(), m.clone().into()),
    );
    (lhs, substitute(v, &x.var, m))
}

/// The signature used for generated instances: one base type `o` with
/// two constants, enough for machine equivalence to be non-degenerate.
pub fn theory_signature() -> Signature {
    Signature::new()
        .with_base("o")
        .with_value("c", ValueType::base("o"))
        .with_value("d", ValueType::base("o"))
}

fn theory_gen(seed: u64) -> Gen {
    let cfg = GenConfig {
        type_depth: 1,
        ..GenConfig::default().with_base("o", &["c", "d"])
    };
    Gen::new(seed, cfg)
}

/// `per_axiom` generated instances of every law over `theory_signature`.
pub fn generate_instances(seed: u64, per_axiom: usize) -> Vec<AxiomInstance> {
    let sig = theory_signature();
    let mut g = theory_gen(seed);
    let locs = g.config().locations.clone();
    let mut out = Vec::new();
    for axiom in Axiom::ALL {
        let mut made = 0;
        let mut attempts = 0;
        while made < per_axiom && attempts < per_axiom * 20 {
            attempts += 1;
            let params = random_params(&mut g, axiom, &locs);
            if let Ok(inst) = instantiate_axiom(&sig, axiom, params) {
                out.push(inst);
                made += 1;
            }
        }
    }
    out
}

fn random_params(g: &mut Gen, axiom: Axiom, locs: &[Location]) -> Params {
    let budget = 3;
    let a = g.location();
    let mut b = g.location();
    while b == a && locs.len() > 1 {
        b = g.location();
    }
    let mut p = Params {
        a: Some(a.clone()),
        b: Some(b.clone()),
        ..Params::default()
    };
    let arrow_value = |g: &mut Gen| loop {
        let t = g.value_type(2);
        if !t.is_base() {
            let v = g.value(&[], &t, budget);
            return (v, t);
        }
    };
    let producer = |g: &mut Gen| {
        let st = g.memory_type(1);
        let s = g.term(&[], &CompType::new(MemoryType::empty(), st.clone()), budget);
        (s, st)
    };
    let comp = |g: &mut Gen| {
        let ty = g.comp_type();
        (g.term(&[], &ty, budget), ty)
    };
    match axiom {
        Axiom::Id => p.memory = Some(g.memory_type(1)),
        Axiom::LocalBeta | Axiom::Thunk => p.value = Some(arrow_value(g)),
        Axiom::Force => p.comp = Some(comp(g)),
        Axiom::Eta => {
            let (s, st) = producer(g);
            let rest = g.memory_type(1);
            let out = g.memory_type(1);
            let nt = CompType::new(rest.concat(&st), out);
            p.comp = Some((g.term(&[], &nt, budget), nt));
            p.producer = Some((s, st));
        }
        Axiom::Diagonal | Axiom::Terminal => p.producer = Some(producer(g)),
        Axiom::Interchange => {
            p.producer = Some(producer(g));
            p.other = Some(comp(g));
        }
        Axiom::Relocation => {
            let t = g.value_type(1);
            p.value = Some((g.value(&[], &t, budget), t));
        }
        Axiom::Permutation => {
            let vt = g.value_type(1);
            let v = g.value(&[], &vt, budget);
            let r = g.value_type(1);
            let x = VarName::new("z");
            let mut input = g.memory_type(1);
            input.push(&b, vt.clone());
            let mt = CompType::new(input, g.memory_type(1));
            p.comp = Some((g.term(&[(x.clone(), r.clone())], &mt, budget), mt));
            p.value = Some((v, vt));
            p.var = Some((x, r));
        }
    }
    p
}
