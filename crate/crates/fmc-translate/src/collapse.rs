//! Collapse of the memory onto one stack, embedding of sequential terms
//! at a location, and the isomorphisms between a memory and its collapse.
//!
//! A strict order `a1 < ... < am` on locations collapses a memory type to
//! the stack `t_a1 ... t_am`, bottom first. A term is collapsed action by
//! action against the memory type in force: the items above the touched
//! slots are popped, the action runs on the single stack, and the items
//! are pushed back. When nothing sits above, the action is kept as it is.
//!
//! ```text
//! κ(!t_A)      = <?x_A>.[⌊x_A⌋*]        ⌊x⌋* = x at base type
//! κ⁻¹(!t_A)    = <?x>.[⟦x⟧*]            ⌊x⌋* = !{κ⁻¹(r) ; ?x ; κ(u)} at ?r > !u
//!                                        ⟦x⟧* = !{κ(r) ; ?x ; κ⁻¹(u)}
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use fmc_term::{
    max_index, sequence, vector_pop, vector_push, Binder, Computation, Location, MemoryType, NameSupply, Symbol, Value,
    ValueType,
};
use fmc_types::{check, CompDerivation, CompType, Context, Signature, ValueDerivation};

use crate::TranslateError;

/// A strict total order on a finite set of locations, the main one first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocationOrder(Vec<Location>);

impl LocationOrder {
    /// The order listing `locs`; the main location is put first if absent.
    pub fn new(locs: Vec<Location>) -> Result<LocationOrder, TranslateError> {
        let mut out = Vec::new();
        if !locs.first().is_some_and(Location::is_main) {
            if locs.iter().any(Location::is_main) {
                return Err(TranslateError::InvalidOrder("the main location must come first".into()));
            }
            out.push(Location::main());
        }
        for l in locs {
            if out.contains(&l) {
                return Err(TranslateError::InvalidOrder(format!("location {l} listed twice")));
            }
            out.push(l);
        }
        Ok(LocationOrder(out))
    }

    /// The standard order: the main location, then the others by name.
    pub fn standard<'a>(locs: impl IntoIterator<Item = &'a Location>) -> LocationOrder {
        let mut v: Vec<Location> = locs.into_iter().cloned().collect();
        v.push(Location::main());
        v.sort();
        v.dedup();
        LocationOrder(v)
    }

    /// The standard order on the locations of a type.
    pub fn for_type(ty: &CompType) -> LocationOrder {
        let mut locs = Vec::new();
        collect_type_locations(&ty.input, &mut locs);
        collect_type_locations(&ty.output, &mut locs);
        LocationOrder::standard(&locs)
    }

    pub fn locations(&self) -> &[Location] {
        &self.0
    }

    pub fn position(&self, l: &Location) -> Result<usize, TranslateError> {
        self.0
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| TranslateError::UnknownLocation(l.clone()))
    }

    fn check(&self, m: &MemoryType) -> Result<(), TranslateError> {
        m.locations().try_for_each(|l| self.position(l).map(|_| ()))
    }
}

fn collect_type_locations(m: &MemoryType, out: &mut Vec<Location>) {
    for (l, s) in m.iter() {
        out.push(l.clone());
        for t in &s.0 {
            if let ValueType::Arrow(i, o) = t {
                collect_type_locations(i, out);
                collect_type_locations(o, out);
            }
        }
    }
}

impl fmt::Display for LocationOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(Location::name).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for LocationOrder {
    type Err = TranslateError;

    /// A comma-separated list, e.g. `a,b,c`.
    fn from_str(s: &str) -> Result<LocationOrder, TranslateError> {
        let locs = s
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(Location::new)
            .collect();
        LocationOrder::new(locs)
    }
}

/// `⌊t⌋`: arrows between memories become arrows between collapsed stacks.
pub fn collapse_value_type(t: &ValueType, order: &LocationOrder) -> Result<ValueType, TranslateError> {
    match t {
        ValueType::Base(_) => Ok(t.clone()),
        ValueType::Arrow(i, o) => Ok(ValueType::main_arrow(
            collapse_memory(i, order)?,
            collapse_memory(o, order)?,
        )),
    }
}

/// `⌊!t_A⌋ = ⌊!t_a1⌋ ... ⌊!t_am⌋`, bottom first.
pub fn collapse_memory(m: &MemoryType, order: &LocationOrder) -> Result<Vec<ValueType>, TranslateError> {
    order.check(m)?;
    let mut out = Vec::new();
    for l in order.locations() {
        for t in m.stack(l) {
            out.push(collapse_value_type(t, order)?);
        }
    }
    Ok(out)
}

pub fn collapse_comp_type(ty: &CompType, order: &LocationOrder) -> Result<CompType, TranslateError> {
    Ok(CompType::new(
        MemoryType::main(collapse_memory(&ty.input, order)?),
        MemoryType::main(collapse_memory(&ty.output, order)?),
    ))
}

/// The signature of collapsed terms: every constant at its collapsed type.
pub fn collapse_signature(sig: &Signature, order: &LocationOrder) -> Result<Signature, TranslateError> {
    let mut out = Signature::new();
    for b in &sig.bases {
        out = out.with_base(b.name());
    }
    for (v, t) in &sig.values {
        out = out.with_value(v.name(), collapse_value_type(t, order)?);
    }
    for (c, ty) in &sig.computations {
        out = out.with_computation(c.name(), collapse_comp_type(ty, order)?);
    }
    Ok(out)
}

struct Collapser<'a> {
    order: &'a LocationOrder,
    supply: NameSupply,
}

/// A run of slots on the collapsed stack, bottom first.
type Slots = Vec<(Binder, ValueType)>;

impl Collapser<'_> {
    fn fresh(&mut self, t: &ValueType) -> Result<(Binder, ValueType), TranslateError> {
        let c = collapse_value_type(t, self.order)?;
        Ok((Binder::annotated(self.supply.fresh("z"), c.clone()), c))
    }

    fn fresh_all(&mut self, ts: &[ValueType]) -> Result<Slots, TranslateError> {
        ts.iter().map(|t| self.fresh(t)).collect()
    }

    fn comp(&mut self, d: &CompDerivation) -> Result<Computation, TranslateError> {
        let mem = &d.ty().input;
        self.order.check(mem)?;
        match d {
            CompDerivation::Id { .. } => Ok(Computation::Star),
            CompDerivation::Push { value, loc, then, .. } => {
                let v = self.value(value)?;
                let k = self.comp(then)?;
                self.around(mem, loc, Computation::push_main(v, Computation::Star), k)
            }
            CompDerivation::Pop {
                loc, var, var_ty, then, ..
            } => {
                let b = Binder::annotated(var.clone(), collapse_value_type(var_ty, self.order)?);
                let k = self.comp(then)?;
                self.pop_around(mem, loc, b, k)
            }
            CompDerivation::Force {
                value, instance, then, ..
            } => {
                let v = self.value(value)?;
                let k = self.comp(then)?;
                self.general(mem, instance, Computation::force(v, Computation::Star), k)
            }
            CompDerivation::Const {
                sym, instance, then, ..
            } => {
                let k = self.comp(then)?;
                self.general(mem, instance, Computation::constant(sym.clone(), Computation::Star), k)
            }
        }
    }

    fn value(&mut self, d: &ValueDerivation) -> Result<Value, TranslateError> {
        match d {
            ValueDerivation::Var { name, .. } => Ok(Value::Var(name.clone())),
            ValueDerivation::Const { sym, .. } => Ok(Value::Const(sym.clone())),
            ValueDerivation::Thunk { body, .. } => Ok(Value::thunk(self.comp(body)?)),
        }
    }

    /// The items of every location after `loc`, bottom first.
    fn above(&self, mem: &MemoryType, loc: &Location) -> Result<Vec<ValueType>, TranslateError> {
        let i = self.order.position(loc)?;
        Ok(self.order.locations()[i + 1..]
            .iter()
            .flat_map(|l| mem.stack(l).to_vec())
            .collect())
    }

    fn pop_slots(slots: &Slots, then: Computation) -> Computation {
        let binders = slots.iter().map(|(b, _)| b.clone()).collect();
        vector_pop(&BTreeMap::from([(Location::main(), binders)]), then)
    }

    fn push_slots(slots: &Slots, then: Computation) -> Computation {
        let values = slots.iter().map(|(b, _)| Value::Var(b.var.clone())).collect();
        vector_push(&BTreeMap::from([(Location::main(), values)]), then)
    }

    /// `<?z>.action.[!z].k` with `z` the items above `loc`.
    fn around(
        &mut self,
        mem: &MemoryType,
        loc: &Location,
        action: Computation,
        k: Computation,
    ) -> Result<Computation, TranslateError> {
        let above = self.above(mem, loc)?;
        if above.is_empty() {
            return Ok(sequence(&action, &k));
        }
        let z = self.fresh_all(&above)?;
        Ok(Self::pop_slots(&z, sequence(&action, &Self::push_slots(&z, k))))
    }

    fn pop_around(
        &mut self,
        mem: &MemoryType,
        loc: &Location,
        b: Binder,
        k: Computation,
    ) -> Result<Computation, TranslateError> {
        let above = self.above(mem, loc)?;
        let z = self.fresh_all(&above)?;
        let body = Computation::Pop(Location::main(), b, Self::push_slots(&z, k).into());
        Ok(Self::pop_slots(&z, body))
    }

    /// An action consuming `instance.input` and producing `instance.output`.
    fn general(
        &mut self,
        mem: &MemoryType,
        instance: &CompType,
        action: Computation,
        k: Computation,
    ) -> Result<Computation, TranslateError> {
        self.order.check(&instance.input)?;
        self.order.check(&instance.output)?;
        let locs = self.order.locations();
        let touched = instance.input.locations().chain(instance.output.locations());
        let lowest = match touched
            .map(|l| self.order.position(l))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .min()
        {
            Some(i) => i,
            None => return Ok(sequence(&action, &k)),
        };
        let kept = |l: &Location| {
            let n = mem.stack(l).len() - instance.input.stack(l).len();
            mem.stack(l)[..n].to_vec()
        };
        if locs[lowest + 1..].iter().all(|l| kept(l).is_empty()) {
            return Ok(sequence(&action, &k));
        }
        let mut popped: Slots = Vec::new();
        let mut consumed: Slots = Vec::new();
        let mut kept_slots: Vec<Slots> = Vec::new();
        let mut outs: Vec<Slots> = Vec::new();
        for (j, l) in locs.iter().enumerate().skip(lowest) {
            let keep = if j > lowest {
                self.fresh_all(&kept(l))?
            } else {
                Vec::new()
            };
            let cons = self.fresh_all(instance.input.stack(l))?;
            popped.extend(keep.iter().cloned());
            popped.extend(cons.iter().cloned());
            consumed.extend(cons);
            kept_slots.push(keep);
            outs.push(self.fresh_all(instance.output.stack(l))?);
        }
        let all_outs: Slots = outs.iter().flatten().cloned().collect();
        let restored: Slots = kept_slots
            .into_iter()
            .zip(outs)
            .flat_map(|(k, o)| k.into_iter().chain(o))
            .collect();
        let after = Self::pop_slots(&all_outs, Self::push_slots(&restored, k));
        Ok(Self::pop_slots(
            &popped,
            Self::push_slots(&consumed, sequence(&action, &after)),
        ))
    }
}

/// Collapse a closed typed term onto the main stack.
pub fn collapse(
    sig: &Signature,
    m: &Computation,
    ty: &CompType,
    order: &LocationOrder,
) -> Result<Computation, TranslateError> {
    let d = check(sig, &Context::new(), m, ty)?;
    collapse_derivation(&d, order)
}

/// Collapse the term a derivation types.
pub fn collapse_derivation(d: &CompDerivation, order: &LocationOrder) -> Result<Computation, TranslateError> {
    let mut c = Collapser {
        order,
        supply: NameSupply::above(derivation_max_index(d)),
    };
    c.comp(d)
}

fn derivation_max_index(d: &CompDerivation) -> u32 {
    let mut best = 0;
    let mut node = Some(d);
    while let Some(n) = node {
        if let CompDerivation::Pop { var, .. } = n {
            best = best.max(var.index());
        }
        node = n.next();
    }
    d.for_each_value(&mut |v| match v {
        ValueDerivation::Var { name, .. } => best = best.max(name.index()),
        ValueDerivation::Thunk { body, .. } => best = best.max(derivation_max_index(body)),
        ValueDerivation::Const { .. } => {}
    });
    best
}

/// `⟦t⟧_a`: a sequential type with its arrows placed at `at`.
pub fn embed_value_type(t: &ValueType, at: &Location) -> Result<ValueType, TranslateError> {
    match t {
        ValueType::Base(_) => Ok(t.clone()),
        ValueType::Arrow(i, o) => Ok(ValueType::arrow(embed_memory(i, at)?, embed_memory(o, at)?)),
    }
}

/// `⟦s⟧_a`: a main-location stack moved to `at`.
pub fn embed_memory(m: &MemoryType, at: &Location) -> Result<MemoryType, TranslateError> {
    if let Some(l) = m.locations().find(|l| !l.is_main()) {
        return Err(TranslateError::IllTyped(format!("location {l} in a sequential type")));
    }
    let items = m
        .stack(&Location::main())
        .iter()
        .map(|t| embed_value_type(t, at))
        .collect::<Result<_, _>>()?;
    Ok(MemoryType::singleton(at.clone(), items))
}

pub fn embed_comp_type(ty: &CompType, at: &Location) -> Result<CompType, TranslateError> {
    Ok(CompType::new(
        embed_memory(&ty.input, at)?,
        embed_memory(&ty.output, at)?,
    ))
}

struct Embedder<'a> {
    at: &'a Location,
    sig: &'a Signature,
    order: &'a LocationOrder,
    supply: NameSupply,
}

impl Embedder<'_> {
    fn comp(&mut self, m: &Computation) -> Result<Computation, TranslateError> {
        let main = |l: &Location| {
            if l.is_main() {
                Ok(())
            } else {
                Err(TranslateError::IllTyped(format!("location {l} in a sequential term")))
            }
        };
        match m {
            Computation::Star => Ok(Computation::Star),
            Computation::Push(v, l, k) => {
                main(l)?;
                Ok(Computation::push(self.value(v)?, self.at.clone(), self.comp(k)?))
            }
            Computation::Pop(l, b, k) => {
                main(l)?;
                let ann = b.ann.as_ref().map(|t| embed_value_type(t, self.at)).transpose()?;
                Ok(Computation::Pop(
                    self.at.clone(),
                    Binder {
                        var: b.var.clone(),
                        ann,
                    },
                    self.comp(k)?.into(),
                ))
            }
            Computation::Force(v, k) => Ok(Computation::force(self.value(v)?, self.comp(k)?)),
            Computation::Const(c, k) => {
                let ty = self
                    .sig
                    .computations
                    .get(c)
                    .ok_or_else(|| TranslateError::IllTyped(format!("unknown constant {c}")))?;
                let wrapped = sequence(
                    &kappa_inv_in(&ty.input, self.order, self.at, &mut self.supply)?,
                    &Computation::constant(c.clone(), kappa_in(&ty.output, self.order, self.at, &mut self.supply)?),
                );
                Ok(sequence(&wrapped, &self.comp(k)?))
            }
        }
    }

    fn value(&mut self, v: &Value) -> Result<Value, TranslateError> {
        match v {
            Value::Var(_) => Ok(v.clone()),
            Value::Thunk(m) => Ok(Value::thunk(self.comp(m)?)),
            Value::Const(c) => match self.sig.values.get(c) {
                Some(ValueType::Arrow(i, o)) => {
                    let body = sequence(
                        &kappa_inv_in(i, self.order, self.at, &mut self.supply)?,
                        &Computation::force(v.clone(), kappa_in(o, self.order, self.at, &mut self.supply)?),
                    );
                    Ok(Value::thunk(body))
                }
                Some(ValueType::Base(_)) => Ok(v.clone()),
                None => Err(TranslateError::IllTyped(format!("unknown constant {c}"))),
            },
        }
    }
}

/// Embed a sequential term over `⌊sig⌋` at location `at`. Constants of
/// `sig` are conjugated by the isomorphisms for `order`.
pub fn embed(
    slc: &Computation,
    at: &Location,
    sig: &Signature,
    order: &LocationOrder,
) -> Result<Computation, TranslateError> {
    order.position(at)?;
    let mut e = Embedder {
        at,
        sig,
        order,
        supply: NameSupply::above(max_index(slc)),
    };
    e.comp(slc)
}

fn collapse_star(
    x: Value,
    t: &ValueType,
    order: &LocationOrder,
    at: &Location,
    supply: &mut NameSupply,
) -> Result<Value, TranslateError> {
    match t {
        ValueType::Base(_) => Ok(x),
        ValueType::Arrow(r, u) => {
            let body = sequence(
                &kappa_inv_in(r, order, at, supply)?,
                &Computation::force(x, kappa_in(u, order, at, supply)?),
            );
            Ok(Value::thunk(body))
        }
    }
}

fn embed_star(
    y: Value,
    t: &ValueType,
    order: &LocationOrder,
    at: &Location,
    supply: &mut NameSupply,
) -> Result<Value, TranslateError> {
    match t {
        ValueType::Base(_) => Ok(y),
        ValueType::Arrow(r, u) => {
            let body = sequence(
                &kappa_in(r, order, at, supply)?,
                &Computation::force(y, kappa_inv_in(u, order, at, supply)?),
            );
            Ok(Value::thunk(body))
        }
    }
}

fn kappa_in(
    t: &MemoryType,
    order: &LocationOrder,
    at: &Location,
    supply: &mut NameSupply,
) -> Result<Computation, TranslateError> {
    order.check(t)?;
    let mut binders: BTreeMap<Location, Vec<Binder>> = BTreeMap::new();
    let mut pushes = Vec::new();
    for l in order.locations() {
        for s in t.stack(l) {
            let x = supply.fresh("x");
            binders
                .entry(l.clone())
                .or_default()
                .push(Binder::annotated(x.clone(), s.clone()));
            pushes.push(collapse_star(Value::Var(x), s, order, at, supply)?);
        }
    }
    let push = vector_push(&BTreeMap::from([(at.clone(), pushes)]), Computation::Star);
    Ok(vector_pop(&binders, push))
}

fn kappa_inv_in(
    t: &MemoryType,
    order: &LocationOrder,
    at: &Location,
    supply: &mut NameSupply,
) -> Result<Computation, TranslateError> {
    order.check(t)?;
    let mut binders = Vec::new();
    let mut pushes: BTreeMap<Location, Vec<Value>> = BTreeMap::new();
    for l in order.locations() {
        for s in t.stack(l) {
            let y = supply.fresh("y");
            let collapsed = embed_value_type(&collapse_value_type(s, order)?, at)?;
            binders.push(Binder::annotated(y.clone(), collapsed));
            pushes
                .entry(l.clone())
                .or_default()
                .push(embed_star(Value::Var(y), s, order, at, supply)?);
        }
    }
    let push = vector_push(&pushes, Computation::Star);
    Ok(vector_pop(&BTreeMap::from([(at.clone(), binders)]), push))
}

/// `κ : ?t_A > !⌊t_A⌋`, gathering a memory onto the main stack.
pub fn kappa(t: &MemoryType, order: &LocationOrder) -> Result<Computation, TranslateError> {
    kappa_at(t, order, &Location::main())
}

/// `κ⁻¹ : ?⌊t_A⌋ > !t_A`, spreading the main stack over a memory.
pub fn kappa_inv(t: &MemoryType, order: &LocationOrder) -> Result<Computation, TranslateError> {
    kappa_inv_at(t, order, &Location::main())
}

/// `κ` gathering onto the location `at` instead of the main one.
pub fn kappa_at(t: &MemoryType, order: &LocationOrder, at: &Location) -> Result<Computation, TranslateError> {
    kappa_in(t, order, at, &mut NameSupply::new())
}

pub fn kappa_inv_at(t: &MemoryType, order: &LocationOrder, at: &Location) -> Result<Computation, TranslateError> {
    kappa_inv_in(t, order, at, &mut NameSupply::new())
}

/// The type of `κ` at `t`: `?t_A > !at(⌊t_A⌋)`.
pub fn kappa_type(t: &MemoryType, order: &LocationOrder, at: &Location) -> Result<CompType, TranslateError> {
    let collapsed = collapse_memory(t, order)?
        .iter()
        .map(|s| embed_value_type(s, at))
        .collect::<Result<_, _>>()?;
    Ok(CompType::new(t.clone(), MemoryType::singleton(at.clone(), collapsed)))
}

/// The symbols of `sig` that need conjugation when embedded.
pub fn higher_order_constants(sig: &Signature) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = sig
        .values
        .iter()
        .filter(|(_, t)| !t.is_base())
        .map(|(c, _)| c.clone())
        .collect();
    out.extend(sig.computations.keys().cloned());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use fmc_surface::{parse, parse_type};

    fn o() -> ValueType {
        ValueType::base("o")
    }

    fn order(s: &str) -> LocationOrder {
        s.parse().unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(order("a,b").to_string(), "lam,a,b");
        assert!(matches!(
            "a,lam".parse::<LocationOrder>(),
            Err(TranslateError::InvalidOrder(_))
        ));
        assert!(matches!(
            "a,a".parse::<LocationOrder>(),
            Err(TranslateError::InvalidOrder(_))
        ));
        assert!(matches!(
            order("a").position(&Location::new("b")),
            Err(TranslateError::UnknownLocation(_))
        ));
    }

    #[test]
    fn type_collapse_concatenates_in_order() {
        let m = MemoryType::from_stacks([
            (Location::new("a"), vec![o()]),
            (Location::new("b"), vec![ValueType::base("s")]),
        ]);
        let ts: Vec<String> = collapse_memory(&m, &order("a,b"))
            .unwrap()
            .iter()
            .map(|t| format!("{t:?}"))
            .collect();
        let ss: Vec<String> = collapse_memory(&m, &order("b,a"))
            .unwrap()
            .iter()
            .map(|t| format!("{t:?}"))
            .collect();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts, ss.into_iter().rev().collect::<Vec<_>>());
        assert_eq!(
            collapse_memory(&m, &order("a,b")).unwrap(),
            vec![o(), ValueType::base("s")]
        );
        assert!(matches!(
            collapse_memory(&m, &order("a")),
            Err(TranslateError::UnknownLocation(_))
        ));
    }

    #[test]
    fn kappa_examples() {
        let a = Location::new("a");
        let ord = order("a");
        assert_eq!(kappa(&MemoryType::empty(), &ord).unwrap(), Computation::Star);
        let k = kappa(&MemoryType::singleton(a.clone(), vec![o()]), &ord).unwrap();
        assert_eq!(k.to_string(), "a<x'1:o>.[x'1]");
        assert_eq!(
            embed(&Computation::Star, &a, &Signature::new(), &ord).unwrap(),
            Computation::Star
        );
    }

    #[test]
    fn collapse_shuffles_only_above_the_slot() {
        let sig = Signature::new().with_base("o");
        let m = parse("a<x:o>.[x]b.[x]").unwrap();
        let ty = parse_type("a(o) lam(o) > b(o) lam(o o)").unwrap();
        let c = collapse(&sig, &m, &ty, &order("a,b")).unwrap();
        assert_eq!(c.to_string(), "<x:o>.[x].<z'1:o>.[x].[z'1]");
        let c = collapse(&sig, &m, &ty, &order("b,a")).unwrap();
        let cty = collapse_comp_type(&ty, &order("b,a")).unwrap();
        check(&sig, &Context::new(), &c, &cty).unwrap();
    }
}
