use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use fmc_gen::{Gen, GenConfig};
use fmc_term::{
    canonical, vector_pop, vector_push, Binder, Computation, Location, MemoryType, NameSupply, Symbol, Value, ValueType,
};
use fmc_types::Signature;

/// Constants of each base type declared in `sig`.
pub(crate) fn constants(sig: &Signature) -> BTreeMap<Symbol, Vec<Symbol>> {
    let mut out: BTreeMap<Symbol, Vec<Symbol>> = sig.bases.iter().map(|b| (b.clone(), Vec::new())).collect();
    for (c, t) in &sig.values {
        if let ValueType::Base(b) = t {
            out.entry(b.clone()).or_default().push(c.clone());
        }
    }
    out
}

/// Base types and locations mentioned anywhere in `t`.
fn mentions(t: &ValueType, bases: &mut BTreeSet<Symbol>, locs: &mut BTreeSet<Location>) {
    match t {
        ValueType::Base(b) => {
            bases.insert(b.clone());
        }
        ValueType::Arrow(i, o) => {
            for m in [i, o] {
                for (l, s) in m.iter() {
                    locs.insert(l.clone());
                    for u in &s.0 {
                        mentions(u, bases, locs);
                    }
                }
            }
        }
    }
}

/// The canonical inhabitant: the first constant at a base type, and at an
/// arrow type the term popping every input and pushing canonical outputs.
pub(crate) fn canonical_inhabitant(consts: &BTreeMap<Symbol, Vec<Symbol>>, t: &ValueType) -> Option<Value> {
    match t {
        ValueType::Base(b) => consts.get(b)?.first().map(|c| Value::Const(c.clone())),
        ValueType::Arrow(i, o) => {
            let mut supply = NameSupply::new();
            let binders: BTreeMap<Location, Vec<Binder>> = i
                .iter()
                .map(|(l, s)| {
                    (
                        l.clone(),
                        s.0.iter()
                            .map(|u| Binder::annotated(supply.fresh("x"), u.clone()))
                            .collect(),
                    )
                })
                .collect();
            let mut outs = BTreeMap::new();
            for (l, s) in o.iter() {
                let vs: Option<Vec<Value>> = s.0.iter().map(|u| canonical_inhabitant(consts, u)).collect();
                outs.insert(l.clone(), vs?);
            }
            Some(Value::thunk(vector_pop(
                &binders,
                vector_push(&outs, Computation::Star),
            )))
        }
    }
}

/// Closed test values of type `t`: the canonical inhabitant followed by up
/// to `extra` distinct generated values.
pub(crate) fn basis(sig: &Signature, t: &ValueType, extra: usize, budget: usize, seed: u64) -> Vec<Value> {
    let consts = constants(sig);
    if let ValueType::Base(b) = t {
        return consts
            .get(b)
            .map_or(Vec::new(), |cs| cs.iter().cloned().map(Value::Const).collect());
    }
    let mut out: Vec<Value> = canonical_inhabitant(&consts, t).into_iter().collect();
    let (mut bases, mut locs) = (BTreeSet::new(), BTreeSet::new());
    mentions(t, &mut bases, &mut locs);
    if bases.iter().any(|b| consts.get(b).is_none_or(Vec::is_empty)) {
        return out;
    }
    locs.insert(Location::main());
    let cfg = GenConfig {
        locations: locs.into_iter().collect(),
        constants: consts,
        ..GenConfig::default()
    };
    let mut h = DefaultHasher::new();
    t.to_string().hash(&mut h);
    let mut g = Gen::new(seed ^ h.finish(), cfg);
    let mut seen: BTreeSet<String> = out.iter().map(key).collect();
    for _ in 0..extra * 4 {
        if out.len() > extra {
            break;
        }
        let v = g.value(&[], t, budget);
        if seen.insert(key(&v)) {
            out.push(v);
        }
    }
    out
}

fn key(v: &Value) -> String {
    canonical(&Computation::push_main(v.clone(), Computation::Star)).to_string()
}

/// Slots of a memory type in location order, bottom first.
pub(crate) fn slots(t: &MemoryType) -> Vec<(Location, ValueType)> {
    t.iter()
        .flat_map(|(l, s)| s.0.iter().map(move |u| (l.clone(), u.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_inhabitants() {
        let sig = Signature::new().with_base("o").with_value("c", ValueType::base("o"));
        let c = constants(&sig);
        let t = ValueType::main_arrow(vec![ValueType::base("o")], vec![ValueType::base("o")]);
        assert_eq!(canonical_inhabitant(&c, &t).unwrap().to_string(), "!{<_:o>.[#c]}");
        assert!(canonical_inhabitant(&c, &ValueType::base("p")).is_none());
    }

    #[test]
    fn bases_are_deduplicated() {
        let sig = Signature::new()
            .with_base("o")
            .with_value("c", ValueType::base("o"))
            .with_value("d", ValueType::base("o"));
        let t = ValueType::main_arrow(vec![ValueType::base("o")], vec![ValueType::base("o")]);
        let b = basis(&sig, &t, 3, 3, 0);
        assert!(!b.is_empty() && b.len() <= 4);
        let keys: BTreeSet<String> = b.iter().map(key).collect();
        assert_eq!(keys.len(), b.len());
        assert_eq!(basis(&sig, &ValueType::base("o"), 3, 3, 0).len(), 2);
    }
}
