use std::collections::BTreeMap;

use crate::{Binder, Computation, Location, Value};

/// `[S_A].M`: for each location in location order, push its values bottom first.
pub fn vector_push(memory: &BTreeMap<Location, Vec<Value>>, then: Computation) -> Computation {
    let mut actions = Vec::new();
    for (loc, values) in memory {
        for v in values {
            actions.push((v.clone(), loc.clone()));
        }
    }
    actions
        .into_iter()
        .rev()
        .fold(then, |acc, (v, loc)| Computation::push(v, loc, acc))
}

/// `<?x_A>.M`: for each location in location order, pop its binders top
/// first. Binders are listed bottom first, so `[x1, x2]` pops `x2` then `x1`.
pub fn vector_pop(binders: &BTreeMap<Location, Vec<Binder>>, then: Computation) -> Computation {
    let mut actions = Vec::new();
    for (loc, xs) in binders {
        for x in xs.iter().rev() {
            actions.push((loc.clone(), x.clone()));
        }
    }
    actions
        .into_iter()
        .rev()
        .fold(then, |acc, (loc, b)| Computation::Pop(loc, b, std::sync::Arc::new(acc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::VarName;

    #[test]
    fn push_vector_bottom_first() {
        let mem = BTreeMap::from([(Location::main(), vec![Value::var("v"), Value::var("w")])]);
        let expected = Computation::push_main(
            Value::var("v"),
            Computation::push_main(Value::var("w"), Computation::Star),
        );
        assert_eq!(vector_push(&mem, Computation::Star), expected);
    }

    #[test]
    fn pop_vector_in_location_order() {
        assert_eq!(vector_pop(&BTreeMap::new(), Computation::Star), Computation::Star);
        let a = Location::new("a");
        let b = Location::new("b");
        let xs = BTreeMap::from([
            (b.clone(), vec![Binder::new(VarName::new("y"))]),
            (a.clone(), vec![Binder::new(VarName::new("x"))]),
        ]);
        let expected = Computation::pop(
            a,
            VarName::new("x"),
            Computation::pop(b, VarName::new("y"), Computation::Star),
        );
        assert_eq!(vector_pop(&xs, Computation::Star), expected);
    }

    #[test]
    fn pop_vector_top_first() {
        let xs = BTreeMap::from([(
            Location::main(),
            vec![Binder::new(VarName::new("x1")), Binder::new(VarName::new("x2"))],
        )]);
        let expected = Computation::pop_main(
            VarName::new("x2"),
            Computation::pop_main(VarName::new("x1"), Computation::Star),
        );
        assert_eq!(vector_pop(&xs, Computation::Star), expected);
    }
}
