use fmc_term::*;
use proptest::prelude::*;

fn loc() -> impl Strategy<Value = Location> {
    prop_oneof![
        Just(Location::main()),
        Just(Location::new("a")),
        Just(Location::new("b"))
    ]
}

fn var() -> impl Strategy<Value = VarName> {
    prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(VarName::new)
}

fn value(depth: u32) -> BoxedStrategy<Value> {
    let leaf = prop_oneof![var().prop_map(Value::Var), Just(Value::constant("v")),];
    if depth == 0 {
        leaf.boxed()
    } else {
        prop_oneof![3 => leaf, 1 => comp(depth - 1).prop_map(Value::thunk)].boxed()
    }
}

fn comp(depth: u32) -> BoxedStrategy<Computation> {
    let action = prop_oneof![
        (value(depth), loc()).prop_map(|(v, a)| (0u8, Some(v), Some(a), None)),
        (loc(), var()).prop_map(|(a, x)| (1u8, None, Some(a), Some(x))),
        value(depth).prop_map(|v| (2u8, Some(v), None, None)),
    ];
    proptest::collection::vec(action, 0..6)
        .prop_map(|actions| {
            actions
                .into_iter()
                .rev()
                .fold(Computation::Star, |acc, (tag, v, a, x)| match tag {
                    0 => Computation::push(v.unwrap(), a.unwrap(), acc),
                    1 => Computation::pop(a.unwrap(), x.unwrap(), acc),
                    _ => Computation::force(v.unwrap(), acc),
                })
        })
        .boxed()
}

proptest! {
    #[test]
    fn sequencing_is_associative(m in comp(2), n in comp(2), p in comp(2)) {
        let left = sequence(&sequence(&m, &n), &p);
        let right = sequence(&m, &sequence(&n, &p));
        prop_assert!(alpha_eq(&left, &right), "{} vs {}", left, right);
    }

    #[test]
    fn star_is_a_unit(m in comp(2)) {
        prop_assert_eq!(sequence(&Computation::Star, &m), m.clone());
        prop_assert!(alpha_eq(&sequence(&m, &Computation::Star), &m));
    }

    #[test]
    fn sequencing_keeps_free_variables(m in comp(2), n in comp(2)) {
        let s = sequence(&m, &n);
        let fv = free_vars(&s);
        for x in free_vars(&n) {
            prop_assert!(fv.contains(&x));
        }
        for x in free_vars(&m) {
            prop_assert!(fv.contains(&x));
        }
    }

    #[test]
    fn substitution_free_variables(m in comp(2), v in value(1), x in var()) {
        let out = substitute(&v, &x, &m);
        let mut bound: std::collections::BTreeSet<_> = free_vars(&m);
        bound.remove(&x);
        let fv_v = free_vars_value(&v);
        let expected: std::collections::BTreeSet<_> = if free_vars(&m).contains(&x) {
            bound.union(&fv_v).cloned().collect()
        } else {
            bound.clone()
        };
        prop_assert_eq!(free_vars(&out), expected);
    }

    #[test]
    fn substitution_respects_alpha(m in comp(2), v in value(1), x in var()) {
        let renamed = canonical(&m);
        prop_assert!(alpha_eq(&substitute(&v, &x, &m), &substitute(&v, &x, &renamed)));
    }

    #[test]
    fn canonical_forms_decide_alpha(m in comp(2), n in comp(2)) {
        prop_assert_eq!(alpha_eq(&m, &n), canonical(&m) == canonical(&n));
        prop_assert!(alpha_eq(&m, &canonical(&m)));
    }
}
