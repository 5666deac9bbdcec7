use fmc_equiv::{
    derived_global_beta, generate_instances, instantiate_axiom, machine_equiv, theory_signature, validate_theory,
    Axiom, EquivConfig, Params, Verdict,
};
use fmc_gen::{Gen, GenConfig};
use fmc_rewrite::{apply, find_redexes};
use fmc_surface::{parse, parse_type};
use fmc_term::{Binder, Computation, Location, MemoryType, Value, ValueType, VarName};
use fmc_types::{check, infer, CompType, Context, Signature};

fn sig() -> Signature {
    theory_signature()
}

fn ty(s: &str) -> CompType {
    parse_type(s).unwrap()
}

fn o() -> ValueType {
    ValueType::base("o")
}

fn equivalent(v: &Verdict) -> bool {
    matches!(v, Verdict::Equivalent { .. })
}

fn producer(src: &str) -> (Computation, MemoryType) {
    let m = parse(src).unwrap();
    let t = infer(&sig(), &Context::new(), &m).unwrap().ty().clone();
    assert!(t.input.is_empty());
    (m, t.output)
}

#[test]
fn generated_instances_are_never_distinguished() {
    let instances = generate_instances(7, 25);
    for a in Axiom::ALL {
        assert!(instances.iter().filter(|i| i.axiom == a).count() >= 20, "{a}");
    }
    let report = validate_theory(&sig(), &instances, &EquivConfig::default());
    for (i, why) in &report.failures {
        eprintln!("{i}\n  {why}");
    }
    assert!(report.passed());
    assert_eq!(report.distinguished(), 0);
    assert!(report.instances >= 200);
    assert_eq!(report.to_json()["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn identity_instance() {
    let i = instantiate_axiom(
        &sig(),
        Axiom::Id,
        Params {
            memory: Some(MemoryType::main(vec![o()])),
            ..Params::default()
        },
    )
    .unwrap();
    assert_eq!(i.lhs.to_string(), "<x'1:o>.[x'1]");
    assert_eq!(i.rhs, Computation::Star);
    assert_eq!(i.ty, ty("o > o"));
}

#[test]
fn terminal_on_the_empty_producer() {
    let i = instantiate_axiom(
        &sig(),
        Axiom::Terminal,
        Params {
            producer: Some(producer("*")),
            ..Params::default()
        },
    )
    .unwrap();
    assert_eq!((i.lhs.clone(), i.rhs.clone()), (Computation::Star, Computation::Star));
    assert!(equivalent(
        &machine_equiv(&sig(), &i.lhs, &i.rhs, &i.ty, &EquivConfig::default()).unwrap()
    ));
}

#[test]
fn relocation_instance() {
    let params = Params {
        value: Some((Value::constant("c"), o())),
        a: Some(Location::new("a")),
        b: Some(Location::new("b")),
        ..Params::default()
    };
    let i = instantiate_axiom(&sig(), Axiom::Relocation, params.clone()).unwrap();
    assert_eq!(i.lhs.to_string(), "[#c]a.a<y'1:o>.[y'1]b");
    assert_eq!(i.rhs.to_string(), "[#c]b");
    let same = Params {
        b: Some(Location::new("a")),
        ..params
    };
    assert!(instantiate_axiom(&sig(), Axiom::Relocation, same).is_err());
}

#[test]
fn diagonal_and_interchange_examples() {
    let cfg = EquivConfig::default();
    let d = instantiate_axiom(
        &sig(),
        Axiom::Diagonal,
        Params {
            producer: Some(producer("[#c]")),
            ..Params::default()
        },
    )
    .unwrap();
    assert_eq!(d.ty, ty("> o o"));
    assert!(equivalent(&machine_equiv(&sig(), &d.lhs, &d.rhs, &d.ty, &cfg).unwrap()));
    let p = parse("<x:o>.[x].[x]").unwrap();
    let params = Params {
        producer: Some(producer("[#c]")),
        other: Some((p, ty("o > o o"))),
        ..Params::default()
    };
    let i = instantiate_axiom(&sig(), Axiom::Interchange, params).unwrap();
    assert_eq!(i.ty, ty("o > o o o"));
    assert!(equivalent(&machine_equiv(&sig(), &i.lhs, &i.rhs, &i.ty, &cfg).unwrap()));
}

#[test]
fn permutation_family_across_locations() {
    let cfg = EquivConfig::default();
    let lhs = parse("[#c]a.[#d]b").unwrap();
    let rhs = parse("[#d]b.[#c]a").unwrap();
    assert!(equivalent(
        &machine_equiv(&sig(), &lhs, &rhs, &ty("> a(o) b(o)"), &cfg).unwrap()
    ));
    let lhs = parse("a<x:o>.b<y:o>.[y].[x]").unwrap();
    let rhs = parse("b<y:o>.a<x:o>.[y].[x]").unwrap();
    assert!(equivalent(
        &machine_equiv(&sig(), &lhs, &rhs, &ty("a(o) b(o) > o o"), &cfg).unwrap()
    ));
    let params = Params {
        value: Some((Value::constant("c"), o())),
        var: Some((VarName::new("x"), o())),
        comp: Some((
            parse("b<y:o>.[x].[y]").unwrap(),
            CompType::new(
                MemoryType::singleton(Location::new("b"), vec![o()]),
                MemoryType::main(vec![o(), o()]),
            ),
        )),
        a: Some(Location::new("a")),
        b: Some(Location::new("b")),
        ..Params::default()
    };
    let m = Params {
        comp: Some((parse("b<y:o>.[y].[y]").unwrap(), params.comp.clone().unwrap().1)),
        ..params.clone()
    };
    let i = instantiate_axiom(&sig(), Axiom::Permutation, params).unwrap();
    assert_eq!(i.lhs.to_string(), "[#c]b.a<x:o>.b<y:o>.[x].[y]");
    assert!(equivalent(&machine_equiv(&sig(), &i.lhs, &i.rhs, &i.ty, &cfg).unwrap()));
    assert!(instantiate_axiom(&sig(), Axiom::Permutation, m).is_ok());
    let capture = Params {
        value: Some((Value::var("x"), o())),
        var: Some((VarName::new("x"), o())),
        comp: Some((Computation::Star, ty("b(o) > b(o)"))),
        a: Some(Location::new("a")),
        b: Some(Location::new("b")),
        ..Params::default()
    };
    assert!(instantiate_axiom(&sig(), Axiom::Permutation, capture).is_err());
}

#[test]
fn derived_global_beta_examples() {
    let x = Binder::annotated(VarName::new("x"), o());
    let (l, r) = derived_global_beta(&Value::constant("c"), &Location::main(), &x, &parse("[x]b").unwrap());
    assert_eq!(r.to_string(), "[#c]b");
    assert!(equivalent(
        &machine_equiv(&sig(), &l, &r, &ty("> b(o)"), &EquivConfig::default()).unwrap()
    ));
    let (_, r) = derived_global_beta(&Value::constant("d"), &Location::main(), &x, &Computation::Star);
    assert_eq!(r, Computation::Star);
    // set c; get c, i.e. [5].set c ; get c with the old cell value discarded
    let chained = parse("[#d].<v:o>.c<_:o>.[v]c.c<x:o>.[x]c.[x]").unwrap();
    let direct = parse("c<_:o>.[#d]c.[#d]").unwrap();
    assert!(equivalent(
        &machine_equiv(&sig(), &chained, &direct, &ty("c(o) > c(o) o"), &EquivConfig::default()).unwrap()
    ));
}

#[test]
fn coarseness_witness() {
    let one = Signature::new().with_base("a").with_value("c", ValueType::base("a"));
    let two = one.clone().with_value("c'", ValueType::base("a"));
    let m = parse("<x:a>.[#c]").unwrap();
    let n = parse("<x:a>.[x]").unwrap();
    let t = ty("a > a");
    let cfg = EquivConfig {
        depth: 1,
        ..EquivConfig::default()
    };
    assert!(equivalent(&machine_equiv(&one, &m, &n, &t, &cfg).unwrap()));
    match machine_equiv(&two, &m, &n, &t, &cfg).unwrap() {
        Verdict::Distinguished { witness, .. } => {
            assert_eq!(witness.input[&Location::main()], vec![Value::constant("c'")]);
        }
        v => panic!("{v}"),
    }
}

#[test]
fn church_numerals_are_not_separated_by_one_constant() {
    let one = Signature::new().with_base("a").with_value("c", ValueType::base("a"));
    let t = ty("(a > a) > (a > a)");
    let numeral = |n: usize| parse(&format!("<f:(a > a)>.[!{{{}}}]", vec!["?f"; n].join("."))).unwrap();
    for n in 2..4 {
        let v = machine_equiv(&one, &numeral(1), &numeral(n), &t, &EquivConfig::default()).unwrap();
        assert!(equivalent(&v), "{n}: {v}");
    }
    let two = one.with_value("d", ValueType::base("a"));
    let v = machine_equiv(&two, &numeral(1), &numeral(2), &t, &EquivConfig::default()).unwrap();
    assert!(equivalent(&v), "{v}");
}

#[test]
fn thunk_outputs_are_compared_at_depth_two() {
    let m = parse("[!{<x:o>.[#c]}]").unwrap();
    let n = parse("[!{<x:o>.[x]}]").unwrap();
    let t = ty("> (o > o)");
    let shallow = EquivConfig {
        depth: 1,
        ..EquivConfig::default()
    };
    assert!(equivalent(&machine_equiv(&sig(), &m, &n, &t, &shallow).unwrap()));
    assert!(machine_equiv(&sig(), &m, &n, &t, &EquivConfig::default())
        .unwrap()
        .is_distinguished());
}

#[test]
fn wrong_laws_are_caught() {
    let cfg = EquivConfig::default();
    let swap = parse("<x:o>.<y:o>.[x].[y]").unwrap();
    assert!(machine_equiv(&sig(), &swap, &Computation::Star, &ty("o o > o o"), &cfg)
        .unwrap()
        .is_distinguished());
    // Replacing one constant by the other in generated outputs is usually visible.
    let mut caught = 0;
    for inst in generate_instances(3, 4) {
        let flipped = parse(
            &inst
                .rhs
                .to_string()
                .replace("#c", "#e")
                .replace("#d", "#c")
                .replace("#e", "#d"),
        )
        .unwrap();
        if flipped != inst.rhs
            && check(&sig(), &Context::new(), &flipped, &inst.ty).is_ok()
            && machine_equiv(&sig(), &inst.lhs, &flipped, &inst.ty, &cfg)
                .unwrap()
                .is_distinguished()
        {
            caught += 1;
        }
    }
    assert!(caught >= 5, "{caught}");
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_steps_are_sound(seed in proptest::prelude::any::<u64>()) {
        let mut g = Gen::new(seed, GenConfig::default().with_base("o", &["c", "d"]));
        let s = g.sample_within(20);
        for r in find_redexes(&s.term) {
            let next = apply(&s.term, &r).unwrap();
            let v = machine_equiv(&sig(), &s.term, &next, &s.ty, &EquivConfig::default()).unwrap();
            proptest::prop_assert!(!v.is_distinguished(), "{} -> {} by {}: {}", s.term, next, r, v);
        }
    }
}

#[test]
fn relation_is_reflexive_symmetric_and_transitive_on_samples() {
    let cfg = GenConfig::default().with_base("o", &["c", "d"]);
    let mut g = Gen::new(5, cfg);
    let ecfg = EquivConfig::default();
    let t = ty("o o > o");
    let terms: Vec<Computation> = (0..12).map(|_| g.term(&[], &t, 4)).collect();
    let eq = |a: &Computation, b: &Computation| equivalent(&machine_equiv(&sig(), a, b, &t, &ecfg).unwrap());
    for a in &terms {
        assert!(eq(a, a));
        for b in &terms {
            assert_eq!(eq(a, b), eq(b, a));
            for c in &terms {
                if eq(a, b) && eq(b, c) {
                    assert!(eq(a, c));
                }
            }
        }
    }
}
