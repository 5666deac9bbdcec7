use fmc_gen::{Gen, GenConfig};
use fmc_measure::{interpret, interpret_value, zero_element, CountBig, Kind, SemFun, SemMem, Valuation};
use fmc_term::{sequence, substitute, MemoryType, VarName};
use fmc_types::{check, check_value, CompType, Context, Signature};
use proptest::prelude::*;

type C = CountBig;

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Strong), Just(Kind::Weak)]
}

/// Zero elements at `t`, and the same with every slot bumped by one.
fn probes(t: &MemoryType) -> [SemMem<C>; 2] {
    let bumped = SemMem::from_stacks(t.iter().map(|(l, s)| {
        (
            l.clone(),
            s.0.iter().map(|u| zero_element(u).bumped(C::from(1u32))).collect(),
        )
    }));
    [SemMem::zero(t), bumped]
}

fn observe(f: &SemFun<C>, input: &SemMem<C>) -> (C, Vec<C>) {
    f.observe(input.clone()).unwrap()
}

fn dominates(hi: &(C, Vec<C>), lo: &(C, Vec<C>)) -> bool {
    hi.0 >= lo.0 && hi.1.len() == lo.1.len() && hi.1.iter().zip(&lo.1).all(|(a, b)| a >= b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn substitution_lemma(seed in any::<u64>(), kind in kind()) {
        let mut g = Gen::new(seed, GenConfig::default());
        let t = g.value_type(2);
        let ty = g.comp_type();
        let z = VarName::new("z");
        let body = g.term(&[(z.clone(), t.clone())], &ty, 4);
        let n = g.value(&[], &t, 3);
        let sig = Signature::new();
        let d = check(&sig, &Context::new().with("z", t.clone()), &body, &ty).unwrap();
        let dn = check_value(&sig, &Context::new(), &n, &t).unwrap();
        let arg = interpret_value::<C>(kind, &dn, &Valuation::new()).unwrap();
        let lhs = interpret(kind, &d, &Valuation::new().with(&z, arg)).unwrap();
        let ds = check(&sig, &Context::new(), &substitute(&n, &z, &body), &ty).unwrap();
        let rhs = interpret(kind, &ds, &Valuation::new()).unwrap();
        for p in probes(&ty.input) {
            prop_assert_eq!(observe(&lhs, &p), observe(&rhs, &p));
        }
    }

    #[test]
    fn sequencing_adds_counts(seed in any::<u64>(), kind in kind()) {
        let mut g = Gen::new(seed, GenConfig::default());
        let first_ty = g.comp_type();
        let mid = first_ty.output.clone();
        let last = g.memory_type(2);
        let second_ty = CompType::new(mid, last.clone());
        let n = g.term(&[], &first_ty, 4);
        let m = g.term(&[], &second_ty, 4);
        let sig = Signature::new();
        let ctx = Context::new();
        let fnn = interpret::<C>(kind, &check(&sig, &ctx, &n, &first_ty).unwrap(), &Valuation::new()).unwrap();
        let fm = interpret::<C>(kind, &check(&sig, &ctx, &m, &second_ty).unwrap(), &Valuation::new()).unwrap();
        let whole_ty = CompType::new(first_ty.input.clone(), last);
        let fw = interpret::<C>(kind, &check(&sig, &ctx, &sequence(&n, &m), &whole_ty).unwrap(), &Valuation::new()).unwrap();
        for p in probes(&first_ty.input) {
            let (i, u) = fnn.apply(p.clone()).unwrap();
            let (j, out) = fm.apply(u).unwrap();
            let (k, whole) = fw.apply(p).unwrap();
            prop_assert_eq!(k, i + j);
            prop_assert_eq!(whole.profile().unwrap(), out.profile().unwrap());
        }
    }

    #[test]
    fn interpretations_are_monotone_and_above_zero(seed in any::<u64>(), kind in kind()) {
        let mut g = Gen::new(seed, GenConfig::default());
        let s = g.sample_within(25);
        let d = check(&Signature::new(), &Context::new(), &s.term, &s.ty).unwrap();
        let f = interpret::<C>(kind, &d, &Valuation::new()).unwrap();
        let zero = zero_element::<C>(&s.ty.as_value());
        let [low, high] = probes(&s.ty.input);
        let (fl, fh) = (observe(&f, &low), observe(&f, &high));
        prop_assert!(dominates(&fh, &fl));
        prop_assert!(dominates(&fl, &observe(&zero, &low)));
        prop_assert!(dominates(&fh, &observe(&zero, &high)));
    }
}
