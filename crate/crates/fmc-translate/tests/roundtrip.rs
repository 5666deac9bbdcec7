//! Round trips between the calculi.

use fmc_equiv::{EquivConfig, Tester, Verdict};
use fmc_gen::{Gen, GenConfig};
use fmc_term::{alpha_eq, sequence, Computation, Location, MemoryType};
use fmc_translate::lambda::{alpha_eq as lambda_alpha_eq, normalize};
use fmc_translate::lgen::{LGen, LGenConfig};
use fmc_translate::{
    collapse, collapse_comp_type, collapse_memory, context_inputs, embed, embed_comp_type, free_functor,
    interpret_slc_with, kappa, kappa_inv, slc_signature, LocationOrder,
};
use fmc_types::{check, CompType, Context};

const LAMBDA_TERMS: usize = 150;
const LAMBDA_SIZE: usize = 12;
const SLC_TERMS: usize = 150;
const MEMORY_TYPES: usize = 12;

#[test]
fn free_functor_then_interpretation_is_the_identity() {
    let mut g = LGen::new(11, LGenConfig::default());
    let sig = g.signature();
    let ssig = slc_signature(&sig).unwrap();
    for _ in 0..LAMBDA_TERMS {
        let (ctx, m, _) = g.sample(LAMBDA_SIZE);
        let (slc, ty) = free_functor(&sig, &ctx, &m).unwrap();
        check(&ssig, &Context::new(), &slc, &ty).unwrap_or_else(|e| panic!("{m} => {slc}: {e}"));
        let back = interpret_slc_with(&ssig, &slc, &ty, context_inputs(&ctx)).unwrap();
        let lhs = normalize(&sig, &ctx, &back).unwrap();
        let rhs = normalize(&sig, &ctx, &m).unwrap();
        assert!(
            lambda_alpha_eq(&lhs, &rhs),
            "{ctx} |- {m}\n  via {slc}\n  back {back}\n  {lhs} vs {rhs}"
        );
    }
}

fn slc_gen(seed: u64) -> Gen {
    Gen::new(
        seed,
        GenConfig::single_location()
            .with_base("o", &["a", "b"])
            .with_base("s", &["e"]),
    )
}

#[test]
fn embedding_then_collapse_is_the_identity() {
    let mut g = slc_gen(5);
    let sig = g.config().signature();
    let order: LocationOrder = "a,b".parse().unwrap();
    for at in ["a", "b"] {
        let at = Location::new(at);
        for _ in 0..SLC_TERMS {
            let s = g.sample_within(30);
            let e = embed(&s.term, &at, &sig, &order).unwrap();
            let ety = embed_comp_type(&s.ty, &at).unwrap();
            check(&sig, &Context::new(), &e, &ety).unwrap_or_else(|err| panic!("{e}: {err}"));
            let back = collapse(&sig, &e, &ety, &order).unwrap();
            assert!(alpha_eq(&back, &s.term), "{} => {e} => {back}", s.term);
        }
    }
}

fn equivalent(v: &Verdict) -> bool {
    matches!(v, Verdict::Equivalent { .. })
}

#[test]
fn kappa_and_its_inverse_compose_to_the_identity() {
    let mut g = Gen::new(9, GenConfig::default().with_base("o", &["a", "b"]));
    let sig = g.config().signature();
    let mut tester = Tester::new(&sig, EquivConfig::default());
    let mut tested = 0;
    let mut seen: Vec<MemoryType> = Vec::new();
    while tested < MEMORY_TYPES {
        let t = g.memory_type(1);
        if t.is_empty() || seen.contains(&t) {
            continue;
        }
        seen.push(t.clone());
        let order = LocationOrder::standard(&g.config().locations);
        let there = sequence(&kappa(&t, &order).unwrap(), &kappa_inv(&t, &order).unwrap());
        let ty = CompType::identity(t.clone());
        check(&sig, &Context::new(), &there, &ty).unwrap_or_else(|e| panic!("{there}: {e}"));
        let v = tester.equiv(&there, &Computation::Star, &ty).unwrap();
        assert!(equivalent(&v), "at {t}: {there} gives {v:?}");

        let flat = MemoryType::main(collapse_memory(&t, &order).unwrap());
        let back = sequence(&kappa_inv(&t, &order).unwrap(), &kappa(&t, &order).unwrap());
        let fty = CompType::identity(flat);
        check(&sig, &Context::new(), &back, &fty).unwrap_or_else(|e| panic!("{back}: {e}"));
        let v = tester.equiv(&back, &Computation::Star, &fty).unwrap();
        assert!(equivalent(&v), "at {t}: {back} gives {v:?}");
        tested += 1;
    }
}

#[test]
fn collapse_agrees_with_conjugation_by_kappa() {
    let mut g = Gen::new(21, GenConfig::default().with_base("o", &["a", "b"]));
    let sig = g.config().signature();
    let mut tester = Tester::new(&sig, EquivConfig::default());
    for _ in 0..60 {
        let s = g.sample_within(25);
        let order = LocationOrder::standard(&g.config().locations);
        let c = collapse(&sig, &s.term, &s.ty, &order).unwrap();
        let cty = collapse_comp_type(&s.ty, &order).unwrap();
        check(&sig, &Context::new(), &c, &cty).unwrap_or_else(|e| panic!("{} => {c}: {e}", s.term));
        let conj = sequence(
            &kappa_inv(&s.ty.input, &order).unwrap(),
            &sequence(&s.term, &kappa(&s.ty.output, &order).unwrap()),
        );
        let v = tester.equiv(&c, &conj, &cty).unwrap();
        assert!(equivalent(&v), "{} collapses to {c}: {v:?}", s.term);
    }
}
