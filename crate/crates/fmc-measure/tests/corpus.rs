use std::collections::BTreeMap;

use fmc_gen::{Gen, GenConfig, Sample};
use fmc_machine::{run, step_count, Memory};
use fmc_measure::{interpret, interpret_memory, measure, Count, CountBig, Kind, SemMem};
use fmc_rewrite::{normalize_observed, Reduction, Strategy};
use fmc_term::{size, Computation};
use fmc_types::{check, CompDerivation, CompType, Context, Signature};
use num_traits::ToPrimitive;

fn corpus(seed: u64, n: usize, max_size: usize) -> Vec<Sample> {
    let mut g = Gen::new(seed, GenConfig::default());
    (0..n).map(|_| g.sample_within(max_size)).collect()
}

fn derive(term: &Computation, ty: &CompType) -> CompDerivation {
    check(&Signature::new(), &Context::new(), term, ty).unwrap_or_else(|e| panic!("{term} : {ty}: {e}"))
}

fn measured<C: Count>(kind: Kind, s: &Sample) -> (C, SemMem<C>) {
    let d = derive(&s.term, &s.ty);
    let f = interpret::<C>(kind, &d, &Default::default()).unwrap();
    let input = interpret_memory(kind, &Signature::new(), &s.input, &s.ty.input).unwrap();
    f.apply(input).unwrap()
}

#[test]
fn weak_measure_counts_machine_steps() {
    for s in corpus(11, 200, 25) {
        let (n, out) = measured::<u64>(Kind::Weak, &s);
        let r = run(Memory::from_stacks(s.input.clone()), &s.term, 1 << 20).unwrap();
        assert_eq!(n, r.steps(), "{}", s.term);
        let finals: BTreeMap<_, _> =
            s.ty.output
                .locations()
                .map(|l| (l.clone(), r.memory.stack(l)))
                .collect();
        let expected = interpret_memory::<u64>(Kind::Weak, &Signature::new(), &finals, &s.ty.output).unwrap();
        assert_eq!(out.shape(), expected.shape());
        assert_eq!(out.profile().unwrap(), expected.profile().unwrap(), "{}", s.term);
    }
}

#[test]
fn strong_measure_is_enough_fuel() {
    for s in corpus(12, 200, 25) {
        let (n, _) = measured::<u64>(Kind::Strong, &s);
        let steps =
            step_count(Memory::from_stacks(s.input.clone()), &s.term, n).unwrap_or_else(|e| panic!("{}: {e}", s.term));
        assert!(steps <= n);
    }
}

#[test]
fn beta_decreases_and_pi_preserves_the_strong_collapse() {
    let ctx = Context::new();
    let mut betas = 0;
    for s in corpus(13, 100, 25) {
        let mut check_step = |before: &Computation, r: &fmc_rewrite::Redex, after: &Computation| {
            let m0: CountBig = measure(Kind::Strong, &ctx, &derive(before, &s.ty)).unwrap();
            let m1: CountBig = measure(Kind::Strong, &ctx, &derive(after, &s.ty)).unwrap();
            match r.rule {
                Reduction::Beta => {
                    betas += 1;
                    assert!(m0 > m1, "{before} -> {after}: {m0} <= {m1}");
                }
                Reduction::Pi => assert_eq!(m0, m1, "{before} -> {after}"),
                Reduction::Phi | Reduction::Tau => assert!(m0 >= m1, "{before} -> {after}"),
            }
        };
        normalize_observed(&s.term, Strategy::LeftmostOutermost, 10_000, &mut check_step).unwrap();
    }
    assert!(betas > 100);
}

#[test]
fn strong_collapse_bounds_reduction_length() {
    let ctx = Context::new();
    for s in corpus(14, 100, 25) {
        let bound: CountBig = measure(Kind::Strong, &ctx, &derive(&s.term, &s.ty)).unwrap();
        for strategy in [Strategy::LeftmostOutermost, Strategy::RightmostInnermost] {
            let nf = fmc_rewrite::normalize(&s.term, strategy, 100_000).unwrap();
            assert!(CountBig::from(nf.stats.beta) <= bound, "{}", s.term);
        }
        assert!(bound.to_u64().is_some());
        assert!(size(&s.term) <= 25);
    }
}
