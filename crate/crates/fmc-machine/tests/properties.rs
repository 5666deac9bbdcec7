//! Termination and compositionality of the machine on generated terms.

use fmc_gen::{Gen, GenConfig};
use fmc_machine::{run, Memory};
use fmc_term::sequence;
use fmc_types::CompType;
use proptest::prelude::*;

const FUEL: u64 = 1_000_000;

fn config() -> GenConfig {
    GenConfig::default().with_base("o", &["u", "v"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// A typed term on an input of its input type halts with an output of
    /// its output type, in shape.
    #[test]
    fn typed_terms_terminate(seed in any::<u64>()) {
        let s = Gen::new(seed, config()).sample();
        let r = run(Memory::from_stacks(s.input.clone()), &s.term, FUEL);
        prop_assert!(r.is_ok(), "{}: {:?}", s.term, r.err());
        let out = r.unwrap().memory;
        for (loc, st) in s.ty.output.iter() {
            prop_assert_eq!(out.depth(loc), st.len(), "{} at {}", s.term, loc);
        }
        prop_assert!(out.stacks().keys().all(|l| out.depth(l) == s.ty.output.stack(l).len()));
    }

    /// Running `M;N` is running `M` then `N`.
    #[test]
    fn sequencing_composes_runs(seed in any::<u64>()) {
        let mut g = Gen::new(seed, config());
        let s = g.sample();
        let next = CompType::new(s.ty.output.clone(), g.memory_type(1));
        let n = g.term(&[], &next, 4);
        let input = Memory::from_stacks(s.input.clone());
        let whole = run(input.clone(), &sequence(&s.term, &n), FUEL).unwrap();
        let first = run(input, &s.term, FUEL).unwrap();
        let second = run(first.memory.clone(), &n, FUEL).unwrap();
        prop_assert!(whole.memory.same_stacks(&second.memory), "{} ; {}", s.term, n);
        prop_assert_eq!(whole.steps(), first.steps() + second.steps());
    }
}
