//! Structural properties of the type system on generated terms.

use fmc_gen::{Gen, GenConfig};
use fmc_rewrite::{apply, find_redexes};
use fmc_types::{check, infer, Context, Signature};
use proptest::prelude::*;

fn config() -> GenConfig {
    GenConfig::default().with_base("o", &["u", "v"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Every one-step reduct keeps the type.
    #[test]
    fn subject_reduction(seed in any::<u64>()) {
        let mut g = Gen::new(seed, config());
        let sig = g.config().signature();
        let s = g.sample_within(30);
        for r in find_redexes(&s.term) {
            let n = apply(&s.term, &r).unwrap();
            let res = check(&sig, &Context::new(), &n, &s.ty);
            prop_assert!(res.is_ok(), "{} -> {} at {}: {:?}", s.term, n, s.ty, res.err());
        }
    }

    /// Unused variables in the context do not matter.
    #[test]
    fn weakening(seed in any::<u64>()) {
        let mut g = Gen::new(seed, config());
        let sig = g.config().signature();
        let s = g.sample();
        let t = g.value_type(2);
        let res = check(&sig, &Context::new().with("unused", t), &s.term, &s.ty);
        prop_assert!(res.is_ok(), "{:?}", res.err());
    }

    /// A term typed `A > B` is also typed `CA > CB` for any memory type `C`.
    #[test]
    fn expansion(seed in any::<u64>()) {
        let mut g = Gen::new(seed, config());
        let sig = g.config().signature();
        let s = g.sample();
        let c = g.memory_type(1);
        let wide = s.ty.expand(&c);
        let res = check(&sig, &Context::new(), &s.term, &wide);
        prop_assert!(res.is_ok(), "{} at {}: {:?}", s.term, wide, res.err());
    }

    /// An inferred type is one the term checks against.
    #[test]
    fn inference_is_checkable(seed in any::<u64>()) {
        let mut g = Gen::new(seed, config());
        let sig = g.config().signature();
        let s = g.sample();
        if let Ok(d) = infer(&sig, &Context::new(), &s.term) {
            prop_assert!(check(&sig, &Context::new(), &s.term, d.ty()).is_ok());
        }
    }
}

#[test]
fn empty_signature_rejects_constants() {
    let mut g = Gen::new(7, config());
    let s = (0..200)
        .map(|_| g.sample())
        .find(|s| s.term.to_string().contains('#'))
        .unwrap();
    assert!(check(&Signature::new(), &Context::new(), &s.term, &s.ty).is_err());
}
