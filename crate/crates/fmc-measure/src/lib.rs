//! Quantitative interpretations of typed terms.
//!
//! A value of type `?s_A > !t_A` is read as a monotone functional from an
//! interpretation of `s_A` to a count paired with an interpretation of
//! `t_A`. Base types are read as the empty arrow `(>)`.
//!
//! ```text
//! [*](t)             = (0, t)
//! [a<x>.M](s, a(r))  = (1+n, t)          (n, t) = [M]{x <- r}(s)
//! [[V]a.M](s)        = (1+n+|[V]|, t)    (n, t) = [M](s, a([V]))     strong
//! [[V]a.M](s)        = (1+n, t)                                       weak
//! [?V.M](s, r)       = (n+m, t)          (n, u) = [V](r), (m, t) = [M](s, u)
//! |f|                = count of f at the least input
//! ```
//!
//! A forced thunk `?!N.M` is read as `N;M`, which is what the sequencing
//! of the clauses above gives. The strong collapse bounds the length of
//! every reduction sequence; the weak one is the exact machine step count.

mod count;
mod interp;
mod sem;

use std::collections::BTreeMap;

use fmc_term::{Location, MemoryType, Symbol, Value, VarName};
use fmc_types::{check_value, CompDerivation, Context, Signature, TypeError, ValueDerivation};
use thiserror::Error;

pub use count::{Count, Count64, CountBig};
pub use sem::{zero_element, Applied, SemFun, SemMem};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeasureError {
    #[error("constant {0} is outside the fragment the measure covers")]
    OutOfFragment(Symbol),
    #[error("derivation does not match its use: {0}")]
    DerivationMismatch(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Which interpretation: the strong one adds the collapse of every pushed
/// value to the count, the weak one does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Strong,
    Weak,
}

impl std::str::FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Kind, String> {
        match s {
            "strong" => Ok(Kind::Strong),
            "weak" => Ok(Kind::Weak),
            other => Err(format!("unknown measure kind `{other}`, expected strong or weak")),
        }
    }
}

/// An assignment of functionals to variables.
#[derive(Clone, Debug)]
pub struct Valuation<C: Count>(BTreeMap<VarName, SemFun<C>>);

impl<C: Count> Default for Valuation<C> {
    fn default() -> Self {
        Valuation(BTreeMap::new())
    }
}

impl<C: Count> Valuation<C> {
    pub fn new() -> Valuation<C> {
        Valuation::default()
    }

    /// The least valuation: the zero element for every variable of `ctx`.
    pub fn least(ctx: &Context) -> Valuation<C> {
        Valuation(ctx.0.iter().map(|(x, t)| (x.clone(), zero_element(t))).collect())
    }

    pub fn with(mut self, x: &VarName, f: SemFun<C>) -> Valuation<C> {
        self.0.insert(x.clone(), f);
        self
    }

    pub fn get(&self, x: &VarName) -> Option<&SemFun<C>> {
        self.0.get(x)
    }
}

/// Interpret a typed computation as a functional at its type.
pub fn interpret<C: Count>(kind: Kind, d: &CompDerivation, v: &Valuation<C>) -> Result<SemFun<C>, MeasureError> {
    let code = interp::compile(d)?;
    Ok(interp::closure(d.ty().as_value(), code, v.0.clone(), kind))
}

pub fn interpret_strong<C: Count>(d: &CompDerivation, v: &Valuation<C>) -> Result<SemFun<C>, MeasureError> {
    interpret(Kind::Strong, d, v)
}

pub fn interpret_weak<C: Count>(d: &CompDerivation, v: &Valuation<C>) -> Result<SemFun<C>, MeasureError> {
    interpret(Kind::Weak, d, v)
}

/// Interpret a typed value.
pub fn interpret_value<C: Count>(kind: Kind, d: &ValueDerivation, v: &Valuation<C>) -> Result<SemFun<C>, MeasureError> {
    match interp::compile_value(d)? {
        interp::Val::Var(x) => v
            .get(&x)
            .cloned()
            .ok_or_else(|| MeasureError::DerivationMismatch(format!("no value for {x}"))),
        interp::Val::Thunk(ty, code) => Ok(interp::closure(ty, code, v.0.clone(), kind)),
    }
}

/// Interpret closed values filling a memory of type `ty`, bottom first.
pub fn interpret_memory<C: Count>(
    kind: Kind,
    sig: &Signature,
    values: &BTreeMap<Location, Vec<Value>>,
    ty: &MemoryType,
) -> Result<SemMem<C>, MeasureError> {
    let mut mem = SemMem::new();
    for (loc, s) in ty.iter() {
        let vals = values.get(loc).map_or(&[][..], Vec::as_slice);
        if vals.len() != s.len() {
            return Err(MeasureError::DerivationMismatch(format!(
                "{} values at {loc} for {} slots",
                vals.len(),
                s.len()
            )));
        }
        for (val, t) in vals.iter().zip(&s.0) {
            let d = check_value(sig, &Context::new(), val, t)?;
            mem.push(loc, interpret_value(kind, &d, &Valuation::new())?);
        }
    }
    Ok(mem)
}

/// The count of a functional at the least input of its type.
pub fn collapse_measure<C: Count>(f: &SemFun<C>) -> Result<C, MeasureError> {
    f.collapse()
}

/// The collapse of a typed term under the least valuation of `ctx`.
pub fn measure<C: Count>(kind: Kind, ctx: &Context, d: &CompDerivation) -> Result<C, MeasureError> {
    interpret(kind, d, &Valuation::least(ctx))?.collapse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fmc_term::ValueType;
    use fmc_types::infer;
    use num_traits::Zero;

    fn deriv(src: &str) -> CompDerivation {
        infer(&Signature::new(), &Context::new(), &fmc_surface::parse(src).unwrap()).unwrap()
    }

    #[test]
    fn star_is_the_identity_at_count_zero() {
        let f: SemFun<u64> = interpret_strong(&deriv("*"), &Valuation::new()).unwrap();
        let input = SemMem::zero(&MemoryType::main(vec![ValueType::main_arrow(vec![], vec![])]));
        let (n, out) = f.apply(input).unwrap();
        assert_eq!(n, 0);
        assert_eq!(out.depth(), 1);
    }

    #[test]
    fn identity_pair_collapses_to_two() {
        assert_eq!(
            measure::<u64>(Kind::Strong, &Context::new(), &deriv("<x>.[x]")).unwrap(),
            2
        );
        assert_eq!(
            measure::<u64>(Kind::Weak, &Context::new(), &deriv("<x>.[x]")).unwrap(),
            2
        );
    }

    #[test]
    fn weak_omits_the_argument() {
        assert_eq!(
            measure::<u64>(Kind::Weak, &Context::new(), &deriv("[!{*}].<x>")).unwrap(),
            2
        );
        assert_eq!(
            measure::<u64>(Kind::Strong, &Context::new(), &deriv("[!{*}].<x>")).unwrap(),
            2
        );
        let f: SemFun<CountBig> = interpret_weak(&deriv("[!{*}]a.*"), &Valuation::new()).unwrap();
        let (n, out) = f.apply(SemMem::new()).unwrap();
        assert_eq!(n, CountBig::from(1u32));
        assert!(out.profile().unwrap()[0].is_zero());
    }

    #[test]
    fn zero_elements_collapse_to_zero() {
        let t = ValueType::main_arrow(vec![ValueType::main_arrow(vec![], vec![])], vec![ValueType::base("o")]);
        let z = zero_element::<u64>(&t);
        assert_eq!(z.collapse().unwrap(), 0);
        let (n, out) = z
            .apply(SemMem::zero(&MemoryType::main(vec![ValueType::main_arrow(
                vec![],
                vec![],
            )])))
            .unwrap();
        assert_eq!(n, 0);
        assert_eq!(out.shape(), MemoryType::main(vec![ValueType::base("o")]));
        assert_eq!(z.bumped(3).collapse().unwrap(), 3);
    }

    #[test]
    fn constants_are_out_of_fragment() {
        let sig = Signature::new().with_base("o").with_value("k", ValueType::base("o"));
        let m = fmc_term::Computation::push_main(Value::constant("k"), fmc_term::Computation::Star);
        let d = infer(&sig, &Context::new(), &m).unwrap();
        assert_eq!(
            measure::<u64>(Kind::Strong, &Context::new(), &d),
            Err(MeasureError::OutOfFragment(Symbol::new("k")))
        );
    }
}
