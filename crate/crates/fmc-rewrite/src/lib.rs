//! Reduction for the functional machine calculus with values.
//!
//! ```text
//! [V]a.a<x>.M  ->beta  {V/x}M
//! [V]a.b<x>.M  ->pi    b<x>.[V]a.M        (a != b, x not free in V)
//! ?!N.M        ->phi   N;M
//! !?V          ->tau   V                  (on values: !{?V.*})
//! ```
//!
//! Rules apply in any context, including inside thunks and pushed values.
//! The identity law `<x>.[x] = *` is not a reduction.

mod path;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use fmc_term::{canonical, free_vars_value, max_index, rename, sequence, substitute, Computation, NameSupply, Value};
use thiserror::Error;

pub use path::{Dir, Focus, Path};

/// A reduction rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reduction {
    Beta,
    Pi,
    Phi,
    Tau,
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reduction::Beta => "beta",
            Reduction::Pi => "pi",
            Reduction::Phi => "phi",
            Reduction::Tau => "tau",
        })
    }
}

/// A redex: a rule and the address of the subterm it applies to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Redex {
    pub path: Path,
    pub rule: Reduction,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.rule, self.path)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RewriteError {
    #[error("no {0} redex at {1}")]
    InvalidRedex(Reduction, Path),
    #[error("fuel exhausted after {steps} reduction steps")]
    FuelExhausted { term: Computation, steps: u64 },
}

fn comp_redex(m: &Computation) -> Option<Reduction> {
    match m {
        Computation::Push(_, a, k) => match &**k {
            Computation::Pop(b, _, _) if a == b => Some(Reduction::Beta),
            Computation::Pop(..) => Some(Reduction::Pi),
            _ => None,
        },
        Computation::Force(Value::Thunk(_), _) => Some(Reduction::Phi),
        _ => None,
    }
}

fn is_tau(v: &Value) -> bool {
    matches!(v, Value::Thunk(n) if matches!(&**n, Computation::Force(_, k) if k.is_star()))
}

/// Every redex of `m`, in pre-order: a node before its value, its value
/// before its continuation.
pub fn find_redexes(m: &Computation) -> Vec<Redex> {
    let mut out = Vec::new();
    collect(m, Path::root(), &mut out);
    out
}

fn collect(m: &Computation, at: Path, out: &mut Vec<Redex>) {
    let mut path = at;
    let mut cur = m;
    loop {
        if let Some(rule) = comp_redex(cur) {
            out.push(Redex {
                path: path.clone(),
                rule,
            });
        }
        match cur {
            Computation::Push(v, _, _) | Computation::Force(v, _) => {
                let vp = path.child(Dir::Value);
                if is_tau(v) {
                    out.push(Redex {
                        path: vp.clone(),
                        rule: Reduction::Tau,
                    });
                }
                if let Value::Thunk(body) = v {
                    collect(body, vp.child(Dir::Body), out);
                }
            }
            _ => {}
        }
        match cur.continuation() {
            Some(k) => {
                path = path.child(Dir::Next);
                cur = k;
            }
            None => return,
        }
    }
}

/// Contract a redex.
pub fn apply(m: &Computation, redex: &Redex) -> Result<Computation, RewriteError> {
    let invalid = || RewriteError::InvalidRedex(redex.rule, redex.path.clone());
    path::replace_at(m, &redex.path.0, |focus| contract(focus, redex.rule)).ok_or_else(invalid)
}

fn contract(focus: Focus, rule: Reduction) -> Option<Focus> {
    match (rule, focus) {
        (Reduction::Tau, Focus::Val(v)) if is_tau(&v) => match v {
            Value::Thunk(n) => match &*n {
                Computation::Force(w, _) => Some(Focus::Val(w.clone())),
                _ => None,
            },
            _ => None,
        },
        (Reduction::Phi, Focus::Comp(Computation::Force(Value::Thunk(n), k))) => Some(Focus::Comp(sequence(&n, &k))),
        (Reduction::Beta, Focus::Comp(Computation::Push(v, a, k))) => match &*k {
            Computation::Pop(b, x, body) if a == *b => Some(Focus::Comp(substitute(&v, &x.var, body))),
            _ => None,
        },
        (Reduction::Pi, Focus::Comp(Computation::Push(v, a, k))) => match &*k {
            Computation::Pop(b, x, body) if a != *b => {
                let mut binder = x.clone();
                let mut body = (**body).clone();
                if free_vars_value(&v).contains(&x.var) {
                    let mut supply = NameSupply::above(max_index(&body).max(max_index(&Computation::push(
                        v.clone(),
                        a.clone(),
                        Computation::Star,
                    ))));
                    binder.var = supply.refresh(&x.var);
                    body = rename(&body, &x.var, &binder.var);
                }
                let pushed = Computation::push(v.clone(), a.clone(), body);
                Some(Focus::Comp(Computation::Pop(b.clone(), binder, pushed.into())))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Which redex to contract next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

impl Strategy {
    fn pick(self, redexes: Vec<Redex>) -> Option<Redex> {
        match self {
            Strategy::LeftmostOutermost => redexes.into_iter().next(),
            // The last redex in pre-order has no redex below it.
            Strategy::RightmostInnermost => redexes.into_iter().last(),
        }
    }
}

/// Steps taken per rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RewriteStats {
    pub beta: u64,
    pub pi: u64,
    pub phi: u64,
    pub tau: u64,
}

impl RewriteStats {
    pub fn total(&self) -> u64 {
        self.beta + self.pi + self.phi + self.tau
    }

    fn record(&mut self, r: Reduction) {
        match r {
            Reduction::Beta => self.beta += 1,
            Reduction::Pi => self.pi += 1,
            Reduction::Phi => self.phi += 1,
            Reduction::Tau => self.tau += 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub term: Computation,
    pub stats: RewriteStats,
}

/// Reduce until no redex is left, taking at most `fuel` steps.
pub fn normalize(m: &Computation, strategy: Strategy, fuel: u64) -> Result<NormalForm, RewriteError> {
    normalize_observed(m, strategy, fuel, &mut |_, _, _| {})
}

/// As `normalize`, calling `observe(before, redex, after)` at every step.
pub fn normalize_observed(
    m: &Computation,
    strategy: Strategy,
    fuel: u64,
    observe: &mut dyn FnMut(&Computation, &Redex, &Computation),
) -> Result<NormalForm, RewriteError> {
    let mut term = m.clone();
    let mut stats = RewriteStats::default();
    while let Some(redex) = strategy.pick(find_redexes(&term)) {
        if stats.total() >= fuel {
            return Err(RewriteError::FuelExhausted {
                term,
                steps: stats.total(),
            });
        }
        let next = apply(&term, &redex)?;
        observe(&term, &redex, &next);
        stats.record(redex.rule);
        term = next;
    }
    Ok(NormalForm { term, stats })
}

/// The result of exploring every reduction sequence.
#[derive(Clone, Debug)]
pub struct AllPaths {
    /// One representative per alpha-class of normal forms reached.
    pub normal_forms: Vec<Computation>,
    /// Distinct terms (up to alpha) visited.
    pub explored: usize,
    /// False if the bound stopped the search early.
    pub complete: bool,
}

/// Breadth-first search over all reducts, visiting at most `bound` distinct
/// terms up to alpha-equivalence.
pub fn all_paths(m: &Computation, bound: usize) -> AllPaths {
    let mut seen: HashSet<Computation> = HashSet::new();
    let mut normal: BTreeMap<String, Computation> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(canonical(m));
    queue.push_back(m.clone());
    let mut complete = true;
    while let Some(t) = queue.pop_front() {
        let redexes = find_redexes(&t);
        if redexes.is_empty() {
            normal.entry(canonical(&t).to_string()).or_insert(t);
            continue;
        }
        for r in redexes {
            let next = apply(&t, &r).expect("enumerated redexes apply");
            let key = canonical(&next);
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= bound {
                complete = false;
                continue;
            }
            seen.insert(key);
            queue.push_back(next);
        }
    }
    AllPaths {
        normal_forms: normal.into_values().collect(),
        explored: seen.len(),
        complete,
    }
}

/// The number of (push, later pop) pairs along every spine, thunk bodies
/// included. Each pi step lowers it by exactly one.
pub fn pi_measure(m: &Computation) -> u64 {
    let mut total = 0;
    let mut pushes = 0;
    let mut cur = m;
    loop {
        match cur {
            Computation::Star => return total,
            Computation::Pop(_, _, k) => {
                total += pushes;
                cur = k;
            }
            Computation::Push(v, _, k) | Computation::Force(v, k) => {
                if matches!(cur, Computation::Push(..)) {
                    pushes += 1;
                }
                if let Value::Thunk(n) = v {
                    total += pi_measure(n);
                }
                cur = k;
            }
            Computation::Const(_, k) => cur = k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fmc_term::{Location, VarName};

    fn v(x: &str) -> Value {
        Value::var(x)
    }

    #[test]
    fn beta_at_root() {
        let a = Location::new("a");
        let m = Computation::push(
            v("V"),
            a.clone(),
            Computation::pop(a, VarName::new("x"), Computation::force(v("x"), Computation::Star)),
        );
        let rs = find_redexes(&m);
        assert_eq!(
            rs,
            vec![Redex {
                path: Path::root(),
                rule: Reduction::Beta
            }]
        );
        assert_eq!(
            apply(&m, &rs[0]).unwrap(),
            Computation::force(v("V"), Computation::Star)
        );
        assert!(find_redexes(&Computation::Star).is_empty());
    }

    #[test]
    fn tau_on_values() {
        let m = Computation::push_main(
            Value::thunk(Computation::force(v("w"), Computation::Star)),
            Computation::Star,
        );
        let rs = find_redexes(&m);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].rule, Reduction::Tau);
        assert_eq!(
            apply(&m, &rs[0]).unwrap(),
            Computation::push_main(v("w"), Computation::Star)
        );
    }

    #[test]
    fn pi_freshens_a_capturing_binder() {
        let (a, b) = (Location::new("a"), Location::new("b"));
        let x = VarName::new("x");
        let m = Computation::push(
            v("x"),
            a.clone(),
            Computation::pop(b.clone(), x.clone(), Computation::push_main(v("x"), Computation::Star)),
        );
        let out = apply(
            &m,
            &Redex {
                path: Path::root(),
                rule: Reduction::Pi,
            },
        )
        .unwrap();
        assert_eq!(out.to_string(), "b<x'1>.[x]a.[x'1]");
        assert_eq!(pi_measure(&m), 1);
        assert_eq!(pi_measure(&out), 0);
    }

    #[test]
    fn stale_redex_is_rejected() {
        let m = Computation::Star;
        let r = Redex {
            path: Path::root(),
            rule: Reduction::Beta,
        };
        assert_eq!(
            apply(&m, &r),
            Err(RewriteError::InvalidRedex(Reduction::Beta, Path::root()))
        );
    }
}
