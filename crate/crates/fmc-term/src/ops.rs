use std::collections::BTreeSet;

use crate::{Binder, Computation, NameSupply, Value, VarName};

/// Free variables of a computation.
pub fn free_vars(m: &Computation) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    fv_comp(m, &mut Vec::new(), &mut out);
    out
}

/// Free variables of a value.
pub fn free_vars_value(v: &Value) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    fv_value(v, &mut Vec::new(), &mut out);
    out
}

fn fv_comp(m: &Computation, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
    let mark = bound.len();
    let mut m = m;
    loop {
        match m {
            Computation::Star => break,
            Computation::Const(_, k) => m = k,
            Computation::Push(v, _, k) | Computation::Force(v, k) => {
                fv_value(v, bound, out);
                m = k;
            }
            Computation::Pop(_, b, k) => {
                bound.push(b.var.clone());
                m = k;
            }
        }
    }
    bound.truncate(mark);
}

fn fv_value(v: &Value, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
    match v {
        Value::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Value::Const(_) => {}
        Value::Thunk(m) => fv_comp(m, bound, out),
    }
}

/// True when `x` occurs free in `m`.
pub fn occurs_free(x: &VarName, m: &Computation) -> bool {
    let mut m = m;
    loop {
        match m {
            Computation::Star => return false,
            Computation::Const(_, k) => m = k,
            Computation::Push(v, _, k) | Computation::Force(v, k) => {
                if occurs_free_value(x, v) {
                    return true;
                }
                m = k;
            }
            Computation::Pop(_, b, k) => {
                if &b.var == x {
                    return false;
                }
                m = k;
            }
        }
    }
}

fn occurs_free_value(x: &VarName, v: &Value) -> bool {
    match v {
        Value::Var(y) => x == y,
        Value::Const(_) => false,
        Value::Thunk(m) => occurs_free(x, m),
    }
}

/// Largest freshness index of any variable name in the term.
pub fn max_index(m: &Computation) -> u32 {
    let mut best = 0;
    let mut m = m;
    loop {
        match m {
            Computation::Star => return best,
            Computation::Const(_, k) => m = k,
            Computation::Push(v, _, k) | Computation::Force(v, k) => {
                best = best.max(max_index_value(v));
                m = k;
            }
            Computation::Pop(_, b, k) => {
                best = best.max(b.var.index());
                m = k;
            }
        }
    }
}

fn max_index_value(v: &Value) -> u32 {
    match v {
        Value::Var(x) => x.index(),
        Value::Const(_) => 0,
        Value::Thunk(m) => max_index(m),
    }
}

/// Number of constructors: actions, values and the final `*`.
pub fn size(m: &Computation) -> usize {
    let mut n = 0;
    let mut m = m;
    loop {
        match m {
            Computation::Star => return n + 1,
            Computation::Const(_, k) | Computation::Pop(_, _, k) => {
                n += 1;
                m = k;
            }
            Computation::Push(v, _, k) | Computation::Force(v, k) => {
                n += 1 + size_value(v);
                m = k;
            }
        }
    }
}

fn size_value(v: &Value) -> usize {
    match v {
        Value::Var(_) | Value::Const(_) => 1,
        Value::Thunk(m) => 1 + size(m),
    }
}

/// Capture-avoiding substitution `{V/x}M`.
///
/// Binders of `M` that would capture a free variable of `V` are renamed to
/// fresh names drawn above every index occurring in `V` and `M`.
pub fn substitute(v: &Value, x: &VarName, m: &Computation) -> Computation {
    if !occurs_free(x, m) {
        return m.clone();
    }
    let mut supply = NameSupply::above(max_index_value(v).max(max_index(m)).max(x.index()));
    let fv = free_vars_value(v);
    Subst { v, x, fv: &fv }.comp(m, &mut supply)
}

/// Capture-avoiding substitution into a value.
pub fn substitute_value(v: &Value, x: &VarName, target: &Value) -> Value {
    match target {
        Value::Var(y) if y == x => v.clone(),
        Value::Var(_) | Value::Const(_) => target.clone(),
        Value::Thunk(m) => Value::thunk(substitute(v, x, m)),
    }
}

/// Rename the free occurrences of `from` to `to`.
pub fn rename(m: &Computation, from: &VarName, to: &VarName) -> Computation {
    substitute(&Value::Var(to.clone()), from, m)
}

struct Subst<'a> {
    v: &'a Value,
    x: &'a VarName,
    fv: &'a BTreeSet<VarName>,
}

impl Subst<'_> {
    fn comp(&self, m: &Computation, supply: &mut NameSupply) -> Computation {
        // Collect the spine, then rebuild from the end.
        let mut spine: Vec<Computation> = Vec::new();
        let mut cur = m.clone();
        let tail = loop {
            match &cur {
                Computation::Star => break Computation::Star,
                Computation::Const(_, k) => {
                    let k = (**k).clone();
                    spine.push(cur.clone());
                    cur = k;
                }
                Computation::Push(w, a, k) => {
                    let k = (**k).clone();
                    spine.push(Computation::Push(self.value(w, supply), a.clone(), Default::default()));
                    cur = k;
                }
                Computation::Force(w, k) => {
                    let k = (**k).clone();
                    spine.push(Computation::Force(self.value(w, supply), Default::default()));
                    cur = k;
                }
                Computation::Pop(a, b, k) => {
                    if &b.var == self.x || !occurs_free(self.x, k) {
                        break cur.clone();
                    }
                    if self.fv.contains(&b.var) {
                        let fresh = supply.refresh(&b.var);
                        let renamed = rename(k, &b.var, &fresh);
                        supply.reserve(max_index(&renamed));
                        let binder = Binder {
                            var: fresh,
                            ann: b.ann.clone(),
                        };
                        spine.push(Computation::Pop(a.clone(), binder, Default::default()));
                        cur = renamed;
                    } else {
                        spine.push(Computation::Pop(a.clone(), b.clone(), Default::default()));
                        cur = (**k).clone();
                    }
                }
            }
        };
        spine
            .into_iter()
            .rev()
            .fold(tail, |acc, action| action.with_continuation(acc))
    }

    fn value(&self, w: &Value, supply: &mut NameSupply) -> Value {
        match w {
            Value::Var(y) if y == self.x => self.v.clone(),
            Value::Var(_) | Value::Const(_) => w.clone(),
            Value::Thunk(n) => {
                if occurs_free(self.x, n) {
                    Value::thunk(self.comp(n, supply))
                } else {
                    w.clone()
                }
            }
        }
    }
}

/// Capture-avoiding sequencing `N;M`.
///
/// The trailing `*` of `first` is replaced by `second`; binders of `first`
/// that are free in `second` are renamed first.
pub fn sequence(first: &Computation, second: &Computation) -> Computation {
    if second.is_star() {
        return first.clone();
    }
    let fv = free_vars(second);
    let mut supply = NameSupply::above(max_index(first).max(max_index(second)));
    let mut spine: Vec<Computation> = Vec::new();
    let mut cur = first.clone();
    loop {
        match &cur {
            Computation::Star => break,
            Computation::Pop(a, b, k) if fv.contains(&b.var) => {
                let fresh = supply.refresh(&b.var);
                let renamed = rename(k, &b.var, &fresh);
                supply.reserve(max_index(&renamed));
                let binder = Binder {
                    var: fresh,
                    ann: b.ann.clone(),
                };
                spine.push(Computation::Pop(a.clone(), binder, Default::default()));
                cur = renamed;
            }
            other => {
                let k = other.continuation().expect("not star").clone();
                spine.push(other.clone());
                cur = k;
            }
        }
    }
    spine
        .into_iter()
        .rev()
        .fold(second.clone(), |acc, action| action.with_continuation(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{alpha_eq, Location};

    fn x() -> VarName {
        VarName::new("x")
    }

    fn y() -> VarName {
        VarName::new("y")
    }

    fn a() -> Location {
        Location::new("a")
    }

    fn b() -> Location {
        Location::new("b")
    }

    #[test]
    fn free_vars_follow_binders() {
        // a<x>.[x]a
        let m = Computation::pop(a(), x(), Computation::push(Value::Var(x()), a(), Computation::Star));
        assert!(free_vars(&m).is_empty());
        assert!(free_vars(&Computation::Star).is_empty());
        // [y]a.?x
        let m = Computation::push(
            Value::Var(y()),
            a(),
            Computation::force(Value::Var(x()), Computation::Star),
        );
        assert_eq!(free_vars(&m), [x(), y()].into_iter().collect());
    }

    #[test]
    fn substitution_at_variable() {
        let m = Computation::force(Value::var("f"), Computation::Star);
        let out = substitute(&Value::thunk(Computation::Star), &VarName::new("f"), &m);
        assert_eq!(
            out,
            Computation::force(Value::thunk(Computation::Star), Computation::Star)
        );
    }

    #[test]
    fn substitution_under_unrelated_binder() {
        // {V/x} a<y>.[x]b
        let m = Computation::pop(a(), y(), Computation::push(Value::Var(x()), b(), Computation::Star));
        let v = Value::constant("v");
        let out = substitute(&v, &x(), &m);
        let expected = Computation::pop(a(), y(), Computation::push(v, b(), Computation::Star));
        assert_eq!(out, expected);
    }

    #[test]
    fn substitution_freshens_capturing_binder() {
        // {y/x} a<y>.[x]a  ==>  a<y'>.[y]a
        let m = Computation::pop(a(), y(), Computation::push(Value::Var(x()), a(), Computation::Star));
        let out = substitute(&Value::Var(y()), &x(), &m);
        match &out {
            Computation::Pop(_, binder, k) => {
                assert_ne!(binder.var, y());
                assert_eq!(**k, Computation::push(Value::Var(y()), a(), Computation::Star));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(free_vars(&out).contains(&y()));
    }

    #[test]
    fn sequencing_units_and_renaming() {
        let m = Computation::pop(a(), x(), Computation::push(Value::Var(x()), b(), Computation::Star));
        assert_eq!(sequence(&Computation::Star, &m), m);
        assert_eq!(sequence(&m, &Computation::Star), m);

        // ([v]a ; a<x>) ; [x]b  versus  [v]a ; (a<x> ; [x]b)
        let v = Value::constant("v");
        let p = Computation::push(v.clone(), a(), Computation::Star);
        let q = Computation::pop(a(), x(), Computation::Star);
        let r = Computation::push(Value::Var(x()), b(), Computation::Star);
        let left = sequence(&sequence(&p, &q), &r);
        let right = sequence(&p, &sequence(&q, &r));
        assert!(alpha_eq(&left, &right));
        // The binder must not capture the free x of the second term.
        assert!(free_vars(&left).contains(&x()));
    }
}
