use crate::{Binder, Computation, Value, VarName};

/// Alpha-equivalence of computations. Binder annotations are ignored.
pub fn alpha_eq(m: &Computation, n: &Computation) -> bool {
    Alpha::default().comp(m, n)
}

/// Alpha-equivalence of values.
pub fn alpha_eq_value(v: &Value, w: &Value) -> bool {
    Alpha::default().value(v, w)
}

#[derive(Default)]
struct Alpha {
    left: Vec<VarName>,
    right: Vec<VarName>,
}

impl Alpha {
    fn lookup(stack: &[VarName], x: &VarName) -> Option<usize> {
        stack.iter().rposition(|y| y == x)
    }

    fn comp(&mut self, m: &Computation, n: &Computation) -> bool {
        let mark = self.left.len();
        let mut m = m;
        let mut n = n;
        let result = loop {
            match (m, n) {
                (Computation::Star, Computation::Star) => break true,
                (Computation::Const(c, k), Computation::Const(d, l)) if c == d => {
                    m = k;
                    n = l;
                }
                (Computation::Push(v, a, k), Computation::Push(w, b, l)) if a == b => {
                    if !self.value(v, w) {
                        break false;
                    }
                    m = k;
                    n = l;
                }
                (Computation::Force(v, k), Computation::Force(w, l)) => {
                    if !self.value(v, w) {
                        break false;
                    }
                    m = k;
                    n = l;
                }
                (Computation::Pop(a, x, k), Computation::Pop(b, y, l)) if a == b => {
                    self.left.push(x.var.clone());
                    self.right.push(y.var.clone());
                    m = k;
                    n = l;
                }
                _ => break false,
            }
        };
        self.left.truncate(mark);
        self.right.truncate(mark);
        result
    }

    fn value(&mut self, v: &Value, w: &Value) -> bool {
        match (v, w) {
            (Value::Var(x), Value::Var(y)) => match (Self::lookup(&self.left, x), Self::lookup(&self.right, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            },
            (Value::Const(c), Value::Const(d)) => c == d,
            (Value::Thunk(m), Value::Thunk(n)) => self.comp(m, n),
            _ => false,
        }
    }
}

/// A representative of the alpha-class: binders are renamed in order of
/// appearance to names that the parser never produces, and annotations are
/// dropped. Two terms are alpha-equivalent iff their canonical forms are equal.
pub fn canonical(m: &Computation) -> Computation {
    let mut next = 0;
    canon_comp(m, &mut Vec::new(), &mut next)
}

const CANON_BASE: &str = "%";

fn canon_comp(m: &Computation, env: &mut Vec<(VarName, VarName)>, next: &mut u32) -> Computation {
    let mark = env.len();
    let mut spine = Vec::new();
    let mut m = m;
    loop {
        match m {
            Computation::Star => break,
            Computation::Const(c, k) => {
                spine.push(Computation::Const(c.clone(), Default::default()));
                m = k;
            }
            Computation::Push(v, a, k) => {
                spine.push(Computation::Push(
                    canon_value(v, env, next),
                    a.clone(),
                    Default::default(),
                ));
                m = k;
            }
            Computation::Force(v, k) => {
                spine.push(Computation::Force(canon_value(v, env, next), Default::default()));
                m = k;
            }
            Computation::Pop(a, b, k) => {
                let fresh = VarName::indexed(CANON_BASE, *next);
                *next += 1;
                env.push((b.var.clone(), fresh.clone()));
                spine.push(Computation::Pop(a.clone(), Binder::new(fresh), Default::default()));
                m = k;
            }
        }
    }
    env.truncate(mark);
    spine
        .into_iter()
        .rev()
        .fold(Computation::Star, |acc, action| action.with_continuation(acc))
}

fn canon_value(v: &Value, env: &mut Vec<(VarName, VarName)>, next: &mut u32) -> Value {
    match v {
        Value::Var(x) => match env.iter().rev().find(|(y, _)| y == x) {
            Some((_, z)) => Value::Var(z.clone()),
            None => v.clone(),
        },
        Value::Const(_) => v.clone(),
        Value::Thunk(m) => Value::thunk(canon_comp(m, env, next)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Location;

    fn pop_push(x: &str, y: &str) -> Computation {
        Computation::pop_main(
            VarName::new(x),
            Computation::push_main(Value::var(y), Computation::Star),
        )
    }

    #[test]
    fn renaming_binders_preserves_alpha() {
        assert!(alpha_eq(&pop_push("x", "x"), &pop_push("y", "y")));
        assert!(!alpha_eq(&pop_push("x", "x"), &pop_push("x", "z")));
        assert!(alpha_eq(&pop_push("x", "z"), &pop_push("y", "z")));
        assert_eq!(canonical(&pop_push("x", "x")), canonical(&pop_push("y", "y")));
    }

    #[test]
    fn locations_matter() {
        let m = Computation::pop(Location::new("a"), VarName::new("x"), Computation::Star);
        let n = Computation::pop(Location::new("b"), VarName::new("x"), Computation::Star);
        assert!(!alpha_eq(&m, &n));
    }

    #[test]
    fn shadowing_is_respected() {
        // <x>.<x>.[x]  vs  <x>.<y>.[x]
        let m = Computation::pop_main(VarName::new("x"), pop_push("x", "x"));
        let n = Computation::pop_main(VarName::new("x"), pop_push("y", "x"));
        assert!(!alpha_eq(&m, &n));
        assert_ne!(canonical(&m), canonical(&n));
    }
}
