//! A reference call-by-value evaluator by substitution, for closed pure terms.

use super::{Lambda, Pattern};
use crate::TranslateError;

fn bind(p: &Pattern, v: &Lambda, body: Lambda) -> Result<Lambda, TranslateError> {
    match (p, v) {
        (Pattern::Var(x), _) => Ok(body.subst_closed(x, v)),
        (Pattern::Tuple(ps), Lambda::Tuple(vs)) if ps.len() == vs.len() => {
            ps.iter().zip(vs).try_fold(body, |b, (p, v)| bind(p, v, b))
        }
        _ => Err(TranslateError::IllTyped(format!(
            "value {v} does not match pattern {p}"
        ))),
    }
}

fn go(m: &Lambda, fuel: &mut u64) -> Result<Lambda, TranslateError> {
    match m {
        Lambda::VConst(_) | Lambda::Abs(..) => Ok(m.clone()),
        Lambda::Tuple(ms) => Ok(Lambda::Tuple(ms.iter().map(|n| go(n, fuel)).collect::<Result<_, _>>()?)),
        Lambda::App(f, n) => {
            let v = go(n, fuel)?;
            let f = go(f, fuel)?;
            match f {
                Lambda::Abs(p, _, body) => {
                    if *fuel == 0 {
                        return Err(TranslateError::FuelExhausted);
                    }
                    *fuel -= 1;
                    go(&bind(&p, &v, (*body).clone())?, fuel)
                }
                other => Err(TranslateError::IllTyped(format!("{other} applied as a function"))),
            }
        }
        Lambda::Var(x) => Err(TranslateError::IllTyped(format!(
            "free variable {x} in a closed evaluation"
        ))),
        Lambda::CConst(..) | Lambda::Choice(..) | Lambda::Assign(..) | Lambda::Read(_) => {
            Err(TranslateError::UnsupportedConstruct(format!(
                "the reference evaluator covers pure constant-free terms: {m}"
            )))
        }
    }
}

/// The call-by-value value of a closed term, taking at most `fuel` beta steps.
/// The argument is evaluated before the function, as in the machine translation.
pub fn cbv_eval(m: &Lambda, fuel: u64) -> Result<Lambda, TranslateError> {
    let mut fuel = fuel;
    go(m, &mut fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_lambda;

    #[test]
    fn values_are_reached() {
        let m = parse_lambda("(\\f:o -> o. \\x:o. f (f x)) (\\y:o. y) #c").unwrap();
        assert_eq!(cbv_eval(&m, 100).unwrap().to_string(), "#c");
        let k = parse_lambda("(\\x:o. \\y:o. x) #a").unwrap();
        assert_eq!(cbv_eval(&k, 100).unwrap().to_string(), "\\y:o. #a");
        assert_eq!(cbv_eval(&m, 1), Err(TranslateError::FuelExhausted));
    }
}
