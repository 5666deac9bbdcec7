//! The equational theory of the calculus and bounded machine equivalence.
//!
//! Two closed computations are machine equivalent at `?s_A > !t_A` when
//! equivalent inputs give equivalent outputs; base values are equivalent
//! when identical, thunks when forcing them is equivalent. The tester
//! approximates the relation from below: inputs range over a finite basis
//! per type, and thunk outputs are compared up to a nesting depth.
//! A `Distinguished` verdict always carries a separating input.

mod axioms;
mod basis;
mod report;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use fmc_machine::{run, Memory, RunError};
use fmc_term::{alpha_eq_value, Computation, Location, Value, ValueType};
use fmc_types::{check, CompType, Context, Signature, TypeError};
use thiserror::Error;

pub use axioms::{
    derived_global_beta, generate_instances, instantiate_axiom, theory_signature, Axiom, AxiomInstance, Params,
};
pub use report::{validate_theory, AxiomTally, Report};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EquivError {
    #[error("{side} is ill-typed: {error}")]
    IllTyped { side: String, error: TypeError },
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("missing parameter {0}")]
    MissingParameter(&'static str),
    #[error("typed term got stuck: {0}")]
    Stuck(String),
}

/// Bounds for the equivalence test.
#[derive(Clone, Debug)]
pub struct EquivConfig {
    /// Nesting depth for comparing thunk outputs; at depth 1 thunk outputs
    /// are not inspected.
    pub depth: usize,
    /// Machine fuel per run.
    pub fuel: u64,
    /// Input memories tried per comparison; larger products are sampled
    /// at evenly spaced indices.
    pub max_inputs: usize,
    /// Generated values per arrow type, beyond the canonical inhabitant.
    pub basis_size: usize,
    /// Generator budget for basis values.
    pub basis_budget: usize,
    pub seed: u64,
}

impl Default for EquivConfig {
    fn default() -> EquivConfig {
        EquivConfig {
            depth: 2,
            fuel: 100_000,
            max_inputs: 48,
            basis_size: 3,
            basis_budget: 3,
            seed: 0,
        }
    }
}

/// A separating input and what differed.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub input: BTreeMap<Location, Vec<Value>>,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "input {}: {}", show_memory(&self.input), self.detail)
    }
}

fn show_memory(m: &BTreeMap<Location, Vec<Value>>) -> String {
    let parts: Vec<String> = m
        .iter()
        .filter(|(_, vs)| !vs.is_empty())
        .map(|(l, vs)| {
            format!(
                "{}[{}]",
                l,
                vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            )
        })
        .collect();
    if parts.is_empty() {
        "ε".to_string()
    } else {
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Equivalent { inputs_tested: usize, exhaustive: bool },
    Distinguished { witness: Witness, inputs_tested: usize },
    Inconclusive { reason: String, inputs_tested: usize },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Equivalent { .. } => "equivalent",
            Verdict::Distinguished { .. } => "distinguished",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_distinguished(&self) -> bool {
        matches!(self, Verdict::Distinguished { .. })
    }

    pub fn inputs_tested(&self) -> usize {
        match self {
            Verdict::Equivalent { inputs_tested, .. }
            | Verdict::Distinguished { inputs_tested, .. }
            | Verdict::Inconclusive { inputs_tested, .. } => *inputs_tested,
        }
    }

    /// `{"verdict": ..., "witness": ..., "inputs-tested": n}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut out = serde_json::json!({
            "verdict": self.tag(),
            "inputs-tested": self.inputs_tested(),
        });
        match self {
            Verdict::Distinguished { witness, .. } => {
                let input: serde_json::Map<String, serde_json::Value> = witness
                    .input
                    .iter()
                    .map(|(l, vs)| (l.name().to_string(), vs.iter().map(|v| v.to_string()).collect()))
                    .collect();
                out["witness"] = serde_json::json!({ "input": input, "detail": witness.detail });
            }
            Verdict::Inconclusive { reason, .. } => out["reason"] = reason.clone().into(),
            Verdict::Equivalent { exhaustive, .. } => out["exhaustive"] = (*exhaustive).into(),
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equivalent {
                inputs_tested,
                exhaustive,
            } => {
                write!(
                    f,
                    "equivalent ({inputs_tested} inputs{})",
                    if *exhaustive { "" } else { ", sampled" }
                )
            }
            Verdict::Distinguished { witness, .. } => write!(f, "distinguished by {witness}"),
            Verdict::Inconclusive { reason, .. } => write!(f, "inconclusive: {reason}"),
        }
    }
}

enum Cmp {
    Same,
    Differ(String),
    Unknown(String),
}

/// A machine-equivalence tester with a cache of input bases.
pub struct Tester<'a> {
    sig: &'a Signature,
    cfg: EquivConfig,
    bases: HashMap<ValueType, Vec<Value>>,
}

impl<'a> Tester<'a> {
    pub fn new(sig: &'a Signature, cfg: EquivConfig) -> Tester<'a> {
        Tester {
            sig,
            cfg,
            bases: HashMap::new(),
        }
    }

    pub fn config(&self) -> &EquivConfig {
        &self.cfg
    }

    /// The closed test values of type `t`.
    pub fn basis(&mut self, t: &ValueType) -> Vec<Value> {
        if let Some(b) = self.bases.get(t) {
            return b.clone();
        }
        let b = basis::basis(self.sig, t, self.cfg.basis_size, self.cfg.basis_budget, self.cfg.seed);
        self.bases.insert(t.clone(), b.clone());
        b
    }

    /// Compare closed `m` and `n` at `ty` up to the configured depth.
    pub fn equiv(&mut self, m: &Computation, n: &Computation, ty: &CompType) -> Result<Verdict, EquivError> {
        for (side, t) in [("left", m), ("right", n)] {
            check(self.sig, &Context::new(), t, ty).map_err(|error| EquivError::IllTyped {
                side: format!("{side} term {t}"),
                error,
            })?;
        }
        let depth = self.cfg.depth.max(1);
        self.equiv_at(m, n, ty, depth)
    }

    fn equiv_at(
        &mut self,
        m: &Computation,
        n: &Computation,
        ty: &CompType,
        depth: usize,
    ) -> Result<Verdict, EquivError> {
        let slots = basis::slots(&ty.input);
        let choices: Vec<Vec<Value>> = slots.iter().map(|(_, t)| self.basis(t)).collect();
        if choices.iter().any(Vec::is_empty) {
            return Ok(Verdict::Equivalent {
                inputs_tested: 0,
                exhaustive: true,
            });
        }
        let total = choices.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
        let max = self.cfg.max_inputs.max(1) as u128;
        let exhaustive = total <= max;
        let count = total.min(max);
        let mut inconclusive = None;
        for k in 0..count {
            let mut index = if exhaustive { k } else { k * total / count };
            let mut input: BTreeMap<Location, Vec<Value>> =
                ty.input.locations().map(|l| (l.clone(), Vec::new())).collect();
            for ((loc, _), c) in slots.iter().zip(&choices) {
                let len = c.len() as u128;
                input
                    .get_mut(loc)
                    .expect("slot location")
                    .push(c[(index % len) as usize].clone());
                index /= len;
            }
            let tested = k as usize + 1;
            match self.compare_runs(m, n, ty, &input, depth)? {
                Cmp::Same => {}
                Cmp::Differ(detail) => {
                    return Ok(Verdict::Distinguished {
                        witness: Witness { input, detail },
                        inputs_tested: tested,
                    })
                }
                Cmp::Unknown(reason) => {
                    inconclusive.get_or_insert(reason);
                }
            }
        }
        let inputs_tested = count as usize;
        Ok(match inconclusive {
            Some(reason) => Verdict::Inconclusive { reason, inputs_tested },
            None => Verdict::Equivalent {
                inputs_tested,
                exhaustive,
            },
        })
    }

    fn run_one(&self, t: &Computation, input: &BTreeMap<Location, Vec<Value>>) -> Result<Option<Memory>, EquivError> {
        match run(Memory::from_stacks(input.clone()), t, self.cfg.fuel) {
            Ok(r) => Ok(Some(r.memory)),
            Err(RunError::FuelExhausted { .. }) => Ok(None),
            Err(e @ RunError::Stuck { .. }) => Err(EquivError::Stuck(format!("{t}: {e}"))),
        }
    }

    fn compare_runs(
        &mut self,
        m: &Computation,
        n: &Computation,
        ty: &CompType,
        input: &BTreeMap<Location, Vec<Value>>,
        depth: usize,
    ) -> Result<Cmp, EquivError> {
        let (Some(om), Some(on)) = (self.run_one(m, input)?, self.run_one(n, input)?) else {
            return Ok(Cmp::Unknown(format!("fuel {} exhausted", self.cfg.fuel)));
        };
        let mut unknown = None;
        for (loc, s) in ty.output.iter() {
            let (vm, vn) = (om.stack(loc), on.stack(loc));
            if vm.len() != s.len() || vn.len() != s.len() {
                return Err(EquivError::Stuck(format!(
                    "output at {loc} does not match {}",
                    ty.output
                )));
            }
            for (i, ((u, w), t)) in vm.iter().zip(&vn).zip(&s.0).enumerate() {
                match self.compare_values(u, w, t, depth)? {
                    Cmp::Same => {}
                    Cmp::Differ(why) => return Ok(Cmp::Differ(format!("output {loc}[{i}]: {u} vs {w}{why}"))),
                    Cmp::Unknown(r) => {
                        unknown.get_or_insert(r);
                    }
                }
            }
        }
        Ok(unknown.map_or(Cmp::Same, Cmp::Unknown))
    }

    fn compare_values(&mut self, u: &Value, w: &Value, t: &ValueType, depth: usize) -> Result<Cmp, EquivError> {
        if alpha_eq_value(u, w) {
            return Ok(Cmp::Same);
        }
        match t {
            ValueType::Base(_) => Ok(Cmp::Differ(String::new())),
            ValueType::Arrow(i, o) => {
                if depth <= 1 {
                    return Ok(Cmp::Same);
                }
                let ty = CompType::new((**i).clone(), (**o).clone());
                let fu = Computation::force(u.clone(), Computation::Star);
                let fw = Computation::force(w.clone(), Computation::Star);
                Ok(match self.equiv_at(&fu, &fw, &ty, depth - 1)? {
                    Verdict::Equivalent { .. } => Cmp::Same,
                    Verdict::Distinguished { witness, .. } => Cmp::Differ(format!(", forced on {witness}")),
                    Verdict::Inconclusive { reason, .. } => Cmp::Unknown(reason),
                })
            }
        }
    }
}

/// Test closed `m` and `n` for machine equivalence at `ty`.
pub fn machine_equiv(
    sig: &Signature,
    m: &Computation,
    n: &Computation,
    ty: &CompType,
    cfg: &EquivConfig,
) -> Result<Verdict, EquivError> {
    Tester::new(sig, cfg.clone()).equiv(m, n, ty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fmc_term::{Binder, MemoryType, VarName};

    fn sig(consts: &[&str]) -> Signature {
        consts.iter().fold(Signature::new().with_base("a"), |s, c| {
            s.with_value(c, ValueType::base("a"))
        })
    }

    fn pair() -> (Computation, Computation, CompType) {
        let x = VarName::new("x");
        let a = ValueType::base("a");
        let m = Computation::Pop(
            Location::main(),
            Binder::annotated(x.clone(), a.clone()),
            Computation::push_main(Value::constant("c"), Computation::Star).into(),
        );
        let n = Computation::Pop(
            Location::main(),
            Binder::annotated(x, a.clone()),
            Computation::push_main(Value::var("x"), Computation::Star).into(),
        );
        (
            m,
            n,
            CompType::new(MemoryType::main(vec![a.clone()]), MemoryType::main(vec![a])),
        )
    }

    #[test]
    fn one_constant_identifies_everything() {
        let (m, n, ty) = pair();
        let cfg = EquivConfig {
            depth: 1,
            ..EquivConfig::default()
        };
        let v = machine_equiv(&sig(&["c"]), &m, &n, &ty, &cfg).unwrap();
        assert_eq!(
            v,
            Verdict::Equivalent {
                inputs_tested: 1,
                exhaustive: true
            }
        );
    }

    #[test]
    fn two_constants_separate() {
        let (m, n, ty) = pair();
        let v = machine_equiv(&sig(&["c", "d"]), &m, &n, &ty, &EquivConfig::default()).unwrap();
        match v {
            Verdict::Distinguished { witness, .. } => {
                assert_eq!(witness.input[&Location::main()], vec![Value::constant("d")])
            }
            other => panic!("expected a separating input, got {other}"),
        }
        assert_eq!(
            v_json_tag(&machine_equiv(&sig(&["c", "d"]), &m, &m, &ty, &EquivConfig::default()).unwrap()),
            "equivalent"
        );
    }

    fn v_json_tag(v: &Verdict) -> String {
        v.to_json()["verdict"].as_str().unwrap().to_string()
    }

    #[test]
    fn star_is_equivalent_to_itself() {
        let ty = CompType::default();
        let v = machine_equiv(
            &Signature::new(),
            &Computation::Star,
            &Computation::Star,
            &ty,
            &EquivConfig::default(),
        )
        .unwrap();
        assert!(matches!(v, Verdict::Equivalent { .. }));
    }

    #[test]
    fn ill_typed_sides_are_rejected() {
        let (m, _, _) = pair();
        let e = machine_equiv(&sig(&["c"]), &m, &m, &CompType::default(), &EquivConfig::default()).unwrap_err();
        assert!(matches!(e, EquivError::IllTyped { .. }));
    }
}
