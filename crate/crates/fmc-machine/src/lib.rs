//! The functional abstract machine.
//!
//! A state is a memory (one stack or stream per location) and a running
//! computation. The transitions are
//!
//! ```text
//! (S_A,         [V]a.M)  ->  (S_A ; S_a V, M)       push
//! (S_A ; S_a V, a<x>.M)  ->  (S_A ; S_a, {V/x}M)    pop
//! (S_A,         ?!N.M)   ->  (S_A, N;M)             force-thunk
//! ```
//!
//! and a run succeeds when the computation reaches `*`. Push and pop are
//! the counted transitions; force-thunk is administrative and tallied
//! separately.

mod memory;
mod trace;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use fmc_term::{sequence, substitute, Computation, Location, Symbol, Value, VarName};
use thiserror::Error;

pub use memory::{church, Memory, Policy, Stack, Stream};
pub use trace::{Trace, TraceEntry};

/// What a policy forbids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    PushToReadStream,
    PopFromWriteStream,
    CellOverflow,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::PushToReadStream => "push to a read-only stream",
            Violation::PopFromWriteStream => "pop from a write-only stream",
            Violation::CellOverflow => "second value pushed to a cell",
        })
    }
}

/// Why the machine halted before reaching `*`.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Stuck {
    #[error("pop on empty location {0}")]
    EmptyPop(Location),
    #[error("no handler for constant {0}")]
    UnhandledConst(Symbol),
    #[error("{1} at location {0}")]
    PolicyViolation(Location, Violation),
    #[error("free variable {0} in the running term")]
    OpenTerm(VarName),
}

/// The transition taken by a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Push,
    Pop,
    ForceThunk,
    /// A constant handled by the delta table.
    Delta,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Push => "push",
            Rule::Pop => "pop",
            Rule::ForceThunk => "force-thunk",
            Rule::Delta => "delta",
        }
    }
}

/// A memory transformer implementing a constant.
pub type DeltaFn = Arc<dyn Fn(&mut Memory) -> Result<(), Stuck> + Send + Sync>;

/// Handlers for computation constants and forced value constants.
#[derive(Clone, Default)]
pub struct Delta(BTreeMap<Symbol, DeltaFn>);

impl Delta {
    pub fn new() -> Delta {
        Delta::default()
    }

    pub fn with(mut self, sym: &str, f: impl Fn(&mut Memory) -> Result<(), Stuck> + Send + Sync + 'static) -> Delta {
        self.0.insert(Symbol::new(sym), Arc::new(f));
        self
    }

    pub fn get(&self, sym: &Symbol) -> Option<&DeltaFn> {
        self.0.get(sym)
    }

    /// `add`, `sub` and `mul` on numeral constants of the main stack, and
    /// `drop` discarding the top value.
    pub fn arithmetic() -> Delta {
        fn numeral(v: Value) -> Result<i64, Stuck> {
            match &v {
                Value::Const(s) => s.name().parse().map_err(|_| Stuck::UnhandledConst(s.clone())),
                _ => Err(Stuck::UnhandledConst(Symbol::new(&v.to_string()))),
            }
        }
        fn binary(op: fn(i64, i64) -> i64) -> impl Fn(&mut Memory) -> Result<(), Stuck> {
            move |m: &mut Memory| {
                let lam = Location::main();
                let y = numeral(m.pop(&lam)?)?;
                let x = numeral(m.pop(&lam)?)?;
                m.push(&lam, Value::constant(&op(x, y).to_string()))
            }
        }
        Delta::new()
            .with("add", binary(|x, y| x.wrapping_add(y)))
            .with("sub", binary(|x, y| x.wrapping_sub(y)))
            .with("mul", binary(|x, y| x.wrapping_mul(y)))
            .with("drop", |m: &mut Memory| m.pop(&Location::main()).map(|_| ()))
    }
}

impl fmt::Debug for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.keys()).finish()
    }
}

/// Transition counts of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub push: u64,
    pub pop: u64,
    pub force_thunk: u64,
    pub delta: u64,
}

impl RunStats {
    /// Push and pop transitions: the machine step count.
    pub fn steps(&self) -> u64 {
        self.push + self.pop
    }

    /// Every transition, administrative ones included.
    pub fn transitions(&self) -> u64 {
        self.steps() + self.force_thunk + self.delta
    }

    fn record(&mut self, rule: Rule) {
        match rule {
            Rule::Push => self.push += 1,
            Rule::Pop => self.pop += 1,
            Rule::ForceThunk => self.force_thunk += 1,
            Rule::Delta => self.delta += 1,
        }
    }
}

/// A machine state: memory and running computation.
#[derive(Clone, Debug)]
pub struct MachineState {
    pub memory: Memory,
    pub focus: Computation,
    pub stats: RunStats,
}

/// The outcome of a single step.
#[derive(Clone, Debug, PartialEq)]
pub enum StepResult {
    Stepped(Rule, Option<Location>),
    Success,
    Stuck(Stuck),
}

impl MachineState {
    pub fn new(memory: Memory, focus: Computation) -> MachineState {
        MachineState {
            memory,
            focus,
            stats: RunStats::default(),
        }
    }

    /// Take one transition. On `Stuck` the state is left unchanged.
    pub fn step(&mut self, delta: &Delta) -> StepResult {
        let (rule, loc, next) = match &self.focus {
            Computation::Star => return StepResult::Success,
            Computation::Push(v, a, k) => {
                if let Value::Var(x) = v {
                    return StepResult::Stuck(Stuck::OpenTerm(x.clone()));
                }
                if let Err(e) = self.memory.push(a, v.clone()) {
                    return StepResult::Stuck(e);
                }
                (Rule::Push, Some(a.clone()), (**k).clone())
            }
            Computation::Pop(a, b, k) => match self.memory.pop(a) {
                Ok(v) => (Rule::Pop, Some(a.clone()), substitute(&v, &b.var, k)),
                Err(e) => return StepResult::Stuck(e),
            },
            Computation::Force(v, k) => match v {
                Value::Thunk(n) => (Rule::ForceThunk, None, sequence(n, k)),
                Value::Var(x) => return StepResult::Stuck(Stuck::OpenTerm(x.clone())),
                Value::Const(c) => match handle(&mut self.memory, delta, c) {
                    Ok(()) => (Rule::Delta, None, (**k).clone()),
                    Err(e) => return StepResult::Stuck(e),
                },
            },
            Computation::Const(c, k) => match handle(&mut self.memory, delta, c) {
                Ok(()) => (Rule::Delta, None, (**k).clone()),
                Err(e) => return StepResult::Stuck(e),
            },
        };
        self.focus = next;
        self.stats.record(rule);
        StepResult::Stepped(rule, loc)
    }
}

fn handle(memory: &mut Memory, delta: &Delta, c: &Symbol) -> Result<(), Stuck> {
    let f = delta.get(c).ok_or_else(|| Stuck::UnhandledConst(c.clone()))?;
    // Apply to a copy so that a failing handler leaves the state intact.
    let mut mem = memory.clone();
    f(&mut mem)?;
    *memory = mem;
    Ok(())
}

/// Options for a run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Maximum number of push and pop transitions.
    pub fuel: u64,
    /// Record at most this many trace entries.
    pub trace: Option<usize>,
    pub delta: Delta,
}

impl RunOptions {
    pub fn fuel(fuel: u64) -> RunOptions {
        RunOptions {
            fuel,
            trace: None,
            delta: Delta::new(),
        }
    }

    pub fn with_trace(mut self, limit: usize) -> RunOptions {
        self.trace = Some(limit);
        self
    }

    pub fn with_delta(mut self, delta: Delta) -> RunOptions {
        self.delta = delta;
        self
    }
}

/// A successful run.
#[derive(Clone, Debug)]
pub struct Run {
    pub memory: Memory,
    pub stats: RunStats,
    pub trace: Option<Trace>,
}

impl Run {
    /// Push and pop transitions taken.
    pub fn steps(&self) -> u64 {
        self.stats.steps()
    }
}

#[derive(Clone, Debug, Error)]
pub enum RunError {
    #[error("machine stuck after {} steps: {reason}", state.stats.steps())]
    Stuck {
        reason: Stuck,
        state: Box<MachineState>,
        trace: Option<Trace>,
    },
    #[error("fuel exhausted after {} steps", state.stats.steps())]
    FuelExhausted {
        state: Box<MachineState>,
        trace: Option<Trace>,
    },
}

impl RunError {
    pub fn state(&self) -> &MachineState {
        match self {
            RunError::Stuck { state, .. } | RunError::FuelExhausted { state, .. } => state,
        }
    }
}

/// Run `term` on `memory` until it halts, with default options.
pub fn run(memory: Memory, term: &Computation, fuel: u64) -> Result<Run, RunError> {
    run_with(memory, term, &RunOptions::fuel(fuel))
}

pub fn run_with(memory: Memory, term: &Computation, opts: &RunOptions) -> Result<Run, RunError> {
    let mut state = MachineState::new(memory, term.clone());
    let mut trace = opts.trace.map(|limit| Trace::start(limit, &state));
    loop {
        if state.stats.steps() >= opts.fuel && matches!(state.focus, Computation::Push(..) | Computation::Pop(..)) {
            return Err(RunError::FuelExhausted {
                state: Box::new(state),
                trace,
            });
        }
        match state.step(&opts.delta) {
            StepResult::Success => {
                return Ok(Run {
                    memory: state.memory,
                    stats: state.stats,
                    trace,
                })
            }
            StepResult::Stepped(rule, loc) => {
                if let Some(t) = trace.as_mut() {
                    t.record(rule, loc, &state);
                }
            }
            StepResult::Stuck(reason) => {
                return Err(RunError::Stuck {
                    reason,
                    state: Box::new(state),
                    trace,
                })
            }
        }
    }
}

/// The number of push and pop transitions of a successful run.
pub fn step_count(memory: Memory, term: &Computation, fuel: u64) -> Result<u64, RunError> {
    run(memory, term, fuel).map(|r| r.steps())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fmc_surface::parse;

    fn ok(src: &str, mem: Memory) -> Run {
        run(mem, &parse(src).unwrap(), 1000).unwrap()
    }

    #[test]
    fn push_then_pop() {
        let mut s = MachineState::new(Memory::new(), parse("[#v]a.a<x>.?x").unwrap());
        let d = Delta::new();
        assert_eq!(s.step(&d), StepResult::Stepped(Rule::Push, Some(Location::new("a"))));
        assert_eq!(s.step(&d), StepResult::Stepped(Rule::Pop, Some(Location::new("a"))));
        assert_eq!(s.focus.to_string(), "?#v");
        assert!(s.memory.is_empty());
        assert_eq!(s.step(&d), StepResult::Stuck(Stuck::UnhandledConst(Symbol::new("v"))));
    }

    #[test]
    fn identity_halts_immediately() {
        let mem = Memory::main(vec![Value::constant("1")]);
        let r = ok("*", mem.clone());
        assert_eq!(r.steps(), 0);
        assert!(r.memory.same_stacks(&mem));
    }

    #[test]
    fn step_counts() {
        assert_eq!(step_count(Memory::new(), &parse("*").unwrap(), 10).unwrap(), 0);
        assert_eq!(step_count(Memory::new(), &parse("[!{*}].<x>").unwrap(), 10).unwrap(), 2);
        // CBV application: the argument, then the function, then `<f>.?f`,
        // reaching the body with x bound in four steps.
        assert_eq!(
            step_count(Memory::new(), &parse("[#v].[!{<x>}].<f>.?f").unwrap(), 10).unwrap(),
            4
        );
        let r = ok("[#v].[!{<x>.[x]c}].<f>.?f", Memory::new());
        assert_eq!(r.steps(), 5);
        assert_eq!(r.stats.force_thunk, 1);
        assert_eq!(r.memory.stack(&Location::new("c")), vec![Value::constant("v")]);
    }

    #[test]
    fn state_examples() {
        let c = Location::new("c");
        let cell =
            || Memory::from_stacks([(c.clone(), vec![Value::constant("0")])]).with_policy(c.clone(), Policy::Cell);
        let r = ok("[3].set c;[5].set c", cell());
        assert_eq!(r.memory.stack(&c), vec![Value::constant("5")]);
        assert!(r.memory.stack(&Location::main()).is_empty());
        let r = ok("[4].set c;get c", cell());
        assert_eq!(r.memory.stack(&c), vec![Value::constant("4")]);
        assert_eq!(r.memory.stack(&Location::main()), vec![Value::constant("4")]);
    }

    #[test]
    fn stuck_reasons() {
        let e = run(Memory::new(), &parse("<x>").unwrap(), 10).unwrap_err();
        assert!(matches!(
            e,
            RunError::Stuck {
                reason: Stuck::EmptyPop(_),
                ..
            }
        ));
        let e = run(Memory::new(), &parse("tick").unwrap(), 10).unwrap_err();
        assert!(matches!(
            e,
            RunError::Stuck {
                reason: Stuck::UnhandledConst(_),
                ..
            }
        ));
        let e = run(Memory::new(), &parse("[!{<x>.[x].?x}].<x>.[x].?x").unwrap(), 50).unwrap_err();
        assert!(matches!(e, RunError::FuelExhausted { .. }));
    }

    #[test]
    fn delta_constants() {
        let opts = RunOptions::fuel(100).with_delta(Delta::arithmetic());
        let r = run_with(Memory::new(), &parse("[2].[3].add.[4].mul").unwrap(), &opts).unwrap();
        assert_eq!(r.memory.stack(&Location::main()), vec![Value::constant("20")]);
        assert_eq!(r.stats.delta, 2);
        assert_eq!(r.steps(), 3);
    }

    #[test]
    fn sums_draw_from_the_random_stream() {
        let rnd = Location::new("rnd");
        let m = parse("[#a]out <+> [#b]out").unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..32 {
            let mem = Memory::new()
                .with_policy(rnd.clone(), Policy::ReadStream(Stream::random(seed)))
                .with_policy(Location::new("out"), Policy::WriteStream);
            let r = run(mem, &m, 100).unwrap();
            seen.insert(r.memory.stack(&Location::new("out"))[0].to_string());
        }
        assert_eq!(seen.len(), 2);
    }
}
