//! Random generation of simply typed terms.
//!
//! Terms are built by a random walk over the memory type: each action pops,
//! pushes or forces against the current stacks, so every generated term
//! checks at its stated type. A walk ends by popping what is left and
//! pushing the required outputs. All binders are annotated.

use std::collections::BTreeMap;

use fmc_term::{size, Binder, Computation, Location, MemoryType, StackType, Symbol, Value, ValueType, VarName};
use fmc_types::{CompType, Signature};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generation parameters.
#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Locations to use; the main location should be among them.
    pub locations: Vec<Location>,
    /// Maximum nesting of arrow types.
    pub type_depth: usize,
    /// Maximum number of items per location in a generated memory type.
    pub stack_width: usize,
    /// Random actions per term before it is completed.
    pub budget: usize,
    /// Base types with their constants. Every listed base needs a constant.
    pub constants: BTreeMap<Symbol, Vec<Symbol>>,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            locations: vec![Location::main(), Location::new("a"), Location::new("b")],
            type_depth: 2,
            stack_width: 2,
            budget: 6,
            constants: BTreeMap::new(),
        }
    }
}

impl GenConfig {
    /// The main location only: the sequential lambda-calculus fragment.
    pub fn single_location() -> GenConfig {
        GenConfig {
            locations: vec![Location::main()],
            ..GenConfig::default()
        }
    }

    pub fn with_base(mut self, base: &str, constants: &[&str]) -> GenConfig {
        self.constants
            .insert(Symbol::new(base), constants.iter().map(|c| Symbol::new(c)).collect());
        self
    }

    /// A signature declaring the configured bases and constants.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (b, cs) in &self.constants {
            sig = sig.with_base(b.name());
            for c in cs {
                sig = sig.with_value(c.name(), ValueType::Base(b.clone()));
            }
        }
        sig
    }
}

/// A closed term with its type and an input memory of that type.
#[derive(Clone, Debug)]
pub struct Sample {
    pub term: Computation,
    pub ty: CompType,
    /// Closed values, bottom first.
    pub input: BTreeMap<Location, Vec<Value>>,
}

/// A seeded generator.
pub struct Gen {
    rng: ChaCha8Rng,
    cfg: GenConfig,
    next_var: u32,
}

type Env = Vec<(VarName, ValueType)>;

impl Gen {
    pub fn new(seed: u64, cfg: GenConfig) -> Gen {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
            next_var: 0,
        }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn fresh(&mut self) -> VarName {
        self.next_var += 1;
        VarName::new(&format!("x{}", self.next_var))
    }

    /// A configured location, uniformly.
    pub fn location(&mut self) -> Location {
        self.cfg
            .locations
            .choose(&mut self.rng)
            .cloned()
            .unwrap_or_else(Location::main)
    }

    /// A value type of arrow depth at most `depth`. Leaves are base types
    /// when any are configured, otherwise the empty arrow `(>)`.
    pub fn value_type(&mut self, depth: usize) -> ValueType {
        let bases: Vec<Symbol> = self.cfg.constants.keys().cloned().collect();
        if depth == 0 || self.rng.gen_bool(0.5) {
            return match bases.choose(&mut self.rng) {
                Some(b) if self.rng.gen_bool(0.8) => ValueType::Base(b.clone()),
                _ => ValueType::main_arrow(vec![], vec![]),
            };
        }
        let i = self.memory_type_within(depth - 1, 1);
        let o = self.memory_type_within(depth - 1, 1);
        ValueType::arrow(i, o)
    }

    /// A memory type over the configured locations.
    pub fn memory_type(&mut self, depth: usize) -> MemoryType {
        self.memory_type_within(depth, self.cfg.stack_width)
    }

    fn memory_type_within(&mut self, depth: usize, width: usize) -> MemoryType {
        let mut stacks = Vec::new();
        for loc in self.cfg.locations.clone() {
            let n = if loc.is_main() {
                self.rng.gen_range(0..=width)
            } else if self.rng.gen_bool(0.2) {
                self.rng.gen_range(1..=width.max(1))
            } else {
                0
            };
            let items = (0..n).map(|_| self.value_type(depth)).collect();
            stacks.push((loc, items));
        }
        MemoryType::from_stacks(stacks)
    }

    pub fn comp_type(&mut self) -> CompType {
        let d = self.cfg.type_depth;
        CompType::new(self.memory_type(d), self.memory_type(d))
    }

    /// A closed value of type `t`, given the variables in `env`.
    pub fn value(&mut self, env: &[(VarName, ValueType)], t: &ValueType, budget: usize) -> Value {
        let vars: Vec<&VarName> = env.iter().filter(|(_, u)| u == t).map(|(x, _)| x).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.6) {
            return Value::Var(vars.choose(&mut self.rng).map(|x| (*x).clone()).unwrap());
        }
        match t {
            ValueType::Base(b) => {
                let cs = self.cfg.constants.get(b).cloned().unwrap_or_default();
                match cs.choose(&mut self.rng) {
                    Some(c) => Value::Const(c.clone()),
                    None => match vars.first() {
                        Some(x) => Value::Var((*x).clone()),
                        None => panic!("no inhabitant for base type {b}"),
                    },
                }
            }
            ValueType::Arrow(i, o) => {
                // `!{?x}` is a thunk redex when a variable of the type exists.
                if let Some(x) = vars.first() {
                    if self.rng.gen_bool(0.3) {
                        return Value::thunk(Computation::force(Value::Var((*x).clone()), Computation::Star));
                    }
                }
                Value::thunk(self.term(env, &CompType::new((**i).clone(), (**o).clone()), budget))
            }
        }
    }

    /// A term of exactly type `ty` over the variables in `env`.
    pub fn term(&mut self, env: &[(VarName, ValueType)], ty: &CompType, budget: usize) -> Computation {
        let mut env: Env = env.to_vec();
        let mut mem = ty.input.clone();
        let mut actions: Vec<Computation> = Vec::new();
        let mut budget = budget;
        while budget > 0 && self.rng.gen_bool(0.85) {
            budget -= 1;
            let choice = self.rng.gen_range(0..6);
            match choice {
                0 | 1 => {
                    let nonempty: Vec<Location> = mem.locations().cloned().collect();
                    if let Some(loc) = nonempty.choose(&mut self.rng).cloned() {
                        let t = mem.pop(&loc).expect("nonempty location");
                        let x = self.fresh();
                        actions.push(Computation::Pop(
                            loc,
                            Binder::annotated(x.clone(), t.clone()),
                            Default::default(),
                        ));
                        env.push((x, t));
                    }
                }
                2 => {
                    if mem.len() >= self.cfg.stack_width * 3 {
                        continue;
                    }
                    let t = match env.choose(&mut self.rng) {
                        Some((_, t)) if self.rng.gen_bool(0.6) => t.clone(),
                        _ => self.value_type(self.cfg.type_depth.min(1)),
                    };
                    let sub = budget / 2;
                    budget -= sub;
                    let v = self.value(&env, &t, sub);
                    let loc = self.location();
                    mem.push(&loc, t);
                    actions.push(Computation::Push(v, loc, Default::default()));
                }
                3 => {
                    // Force a variable whose input is on top of the stacks.
                    let usable: Vec<(VarName, MemoryType, MemoryType)> = env
                        .iter()
                        .filter_map(|(x, t)| match t {
                            ValueType::Arrow(i, o) if ends_with(&mem, i) => {
                                Some((x.clone(), (**i).clone(), (**o).clone()))
                            }
                            _ => None,
                        })
                        .collect();
                    if let Some((x, i, o)) = usable.choose(&mut self.rng).cloned() {
                        mem = apply(&mem, &i, &o);
                        actions.push(Computation::Force(Value::Var(x), Default::default()));
                    }
                }
                4 => {
                    // Force an inline thunk over a top part of the stacks.
                    let i = self.top_part(&mem);
                    let o = self.memory_type(self.cfg.type_depth.saturating_sub(1));
                    let sub = budget / 2;
                    budget -= sub;
                    let body = self.term(&env, &CompType::new(i.clone(), o.clone()), sub);
                    mem = apply(&mem, &i, &o);
                    actions.push(Computation::Force(Value::thunk(body), Default::default()));
                }
                _ => {
                    // Push then pop on the same location: a beta redex.
                    let t = self.value_type(self.cfg.type_depth.min(1));
                    let sub = budget / 2;
                    budget -= sub;
                    let v = self.value(&env, &t, sub);
                    let loc = self.location();
                    let x = self.fresh();
                    actions.push(Computation::Push(v, loc.clone(), Default::default()));
                    actions.push(Computation::Pop(
                        loc,
                        Binder::annotated(x.clone(), t.clone()),
                        Default::default(),
                    ));
                    env.push((x, t));
                }
            }
        }
        // Complete: pop everything left, then push the outputs.
        let locs: Vec<Location> = mem.locations().cloned().collect();
        for loc in locs {
            while let Some(t) = mem.pop(&loc) {
                let x = self.fresh();
                actions.push(Computation::Pop(
                    loc.clone(),
                    Binder::annotated(x.clone(), t.clone()),
                    Default::default(),
                ));
                env.push((x, t));
            }
        }
        for (loc, items) in ty.output.iter() {
            for t in &items.0 {
                let v = self.value(&env, t, budget / 2);
                actions.push(Computation::Push(v, loc.clone(), Default::default()));
            }
        }
        actions
            .into_iter()
            .rev()
            .fold(Computation::Star, |acc, a| a.with_continuation(acc))
    }

    fn top_part(&mut self, mem: &MemoryType) -> MemoryType {
        let mut stacks = Vec::new();
        for (loc, s) in mem.iter() {
            let k = self.rng.gen_range(0..=s.len());
            stacks.push((loc.clone(), s.0[s.len() - k..].to_vec()));
        }
        MemoryType::from_stacks(stacks)
    }

    /// A closed typed term with an input memory of its input type.
    pub fn sample(&mut self) -> Sample {
        let ty = self.comp_type();
        let budget = self.cfg.budget;
        let term = self.term(&[], &ty, budget);
        let input = self.memory(&ty.input);
        Sample { term, ty, input }
    }

    /// A sample whose term has size at most `max_size`.
    pub fn sample_within(&mut self, max_size: usize) -> Sample {
        loop {
            let s = self.sample();
            if size(&s.term) <= max_size {
                return s;
            }
        }
    }

    /// Closed values for every slot of a memory type, bottom first.
    pub fn memory(&mut self, t: &MemoryType) -> BTreeMap<Location, Vec<Value>> {
        let budget = self.cfg.budget / 2;
        t.iter()
            .map(|(loc, s)| (loc.clone(), s.0.iter().map(|u| self.value(&[], u, budget)).collect()))
            .collect()
    }
}

/// Every location of `mem` ends with the corresponding stack of `top`.
fn ends_with(mem: &MemoryType, top: &MemoryType) -> bool {
    top.iter().all(|(loc, s)| mem.stack(loc).ends_with(&s.0))
}

/// Remove `i` from the top of `mem` and push `o`.
fn apply(mem: &MemoryType, i: &MemoryType, o: &MemoryType) -> MemoryType {
    let mut out = mem.clone();
    for (loc, s) in i.iter() {
        let rest = mem.stack(loc).len() - s.len();
        out.set(loc.clone(), StackType::new(mem.stack(loc)[..rest].to_vec()));
    }
    out.concat(o)
}
