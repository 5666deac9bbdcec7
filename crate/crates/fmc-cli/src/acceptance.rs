//! The acceptance checks, one per criterion, shared by `fmc selftest` and
//! the acceptance test. Corpus sizes, seeds, tolerances and time budgets
//! are fixed here.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use fmc_equiv::{generate_instances, machine_equiv, theory_signature, validate_theory, EquivConfig, Tester, Verdict};
use fmc_gen::{Gen, GenConfig, Sample};
use fmc_machine::{run_with, step_count, Delta, Memory, Policy, RunOptions, Stream};
use fmc_measure::{interpret, interpret_memory, measure, CountBig, Kind};
use fmc_rewrite::{all_paths, normalize, normalize_observed, Reduction, Strategy};
use fmc_surface::{parse, parse_type};
use fmc_term::{alpha_eq, sequence, size, Computation, Location, MemoryType, Value, ValueType};
use fmc_translate::lambda::{alpha_eq as lambda_alpha_eq, normalize as lambda_normalize, parse_lambda};
use fmc_translate::lgen::{LGen, LGenConfig};
use fmc_translate::{
    cbn, cbv, collapse, context_inputs, embed, embed_comp_type, free_functor, interpret_slc_with, kappa, kappa_inv,
    slc_signature, LocationOrder,
};
use fmc_types::{check, infer, CompType, Context, Signature};

/// Seed of the shared generated corpus.
pub const CORPUS_SEED: u64 = 2024;
/// Closed typed terms in the corpus (criteria 3 to 5).
pub const CORPUS_TERMS: usize = 500;
pub const CORPUS_MAX_SIZE: usize = 25;
/// Terms of at most this size are explored along every path (criterion 6).
pub const CONFLUENCE_MAX_SIZE: usize = 15;
/// Distinct terms visited per all-paths search before giving up.
pub const CONFLUENCE_BOUND: usize = 200_000;
pub const AXIOM_INSTANCES_PER_AXIOM: usize = 25;
pub const MIN_AXIOM_INSTANCES: usize = 200;
pub const LAMBDA_TERMS: usize = 120;
pub const LAMBDA_MAX_SIZE: usize = 12;
pub const SLC_TERMS: usize = 120;
pub const MEMORY_TYPES: usize = 12;
pub const EFFECT_RUNS: u64 = 1000;
/// Allowed deviation of an observed frequency from its expected value.
pub const FREQUENCY_TOLERANCE: f64 = 0.05;
/// Reduction steps allowed when normalising a corpus term.
const REWRITE_FUEL: u64 = 100_000;

/// The result of one criterion.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Outcome {
    /// `PASS 3 machine termination (…) [0.42s / 60s]`.
    pub fn line(&self) -> String {
        format!(
            "{} {} {}: {} [{:.2}s / {}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

fn timed(id: u8, title: &'static str, budget_secs: u64, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > budget {
        passed = false;
        detail.push_str("; over the time budget");
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
        budget,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The shared corpus: closed typed terms over three locations with inputs.
pub fn corpus() -> Vec<Sample> {
    let mut g = Gen::new(CORPUS_SEED, GenConfig::default());
    (0..CORPUS_TERMS).map(|_| g.sample_within(CORPUS_MAX_SIZE)).collect()
}

fn derive(s: &Sample) -> Result<fmc_types::CompDerivation, String> {
    check(&Signature::new(), &Context::new(), &s.term, &s.ty).map_err(|e| format!("{} : {}: {e}", s.term, s.ty))
}

pub fn typing_golden() -> Outcome {
    timed(1, "typing golden set", 1, || {
        let sig = Signature::new().with_base("s").with_base("t").with_base("Z");
        let cases = [
            ("<x:t>", "t >"),
            ("<x:t>.[x].[x]", "t > t t"),
            ("<x:s>.<y:t>.[y].[x]", "s t > t s"),
            ("<f:(t > t)>.?f.?f", "(t > t) t > t"),
            ("<x:Z>.c<_:Z>.[x]c", "Z c(Z) > c(Z)"),
            ("c<x:Z>.[x]c.[x]", "c(Z) > c(Z) Z"),
            ("<x:Z>.[x]out", "Z > out(Z)"),
        ];
        for (src, ty) in cases {
            let m = parse(src).map_err(|e| e.to_string())?;
            let want = parse_type(ty).map_err(|e| e.to_string())?;
            let got = infer(&sig, &Context::new(), &m).map_err(|e| format!("{src}: {e}"))?;
            ensure(got.ty() == &want, || format!("{src}: inferred {} not {ty}", got.ty()))?;
        }
        let sugar = [
            ("<x>", "t >"),
            ("<x>.[x].[x]", "t > t t"),
            ("<x>.<y>.[y].[x]", "s t > t s"),
            ("<f>.?f.?f", "(t > t) t > t"),
            ("set c", "Z c(Z) > c(Z)"),
            ("get c", "c(Z) > c(Z) Z"),
            ("print", "Z > out(Z)"),
        ];
        for (src, ty) in sugar {
            let m = parse(src).map_err(|e| e.to_string())?;
            let want = parse_type(ty).map_err(|e| e.to_string())?;
            let d = check(&sig, &Context::new(), &m, &want).map_err(|e| format!("{src} : {ty}: {e}"))?;
            ensure(d.ty() == &want, || format!("{src}: checked at {} not {ty}", d.ty()))?;
        }
        Ok(format!(
            "{} inferred and {} checked types exact",
            cases.len(),
            sugar.len()
        ))
    })
}

pub fn state_normal_forms() -> Outcome {
    timed(2, "state example normal forms", 1, || {
        let cases = [
            ("[3].set c;[5].set c", "c<_>.[5]c"),
            ("[4].set c;get c", "c<_>.[4]c.[4]"),
        ];
        for (src, want) in cases {
            let m = parse(src).map_err(|e| e.to_string())?;
            let want = parse(want).map_err(|e| e.to_string())?;
            for strategy in [Strategy::LeftmostOutermost, Strategy::RightmostInnermost] {
                let nf = normalize(&m, strategy, 1000).map_err(|e| e.to_string())?;
                ensure(alpha_eq(&nf.term, &want), || format!("{src} normalised to {}", nf.term))?;
            }
        }
        Ok("both chains reach the expected normal form under both strategies".into())
    })
}

fn strong_and_weak(s: &Sample, kind: Kind) -> Result<u64, String> {
    let d = derive(s)?;
    let f = interpret::<u64>(kind, &d, &Default::default()).map_err(|e| e.to_string())?;
    let input = interpret_memory(kind, &Signature::new(), &s.input, &s.ty.input).map_err(|e| e.to_string())?;
    Ok(f.apply(input).map_err(|e| e.to_string())?.0)
}

pub fn termination(corpus: &[Sample]) -> Outcome {
    timed(3, "machine termination within the strong measure", 60, || {
        ensure(corpus.len() >= 500, || format!("only {} corpus terms", corpus.len()))?;
        let mut max_fuel = 0;
        for s in corpus {
            let fuel = strong_and_weak(s, Kind::Strong)?;
            max_fuel = max_fuel.max(fuel);
            step_count(Memory::from_stacks(s.input.clone()), &s.term, fuel)
                .map_err(|e| format!("{} with fuel {fuel}: {e}", s.term))?;
        }
        let sizes: Vec<usize> = corpus.iter().map(|s| size(&s.term)).collect();
        let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
        let largest = sizes.iter().max().copied().unwrap_or(0);
        Ok(format!(
            "{} runs succeeded, sizes mean {mean:.1} max {largest}, largest fuel {max_fuel}",
            corpus.len()
        ))
    })
}

pub fn step_counting(corpus: &[Sample]) -> Outcome {
    timed(4, "weak measure equals machine steps", 60, || {
        let mut total = 0;
        for s in corpus {
            let weak = strong_and_weak(s, Kind::Weak)?;
            let steps = step_count(Memory::from_stacks(s.input.clone()), &s.term, 1 << 24)
                .map_err(|e| format!("{}: {e}", s.term))?;
            ensure(weak == steps, || format!("{}: weak {weak} vs {steps} steps", s.term))?;
            total += steps;
        }
        Ok(format!("{} terms, {total} transitions, zero mismatches", corpus.len()))
    })
}

pub fn strict_decrease(corpus: &[Sample]) -> Outcome {
    timed(5, "strict decrease under beta, equality under pi", 120, || {
        let ctx = Context::new();
        let (mut betas, mut pis) = (0u64, 0u64);
        let mut violation: Option<String> = None;
        for s in corpus {
            let mut observe = |before: &Computation, r: &fmc_rewrite::Redex, after: &Computation| {
                if violation.is_some() || !matches!(r.rule, Reduction::Beta | Reduction::Pi) {
                    return;
                }
                let m = |t: &Computation| -> Result<CountBig, String> {
                    let d = check(&Signature::new(), &ctx, t, &s.ty).map_err(|e| format!("{t}: {e}"))?;
                    measure(Kind::Strong, &ctx, &d).map_err(|e| e.to_string())
                };
                match (m(before), m(after)) {
                    (Ok(m0), Ok(m1)) => match r.rule {
                        Reduction::Beta if m0 <= m1 => {
                            violation = Some(format!("beta {before} -> {after}: {m0} <= {m1}"))
                        }
                        Reduction::Pi if m0 != m1 => violation = Some(format!("pi {before} -> {after}: {m0} != {m1}")),
                        Reduction::Beta => betas += 1,
                        _ => pis += 1,
                    },
                    (Err(e), _) | (_, Err(e)) => violation = Some(e),
                }
            };
            normalize_observed(&s.term, Strategy::LeftmostOutermost, REWRITE_FUEL, &mut observe)
                .map_err(|e| e.to_string())?;
            if let Some(v) = violation {
                return Err(v);
            }
        }
        ensure(betas > 0 && pis > 0, || {
            format!("corpus exercised {betas} beta and {pis} pi steps")
        })?;
        Ok(format!("{betas} beta steps decreased, {pis} pi steps preserved"))
    })
}

pub fn confluence(corpus: &[Sample]) -> Outcome {
    timed(6, "unique normal form along all paths", 120, || {
        let small: Vec<&Sample> = corpus.iter().filter(|s| size(&s.term) <= CONFLUENCE_MAX_SIZE).collect();
        ensure(small.len() >= 100, || {
            format!("only {} corpus terms of size <= {CONFLUENCE_MAX_SIZE}", small.len())
        })?;
        let mut explored = 0;
        for s in &small {
            let r = all_paths(&s.term, CONFLUENCE_BOUND);
            ensure(r.complete, || format!("{}: search bound reached", s.term))?;
            ensure(r.normal_forms.len() == 1, || {
                format!("{}: {} normal forms", s.term, r.normal_forms.len())
            })?;
            explored += r.explored;
        }
        Ok(format!(
            "{} terms, {explored} reducts explored, one normal form each",
            small.len()
        ))
    })
}

pub fn equational_theory() -> Outcome {
    timed(7, "equational theory at depth 2 and coarseness witness", 120, || {
        let instances = generate_instances(CORPUS_SEED, AXIOM_INSTANCES_PER_AXIOM);
        ensure(instances.len() >= MIN_AXIOM_INSTANCES, || {
            format!("only {} instances", instances.len())
        })?;
        let cfg = EquivConfig {
            depth: 2,
            ..EquivConfig::default()
        };
        let report = validate_theory(&theory_signature(), &instances, &cfg);
        ensure(report.distinguished() == 0 && report.passed(), || {
            let first = report
                .failures
                .first()
                .map(|(i, why)| format!("{i}: {why}"))
                .unwrap_or_default();
            format!(
                "{} distinguished, {} failures; {first}",
                report.distinguished(),
                report.failures.len()
            )
        })?;
        let sig = Signature::new()
            .with_base("a")
            .with_value("c", ValueType::base("a"))
            .with_value("d", ValueType::base("a"));
        let m = parse("<x:a>.[#c]").map_err(|e| e.to_string())?;
        let n = parse("<x:a>.[x]").map_err(|e| e.to_string())?;
        let t = parse_type("a > a").map_err(|e| e.to_string())?;
        let v = machine_equiv(&sig, &m, &n, &t, &cfg).map_err(|e| e.to_string())?;
        ensure(v.is_distinguished(), || format!("coarseness witness gave {}", v.tag()))?;
        Ok(format!(
            "{} instances equivalent, witness distinguished",
            instances.len()
        ))
    })
}

fn equivalent(v: &Verdict) -> bool {
    matches!(v, Verdict::Equivalent { .. })
}

pub fn round_trips() -> Outcome {
    timed(8, "translation round trips", 120, || {
        let mut g = LGen::new(CORPUS_SEED, LGenConfig::default());
        let sig = g.signature();
        let ssig = slc_signature(&sig).map_err(|e| e.to_string())?;
        for _ in 0..LAMBDA_TERMS {
            let (ctx, m, _) = g.sample(LAMBDA_MAX_SIZE);
            let (slc, ty) = free_functor(&sig, &ctx, &m).map_err(|e| format!("{m}: {e}"))?;
            let back = interpret_slc_with(&ssig, &slc, &ty, context_inputs(&ctx)).map_err(|e| format!("{slc}: {e}"))?;
            let lhs = lambda_normalize(&sig, &ctx, &back).map_err(|e| e.to_string())?;
            let rhs = lambda_normalize(&sig, &ctx, &m).map_err(|e| e.to_string())?;
            ensure(lambda_alpha_eq(&lhs, &rhs), || format!("(a) {m} came back as {back}"))?;
        }

        let mut sg = Gen::new(CORPUS_SEED, GenConfig::single_location());
        let order: LocationOrder = "a,b"
            .parse()
            .map_err(|e: fmc_translate::TranslateError| e.to_string())?;
        let at = Location::new("a");
        for _ in 0..SLC_TERMS {
            let s = sg.sample_within(CORPUS_MAX_SIZE);
            let e = embed(&s.term, &at, &Signature::new(), &order).map_err(|e| e.to_string())?;
            let ety = embed_comp_type(&s.ty, &at).map_err(|e| e.to_string())?;
            let back = collapse(&Signature::new(), &e, &ety, &order).map_err(|e| format!("{e}"))?;
            ensure(alpha_eq(&back, &s.term), || {
                format!("(b) {} came back as {back}", s.term)
            })?;
        }

        let mut mg = Gen::new(CORPUS_SEED, GenConfig::default().with_base("o", &["a", "b"]));
        let msig = mg.config().signature();
        let ord = LocationOrder::standard(&mg.config().locations);
        let mut tester = Tester::new(&msig, EquivConfig::default());
        let mut seen: Vec<MemoryType> = Vec::new();
        while seen.len() < MEMORY_TYPES {
            let t = mg.memory_type(1);
            if t.is_empty() || seen.contains(&t) {
                continue;
            }
            let there = sequence(
                &kappa(&t, &ord).map_err(|e| e.to_string())?,
                &kappa_inv(&t, &ord).map_err(|e| e.to_string())?,
            );
            let v = tester
                .equiv(&there, &Computation::Star, &CompType::identity(t.clone()))
                .map_err(|e| e.to_string())?;
            ensure(equivalent(&v), || format!("(c) at {t}: {}", v.tag()))?;
            seen.push(t);
        }
        Ok(format!(
            "(a) {LAMBDA_TERMS} lambda-terms, (b) {SLC_TERMS} sequential terms, (c) {MEMORY_TYPES} memory types"
        ))
    })
}

fn effect_memory(seed: u64) -> Memory {
    Memory::from_stacks([(Location::new("c"), vec![Value::constant("0")])])
        .with_policy(Location::new("c"), Policy::Cell)
        .with_policy(Location::new("rnd"), Policy::ReadStream(Stream::random(seed)))
        .with_policy(Location::new("out"), Policy::WriteStream)
}

/// `m` and `n` record their name on `out` and return their argument.
fn logging() -> Delta {
    let log = |name: &'static str| {
        move |mem: &mut Memory| {
            let v = mem.pop(&Location::main())?;
            mem.push(&Location::new("out"), Value::constant(name))?;
            mem.push(&Location::main(), v)
        }
    };
    Delta::new().with("m", log("m")).with("n", log("n"))
}

fn run_effect(term: &Computation, seed: u64) -> Result<Memory, String> {
    let opts = RunOptions::fuel(10_000).with_delta(logging());
    run_with(effect_memory(seed), term, &opts)
        .map(|r| r.memory)
        .map_err(|e| e.to_string())
}

fn tally(term: &Computation) -> Result<BTreeMap<(bool, bool), u64>, String> {
    let mut counts = BTreeMap::new();
    for seed in 0..EFFECT_RUNS {
        let mem = run_effect(term, seed)?;
        let log = mem.stack(&Location::new("out"));
        ensure(log.len() == 2, || format!("{} log entries", log.len()))?;
        let is_m = |v: &Value| v == &Value::constant("m");
        *counts.entry((is_m(&log[0]), is_m(&log[1]))).or_insert(0) += 1;
    }
    Ok(counts)
}

pub fn effects() -> Outcome {
    timed(9, "call-by-value and call-by-name effects", 1, || {
        let state = parse_lambda("c := #3; (\\x:o. !c) (c := #5; #7)").map_err(|e| e.to_string())?;
        for (name, t, want) in [("cbv", cbv(&state), "5"), ("cbn", cbn(&state), "3")] {
            let mem = run_effect(&t.map_err(|e| e.to_string())?, 0)?;
            let got: Vec<String> = mem.stack(&Location::main()).iter().map(Value::to_string).collect();
            ensure(got == [want], || format!("{name} state example gave {got:?}"))?;
            let cell: Vec<String> = mem.stack(&Location::new("c")).iter().map(Value::to_string).collect();
            ensure(cell == [want], || format!("{name} state example left c = {cell:?}"))?;
        }
        let twice = parse_lambda("(\\f:o -> o. \\x:o. f (f x)) ((\\y:o. m@y) <+> (\\y:o. n@y)) #z")
            .map_err(|e| e.to_string())?;
        let freq = |n: u64| n as f64 / EFFECT_RUNS as f64;
        let v = tally(&cbv(&twice).map_err(|e| e.to_string())?)?;
        let mm = v.get(&(true, true)).copied().unwrap_or(0);
        let nn = v.get(&(false, false)).copied().unwrap_or(0);
        ensure(mm + nn == EFFECT_RUNS, || format!("cbv outcomes {v:?}"))?;
        ensure((freq(mm) - 0.5).abs() <= FREQUENCY_TOLERANCE, || {
            format!("cbv m,m frequency {}", freq(mm))
        })?;
        let n = tally(&cbn(&twice).map_err(|e| e.to_string())?)?;
        ensure(n.len() == 4, || format!("cbn outcomes {n:?}"))?;
        let first: u64 = n.iter().filter(|(k, _)| k.0).map(|(_, c)| c).sum();
        let second: u64 = n.iter().filter(|(k, _)| k.1).map(|(_, c)| c).sum();
        for p in [freq(first), freq(second)] {
            ensure((p - 0.5).abs() <= FREQUENCY_TOLERANCE, || format!("cbn marginal {p}"))?;
        }
        for ((a, b), c) in &n {
            let pa = if *a { freq(first) } else { 1.0 - freq(first) };
            let pb = if *b { freq(second) } else { 1.0 - freq(second) };
            ensure((freq(*c) - pa * pb).abs() <= FREQUENCY_TOLERANCE, || {
                format!("cbn joint {n:?} not independent")
            })?;
        }
        Ok(format!(
            "state cbv 5 / cbn 3; cbv m,m {:.3}; cbn four outcomes {:?}",
            freq(mm),
            n.values().map(|c| freq(*c)).collect::<Vec<_>>()
        ))
    })
}

/// Every criterion, in order.
pub fn run_all() -> Vec<Outcome> {
    let c = corpus();
    vec![
        typing_golden(),
        state_normal_forms(),
        termination(&c),
        step_counting(&c),
        strict_decrease(&c),
        confluence(&c),
        equational_theory(),
        round_trips(),
        effects(),
    ]
}
