//! Effects under the two evaluation strategies, run on the machine.

use std::collections::BTreeMap;

use fmc_machine::{run_with, Delta, Memory, Policy, RunOptions, Stream};
use fmc_term::{Computation, Location, Value};
use fmc_translate::lambda::parse_lambda;
use fmc_translate::{cbn, cbv};

const RUNS: u64 = 1000;
/// Allowed deviation of an observed frequency from its expected value.
const TOLERANCE: f64 = 0.05;

fn out() -> Location {
    Location::new("out")
}

/// `m` and `n` record their name on `out` and return their argument.
fn logging() -> Delta {
    let log = |name: &'static str| {
        move |mem: &mut Memory| {
            let v = mem.pop(&Location::main())?;
            mem.push(&out(), Value::constant(name))?;
            mem.push(&Location::main(), v)
        }
    };
    Delta::new().with("m", log("m")).with("n", log("n"))
}

fn memory(seed: u64) -> Memory {
    Memory::from_stacks([(Location::new("c"), vec![Value::constant("0")])])
        .with_policy(Location::new("c"), Policy::Cell)
        .with_policy(Location::new("rnd"), Policy::ReadStream(Stream::random(seed)))
        .with_policy(out(), Policy::WriteStream)
}

fn run(term: &Computation, seed: u64) -> Memory {
    let opts = RunOptions::fuel(10_000).with_delta(logging());
    run_with(memory(seed), term, &opts).expect("run succeeds").memory
}

fn names(vs: &[Value]) -> Vec<String> {
    vs.iter().map(Value::to_string).collect()
}

#[test]
fn state_call_by_value_reads_the_later_write() {
    let m = parse_lambda("c := #3; (\\x:o. !c) (c := #5; #7)").unwrap();
    let mem = run(&cbv(&m).unwrap(), 0);
    assert_eq!(names(&mem.stack(&Location::main())), ["5"]);
}

#[test]
fn state_call_by_name_discards_the_unused_write() {
    let m = parse_lambda("c := #3; (\\x:o. !c) (c := #5; #7)").unwrap();
    let mem = run(&cbn(&m).unwrap(), 0);
    assert_eq!(names(&mem.stack(&Location::main())), ["3"]);
}

const TWICE: &str = "(\\f:o -> o. \\x:o. f (f x)) ((\\y:o. m@y) <+> (\\y:o. n@y)) #z";

fn tally(term: &Computation) -> BTreeMap<Vec<String>, u64> {
    let mut counts = BTreeMap::new();
    for seed in 0..RUNS {
        let mem = run(term, seed);
        assert_eq!(names(&mem.stack(&Location::main())), ["#z"]);
        *counts.entry(names(&mem.stack(&out()))).or_insert(0) += 1;
    }
    counts
}

fn freq(n: u64) -> f64 {
    n as f64 / RUNS as f64
}

#[test]
fn call_by_value_chooses_once() {
    let counts = tally(&cbv(&parse_lambda(TWICE).unwrap()).unwrap());
    let mm = counts
        .get(&vec!["#m".to_string(), "#m".to_string()])
        .copied()
        .unwrap_or(0);
    let nn = counts
        .get(&vec!["#n".to_string(), "#n".to_string()])
        .copied()
        .unwrap_or(0);
    assert_eq!(mm + nn, RUNS, "{counts:?}");
    assert!((freq(mm) - 0.5).abs() <= TOLERANCE, "{counts:?}");
}

#[test]
fn call_by_name_chooses_at_each_use() {
    let counts = tally(&cbn(&parse_lambda(TWICE).unwrap()).unwrap());
    assert_eq!(counts.len(), 4, "{counts:?}");
    let inner_m: u64 = counts.iter().filter(|(k, _)| k[0] == "#m").map(|(_, n)| n).sum();
    let outer_m: u64 = counts.iter().filter(|(k, _)| k[1] == "#m").map(|(_, n)| n).sum();
    assert!((freq(inner_m) - 0.5).abs() <= TOLERANCE, "{counts:?}");
    assert!((freq(outer_m) - 0.5).abs() <= TOLERANCE, "{counts:?}");
    for (k, n) in &counts {
        let p_inner = if k[0] == "#m" {
            freq(inner_m)
        } else {
            1.0 - freq(inner_m)
        };
        let p_outer = if k[1] == "#m" {
            freq(outer_m)
        } else {
            1.0 - freq(outer_m)
        };
        assert!((freq(*n) - p_inner * p_outer).abs() <= TOLERANCE, "{counts:?}");
    }
}
