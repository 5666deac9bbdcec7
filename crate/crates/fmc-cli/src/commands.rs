//! The subcommands, each returning the text to print.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use fmc_equiv::{machine_equiv, EquivConfig, Verdict};
use fmc_machine::{run_with, Delta, MachineState, Memory, Policy, RunError, RunOptions, StepResult, Stream};
use fmc_measure::{measure, CountBig, Kind};
use fmc_rewrite::{all_paths, normalize_observed, Strategy};
use fmc_surface::{parse_program, parse_type, parse_value, Program};
use fmc_term::{Computation, Location, Value};
use fmc_translate::{
    cbn, cbv, collapse_comp_type, collapse_derivation, embed, embed_comp_type, free_functor, interpret_slc,
    LocationOrder,
};
use fmc_types::{check, infer, CompDerivation, CompType, Context, Signature};
use serde_json::json;

use crate::config::{Config, Format};
use crate::lamfile::parse_lambda_file;
use crate::CliError;

/// Read a file, or standard input for `-`.
pub fn read_source(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Parse a program, adding the signature of the configured signature file.
pub fn load_program(text: &str, cfg: &Config) -> Result<Program, CliError> {
    let mut p = parse_program(text).map_err(|e| CliError::Domain(e.to_string()))?;
    if let Some(path) = &cfg.signature {
        let extra =
            parse_program(&read_source(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        merge_signature(&mut p.signature, &extra.signature);
    }
    Ok(p)
}

fn merge_signature(into: &mut Signature, from: &Signature) {
    into.bases.extend(from.bases.iter().cloned());
    into.values
        .extend(from.values.iter().map(|(k, v)| (k.clone(), v.clone())));
    into.computations
        .extend(from.computations.iter().map(|(k, v)| (k.clone(), v.clone())));
}

fn main_term(p: &Program) -> Result<&Computation, CliError> {
    p.main
        .as_ref()
        .map(|d| &d.body)
        .ok_or_else(|| CliError::Domain("the program has no main term".into()))
}

/// The derivation of the main term: against its stated type, else inferred.
pub fn derive(p: &Program) -> Result<CompDerivation, CliError> {
    let m = main_term(p)?;
    let stated = p.main.as_ref().and_then(|d| d.ty.clone());
    let d = match stated {
        Some(t) => check(&p.signature, &Context::new(), m, &t),
        None => infer(&p.signature, &Context::new(), m),
    };
    d.map_err(|e| CliError::Domain(format!("ill-typed: {e}")))
}

fn emit(format: Format, text: String, value: serde_json::Value) -> String {
    match format {
        Format::Text => text,
        Format::Json => value.to_string(),
    }
}

pub fn cmd_parse(p: &Program, format: Format) -> Result<String, CliError> {
    let m = main_term(p)?;
    Ok(emit(format, m.to_string(), json!({ "term": m.to_string() })))
}

pub fn cmd_check(p: &Program, format: Format) -> Result<String, CliError> {
    let d = derive(p)?;
    let ty = d.ty().to_string();
    Ok(emit(format, ty.clone(), json!({ "type": ty })))
}

fn value(text: &str) -> Result<Value, CliError> {
    parse_value(text).map_err(|e| CliError::Usage(format!("value `{text}`: {e}")))
}

/// The initial memory: scripted and random streams, output streams,
/// cells and pushed inputs.
pub fn initial_memory(cfg: &Config, pushes: &[(String, String)]) -> Result<Memory, CliError> {
    let mut mem = Memory::new();
    let rnd = Location::new("rnd");
    mem.set_policy(rnd, Policy::ReadStream(Stream::random(cfg.seed.value())));
    for w in std::iter::once("out").chain(cfg.write_streams.iter().map(String::as_str)) {
        mem.set_policy(Location::new(w), Policy::WriteStream);
    }
    for (loc, items) in &cfg.streams {
        let vals = items.iter().map(|v| value(v)).collect::<Result<Vec<_>, _>>()?;
        mem.set_policy(Location::new(loc), Policy::ReadStream(Stream::script(vals)));
    }
    for (loc, v) in &cfg.cells {
        let l = Location::new(loc);
        mem.set_stack(l.clone(), vec![value(v)?]);
        mem.set_policy(l, Policy::Cell);
    }
    let mut stacks: BTreeMap<Location, Vec<Value>> = BTreeMap::new();
    for (loc, v) in pushes {
        stacks.entry(Location::new(loc)).or_default().push(value(v)?);
    }
    for (l, vs) in stacks {
        let mut all = mem.stack(&l);
        all.extend(vs);
        mem.set_stack(l, all);
    }
    Ok(mem)
}

/// Stacks as `loc=[v, ...]` lines, bottom first.
pub fn show_memory(m: &Memory) -> String {
    m.stacks()
        .iter()
        .map(|(l, vs)| {
            let items: Vec<String> = vs.iter().map(Value::to_string).collect();
            format!("{l}=[{}]", items.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn machine_error(e: RunError) -> CliError {
    CliError::Domain(e.to_string())
}

pub struct RunRequest<'a> {
    pub pushes: &'a [(String, String)],
    pub count_steps: bool,
    pub trace: Option<&'a Path>,
}

pub fn cmd_run(p: &Program, cfg: &Config, req: &RunRequest) -> Result<String, CliError> {
    let m = main_term(p)?;
    let mut opts = RunOptions::fuel(cfg.fuel).with_delta(Delta::arithmetic());
    if req.trace.is_some() {
        opts = opts.with_trace(cfg.fuel.min(1 << 20) as usize + 1);
    }
    let result = run_with(initial_memory(cfg, req.pushes)?, m, &opts);
    if let Some(path) = req.trace {
        let trace = match &result {
            Ok(r) => r.trace.clone(),
            Err(RunError::Stuck { trace, .. } | RunError::FuelExhausted { trace, .. }) => trace.clone(),
        };
        if let Some(t) = trace {
            let mut f = std::fs::File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            t.write_json_lines(&mut f)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        }
    }
    let r = result.map_err(machine_error)?;
    let mut text = show_memory(&r.memory);
    if req.count_steps {
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&format!("steps: {}", r.steps()));
    }
    let value = json!({ "memory": r.memory.to_json(), "steps": r.steps() });
    Ok(emit(cfg.format, text, value))
}

pub fn cmd_step(p: &Program, cfg: &Config, pushes: &[(String, String)]) -> Result<String, CliError> {
    let m = main_term(p)?;
    let delta = Delta::arithmetic();
    let mut state = MachineState::new(initial_memory(cfg, pushes)?, m.clone());
    let mut lines = vec![format!("0 start | {} | {}", state.focus, state.memory)];
    for k in 1..=cfg.fuel {
        match state.step(&delta) {
            StepResult::Success => return Ok(lines.join("\n")),
            StepResult::Stuck(e) => {
                return Err(CliError::Domain(format!("{}\nstuck: {e}", lines.join("\n"))));
            }
            StepResult::Stepped(rule, loc) => {
                let at = loc.map(|l| format!(" {l}")).unwrap_or_default();
                lines.push(format!("{k} {}{at} | {} | {}", rule.tag(), state.focus, state.memory));
            }
        }
    }
    if state.focus.is_star() {
        return Ok(lines.join("\n"));
    }
    Err(CliError::Domain(format!("{}\nfuel exhausted", lines.join("\n"))))
}

pub fn strategy(name: &str) -> Result<Strategy, CliError> {
    match name {
        "lo" | "leftmost-outermost" => Ok(Strategy::LeftmostOutermost),
        "ri" | "rightmost-innermost" => Ok(Strategy::RightmostInnermost),
        other => Err(CliError::Usage(format!(
            "unknown strategy `{other}`, expected lo or ri"
        ))),
    }
}

pub fn cmd_normalize(
    p: &Program,
    cfg: &Config,
    strat: Strategy,
    show_steps: bool,
    paths: bool,
) -> Result<String, CliError> {
    let m = main_term(p)?;
    if paths {
        let r = all_paths(m, cfg.fuel as usize);
        let forms: Vec<String> = r.normal_forms.iter().map(Computation::to_string).collect();
        let text = format!(
            "{}\nexplored: {}{}",
            forms.join("\n"),
            r.explored,
            if r.complete { "" } else { " (bound reached)" }
        );
        return Ok(emit(
            cfg.format,
            text,
            json!({ "normal_forms": forms, "explored": r.explored, "complete": r.complete }),
        ));
    }
    let mut steps = Vec::new();
    let nf = normalize_observed(m, strat, cfg.fuel, &mut |_, redex, after| {
        steps.push((redex.to_string(), after.to_string()));
    })
    .map_err(|e| CliError::Domain(e.to_string()))?;
    let mut lines = Vec::new();
    if show_steps {
        lines.push(format!("  {m}"));
        lines.extend(steps.iter().map(|(r, t)| format!("-> {t}    [{r}]")));
    }
    lines.push(nf.term.to_string());
    let s = nf.stats;
    lines.push(format!("beta: {} pi: {} phi: {} tau: {}", s.beta, s.pi, s.phi, s.tau));
    let value = json!({
        "normal_form": nf.term.to_string(),
        "steps": steps.iter().map(|(r, t)| json!({ "redex": r, "term": t })).collect::<Vec<_>>(),
        "beta": s.beta, "pi": s.pi, "phi": s.phi, "tau": s.tau,
    });
    Ok(emit(cfg.format, lines.join("\n"), value))
}

pub fn cmd_translate(text: &str, from: &str, to: &str, strat: Option<&str>, cfg: &Config) -> Result<String, CliError> {
    match (from, to) {
        ("lambda", "fmc") => {
            let f = parse_lambda_file(text)?;
            let t = match strat {
                Some("cbv") => cbv(&f.term),
                Some("cbn") => cbn(&f.term),
                Some(other) => {
                    return Err(CliError::Usage(format!(
                        "unknown strategy `{other}`, expected cbv or cbn"
                    )))
                }
                None => return Err(CliError::Usage("--strategy cbv|cbn is required".into())),
            }
            .map_err(|e| CliError::Domain(e.to_string()))?;
            Ok(emit(cfg.format, t.to_string(), json!({ "term": t.to_string() })))
        }
        ("lambda", "slc") => {
            let f = parse_lambda_file(text)?;
            let (t, ty) = free_functor(&f.sig, &f.ctx, &f.term).map_err(|e| CliError::Domain(e.to_string()))?;
            Ok(emit(
                cfg.format,
                format!("main : {ty} = {t}"),
                json!({ "term": t.to_string(), "type": ty.to_string() }),
            ))
        }
        ("slc", "lambda") | ("fmc", "lambda") => {
            let p = load_program(text, cfg)?;
            let d = derive(&p)?;
            let (ctx, m) =
                interpret_slc(&p.signature, main_term(&p)?, d.ty()).map_err(|e| CliError::Domain(e.to_string()))?;
            Ok(emit(
                cfg.format,
                format!("{ctx} |- {m}"),
                json!({ "context": ctx.to_string(), "term": m.to_string() }),
            ))
        }
        _ => Err(CliError::Usage(format!(
            "no translation from {from} to {to}; use lambda->fmc, lambda->slc or slc->lambda"
        ))),
    }
}

fn order_for(d: &CompDerivation, m: &Computation, order: Option<&str>) -> Result<LocationOrder, CliError> {
    match order {
        Some(s) => s
            .parse()
            .map_err(|e: fmc_translate::TranslateError| CliError::Usage(e.to_string())),
        None => {
            let mut locs: Vec<Location> = m.locations().into_iter().collect();
            let t = LocationOrder::for_type(d.ty());
            locs.extend(t.locations().iter().cloned());
            Ok(LocationOrder::standard(&locs))
        }
    }
}

pub fn cmd_collapse(p: &Program, order: Option<&str>, format: Format) -> Result<String, CliError> {
    let d = derive(p)?;
    let ord = order_for(&d, main_term(p)?, order)?;
    let c = collapse_derivation(&d, &ord).map_err(|e| CliError::Domain(e.to_string()))?;
    let ty = collapse_comp_type(d.ty(), &ord).map_err(|e| CliError::Domain(e.to_string()))?;
    let value = json!({ "term": c.to_string(), "type": ty.to_string(), "order": ord.to_string() });
    Ok(emit(format, format!("{c}\n: {ty}"), value))
}

pub fn cmd_embed(p: &Program, at: &str, order: Option<&str>, format: Format) -> Result<String, CliError> {
    let d = derive(p)?;
    let at = Location::new(at);
    let mut ord = order_for(&d, main_term(p)?, order)?;
    if ord.position(&at).is_err() {
        let mut locs = ord.locations().to_vec();
        locs.push(at.clone());
        ord = LocationOrder::standard(&locs);
    }
    let e = embed(main_term(p)?, &at, &p.signature, &ord).map_err(|e| CliError::Domain(e.to_string()))?;
    let ty = embed_comp_type(d.ty(), &at).map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(emit(
        format,
        format!("{e}\n: {ty}"),
        json!({ "term": e.to_string(), "type": ty.to_string() }),
    ))
}

pub fn cmd_equiv(a: &Program, b: &Program, ty: Option<&str>, cfg: &Config) -> Result<(String, bool), CliError> {
    let mut sig = a.signature.clone();
    merge_signature(&mut sig, &b.signature);
    let t: CompType = match ty {
        Some(s) => parse_type(s).map_err(|e| CliError::Usage(format!("--type: {e}")))?,
        None => derive(a)?.ty().clone(),
    };
    let (m, n) = (main_term(a)?, main_term(b)?);
    for (name, term) in [("first", m), ("second", n)] {
        check(&sig, &Context::new(), term, &t)
            .map_err(|e| CliError::Domain(format!("{name} term is ill-typed at {t}: {e}")))?;
    }
    let ecfg = EquivConfig {
        depth: cfg.depth,
        fuel: cfg.fuel,
        seed: cfg.seed.value(),
        ..EquivConfig::default()
    };
    let v = machine_equiv(&sig, m, n, &t, &ecfg).map_err(|e| CliError::Domain(e.to_string()))?;
    let distinguished = matches!(v, Verdict::Distinguished { .. });
    Ok((v.to_json().to_string(), !distinguished))
}

pub fn cmd_measure(p: &Program, kind: Kind, fuel_check: bool, cfg: &Config) -> Result<String, CliError> {
    let d = derive(p)?;
    let n: CountBig = measure(kind, &Context::new(), &d).map_err(|e| CliError::Domain(e.to_string()))?;
    let mut text = n.to_string();
    let mut value = json!({ "kind": format!("{kind:?}").to_lowercase(), "measure": n.to_string() });
    if fuel_check {
        let fuel: u64 = n
            .to_string()
            .parse()
            .map_err(|_| CliError::Domain(format!("measure {n} exceeds the machine's fuel range")))?;
        let m = main_term(p)?;
        let r = run_with(initial_memory(cfg, &[])?, m, &RunOptions::fuel(fuel)).map_err(machine_error)?;
        text.push_str(&format!("\nmachine steps: {} (fuel {fuel})", r.steps()));
        value["machine_steps"] = json!(r.steps());
    }
    Ok(emit(cfg.format, text, value))
}
