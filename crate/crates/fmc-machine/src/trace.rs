use std::io::{self, Write};

use fmc_term::{Computation, Location};

use crate::{MachineState, Memory, Rule};

/// One recorded state. The first entry of a trace has no rule.
#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub step: usize,
    pub rule: Option<Rule>,
    pub loc: Option<Location>,
    pub focus: Computation,
    pub memory: Memory,
}

/// A bounded run trace. Entry `i + 1` results from entry `i` by its rule.
#[derive(Clone, Debug)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    pub limit: usize,
    pub truncated: bool,
}

impl Trace {
    pub(crate) fn start(limit: usize, state: &MachineState) -> Trace {
        let mut t = Trace {
            entries: Vec::new(),
            limit,
            truncated: false,
        };
        t.push(None, None, state);
        t
    }

    pub(crate) fn record(&mut self, rule: Rule, loc: Option<Location>, state: &MachineState) {
        self.push(Some(rule), loc, state);
    }

    fn push(&mut self, rule: Option<Rule>, loc: Option<Location>, state: &MachineState) {
        if self.entries.len() >= self.limit {
            self.truncated = true;
            return;
        }
        self.entries.push(TraceEntry {
            step: self.entries.len(),
            rule,
            loc,
            focus: state.focus.clone(),
            memory: state.memory.clone(),
        });
    }

    /// One JSON object per line:
    /// `{"step":k,"rule":"pop","loc":"c","focus":"...","memory":{"c":["..."]}}`.
    pub fn write_json_lines(&self, out: &mut dyn Write) -> io::Result<()> {
        for e in &self.entries {
            writeln!(out, "{}", e.to_json())?;
        }
        Ok(())
    }
}

impl TraceEntry {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "step": self.step,
            "rule": self.rule.map_or("start", Rule::tag),
            "loc": self.loc.as_ref().map(|l| l.name().to_string()),
            "focus": self.focus.to_string(),
            "memory": self.memory.to_json(),
        })
    }
}
