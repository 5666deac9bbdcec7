use std::collections::BTreeMap;

use fmc_types::Signature;

use crate::{Axiom, AxiomInstance, EquivConfig, Tester, Verdict};

/// Verdict counts for one law.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomTally {
    pub equivalent: usize,
    pub inconclusive: usize,
    pub distinguished: usize,
}

/// The outcome of testing a corpus of instances.
#[derive(Clone, Debug)]
pub struct Report {
    pub depth: usize,
    pub instances: usize,
    pub inputs_tested: usize,
    pub by_axiom: BTreeMap<Axiom, AxiomTally>,
    /// Instances that were distinguished or could not be tested.
    pub failures: Vec<(AxiomInstance, String)>,
}

impl Report {
    pub fn distinguished(&self) -> usize {
        self.by_axiom.values().map(|t| t.distinguished).sum()
    }

    /// True when no instance was distinguished and none failed to run.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let by_axiom: serde_json::Map<String, serde_json::Value> = self
            .by_axiom
            .iter()
            .map(|(a, t)| {
                (
                    a.tag().to_string(),
                    serde_json::json!({
                        "equivalent": t.equivalent,
                        "inconclusive": t.inconclusive,
                        "distinguished": t.distinguished,
                    }),
                )
            })
            .collect();
        let failures: Vec<serde_json::Value> = self
            .failures
            .iter()
            .map(|(i, why)| {
                serde_json::json!({
                    "axiom": i.axiom.tag(),
                    "type": i.ty.to_string(),
                    "lhs": i.lhs.to_string(),
                    "rhs": i.rhs.to_string(),
                    "reason": why,
                })
            })
            .collect();
        serde_json::json!({
            "depth": self.depth,
            "instances": self.instances,
            "inputs-tested": self.inputs_tested,
            "by_axiom": by_axiom,
            "failures": failures,
        })
    }
}

/// Test every instance; a distinguished instance is a failure.
pub fn validate_theory(sig: &Signature, instances: &[AxiomInstance], cfg: &EquivConfig) -> Report {
    let mut tester = Tester::new(sig, cfg.clone());
    let mut report = Report {
        depth: cfg.depth,
        instances: instances.len(),
        inputs_tested: 0,
        by_axiom: BTreeMap::new(),
        failures: Vec::new(),
    };
    for inst in instances {
        let tally = report.by_axiom.entry(inst.axiom).or_default();
        match tester.equiv(&inst.lhs, &inst.rhs, &inst.ty) {
            Ok(v) => {
                report.inputs_tested += v.inputs_tested();
                match &v {
                    Verdict::Equivalent { .. } => tally.equivalent += 1,
                    Verdict::Inconclusive { .. } => tally.inconclusive += 1,
                    Verdict::Distinguished { .. } => {
                        tally.distinguished += 1;
                        report.failures.push((inst.clone(), v.to_string()));
                    }
                }
            }
            Err(e) => report.failures.push((inst.clone(), e.to_string())),
        }
    }
    report
}
