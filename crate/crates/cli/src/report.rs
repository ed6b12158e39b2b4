//! Command reports and their JSON and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use bvquant::quantisation::{Bounds, TieBreak};
use bvquant::toy_models::Orientation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub hbar_order: i64,
    pub bounds: Bounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<TieBreak>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub problem: String,
    pub verdict: Verdict,
    pub settings: Settings,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl Report {
    pub fn new(command: &str, problem: &str, settings: Settings) -> Self {
        Report {
            command: command.to_string(),
            problem: problem.to_string(),
            verdict: Verdict::Pass,
            settings,
            checks: Vec::new(),
            values: BTreeMap::new(),
            elapsed_ms: None,
        }
    }

    pub fn check(&mut self, name: &str, verdict: Verdict, detail: impl ToString) {
        self.verdict = self.verdict.max(verdict);
        self.checks.push(Check { name: name.to_string(), verdict, detail: detail.to_string() });
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}: {}", self.command, self.problem, self.verdict.label());
        for c in &self.checks {
            let _ = write!(out, "  [{}] {}", c.verdict.label(), c.name);
            if !c.detail.is_empty() {
                let _ = write!(out, ": {}", c.detail);
            }
            out.push('\n');
        }
        for (k, v) in &self.values {
            match v {
                Value::String(s) => {
                    let _ = writeln!(out, "  {k} = {s}");
                }
                v => {
                    let _ = writeln!(out, "  {k} = {v}");
                }
            }
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(out, "  elapsed: {ms} ms");
        }
        out
    }
}
