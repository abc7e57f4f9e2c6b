//! Check records and the report printed by every command.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::format::FileScalar;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: String,
    pub passed: bool,
    pub residual: Option<Value>,
    pub lambda: Option<Value>,
    pub details: Map<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            verdict: verdict.into(),
            passed,
            residual: None,
            lambda: None,
            details: Map::new(),
        }
    }

    /// Informational record: never counts as a failure.
    pub fn info(name: impl Into<String>, verdict: impl Into<String>) -> Self {
        Self::new(name, verdict, true)
    }

    pub fn residual<T: FileScalar>(mut self, r: &T) -> Self {
        self.residual = Some(r.encode());
        self
    }

    pub fn lambda<T: FileScalar>(mut self, l: &T) -> Self {
        self.lambda = Some(l.encode());
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input_sha256: Option<String>,
    pub mode: Option<String>,
    pub tolerance: f64,
    pub checks: Vec<Check>,
    pub failed: usize,
}

impl Report {
    pub fn new(command: impl Into<String>, tolerance: f64) -> Self {
        Self {
            tool: "nilcurv".into(),
            version: VERSION.into(),
            command: command.into(),
            input_sha256: None,
            mode: None,
            tolerance,
            checks: Vec::new(),
            failed: 0,
        }
    }

    pub fn push(&mut self, c: Check) {
        if !c.passed {
            self.failed += 1;
        }
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        cs.into_iter().for_each(|c| self.push(c));
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed > 0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("nilcurv {} {}\n", self.version, self.command);
        if let Some(h) = &self.input_sha256 {
            out.push_str(&format!("input sha256 {h}\n"));
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let vwidth = self.checks.iter().map(|c| c.verdict.len()).max().unwrap_or(0);
        for c in &self.checks {
            let mut line = format!(
                "{}  {:width$}  {:vwidth$}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.verdict
            );
            if let Some(r) = &c.residual {
                line.push_str(&format!("  residual={}", plain(r)));
            }
            if let Some(l) = &c.lambda {
                line.push_str(&format!("  lambda={}", plain(l)));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), self.failed));
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `f64` as a report value; `None` for non-finite numbers.
pub fn number(x: f64) -> Value {
    x.encode()
}
