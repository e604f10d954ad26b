//! Pass/fail outcomes that carry their residuals as certificates.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NecessaryOnly,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NecessaryOnly => "necessary-only",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    /// Nonzero residuals; empty for a passing check.
    pub residuals: Vec<Expr>,
}

impl Check {
    /// Passes iff every residual is zero.
    pub fn zero<I: IntoIterator<Item = Expr>>(name: impl Into<String>, residuals: I) -> Check {
        let residuals: Vec<Expr> = residuals.into_iter().filter(|e| !e.is_zero()).collect();
        let verdict = if residuals.is_empty() { Verdict::Pass } else { Verdict::Fail };
        Check { name: name.into(), verdict, residuals }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Check {
        Check { name: name.into(), verdict: if ok { Verdict::Pass } else { Verdict::Fail }, residuals: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    /// Named results (currents, weights, ...) rendered as text.
    pub outputs: Vec<(String, String)>,
    pub millis: u128,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn with_check(mut self, c: Check) -> Report {
        self.checks.push(c);
        self
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn output(&mut self, name: impl Into<String>, value: impl fmt::Display) {
        self.outputs.push((name.into(), value.to_string()));
    }

    /// Appends all checks of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}: {}", c.name);
            self.checks.push(c);
        }
        for (k, v) in other.outputs {
            self.outputs.push((format!("{prefix}: {k}"), v));
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if self.checks.iter().any(|c| c.verdict == Verdict::NecessaryOnly) {
            Verdict::NecessaryOnly
        } else {
            Verdict::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "command": self.command,
            "verdict": self.verdict(),
            "checks": self.checks.iter().map(|c| serde_json::json!({
                "name": c.name,
                "verdict": c.verdict,
                "residuals": c.residuals.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "outputs": self.outputs.iter().map(|(k, v)| serde_json::json!({"name": k, "value": v})).collect::<Vec<_>>(),
            "millis": self.millis as u64,
        })
    }

    /// Inverse of [`Report::to_json`]; residuals are re-read with `parse`.
    pub fn from_json(v: &serde_json::Value, parse: &dyn Fn(&str) -> Result<Expr>) -> Result<Report> {
        let bad = |what: &str| Error::Schema { path: what.to_string(), msg: "missing or malformed".into() };
        let text = |v: &serde_json::Value, what: &str| v.as_str().map(str::to_string).ok_or_else(|| bad(what));
        let verdict = |v: &serde_json::Value| serde_json::from_value::<Verdict>(v.clone()).map_err(|_| bad("verdict"));
        let mut checks = Vec::new();
        for c in v["checks"].as_array().ok_or_else(|| bad("checks"))? {
            let residuals = c["residuals"]
                .as_array()
                .ok_or_else(|| bad("checks.residuals"))?
                .iter()
                .map(|r| parse(&text(r, "checks.residuals")?))
                .collect::<Result<_>>()?;
            checks.push(Check { name: text(&c["name"], "checks.name")?, verdict: verdict(&c["verdict"])?, residuals });
        }
        let outputs = match v.get("outputs") {
            None => Vec::new(),
            Some(o) => o
                .as_array()
                .ok_or_else(|| bad("outputs"))?
                .iter()
                .map(|o| Ok((text(&o["name"], "outputs.name")?, text(&o["value"], "outputs.value")?)))
                .collect::<Result<_>>()?,
        };
        let r = Report {
            command: text(&v["command"], "command")?,
            checks,
            outputs,
            millis: v["millis"].as_u64().ok_or_else(|| bad("millis"))? as u128,
        };
        if verdict(&v["verdict"])? != r.verdict() {
            return Err(Error::Schema { path: "verdict".into(), msg: "disagrees with the checks".into() });
        }
        Ok(r)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.command, self.verdict())?;
        for c in &self.checks {
            writeln!(f, "  [{}] {}", c.verdict, c.name)?;
            for r in &c.residuals {
                writeln!(f, "      residual: {r}")?;
            }
        }
        for (k, v) in &self.outputs {
            writeln!(f, "  {k} = {v}")?;
        }
        Ok(())
    }
}
