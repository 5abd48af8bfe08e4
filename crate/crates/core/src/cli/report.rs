use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub p: u32,
    /// `p` was not given and fell back to 2
    pub p_defaulted: bool,
    pub depth: usize,
    pub max_cosets: usize,
    pub trials: usize,
    pub enum_budget: u64,
    pub seed: u64,
    pub format: Format,
    /// `None` disables the cache
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            p_defaulted: true,
            depth: 6,
            max_cosets: 20000,
            trials: 64,
            enum_budget: 1 << 22,
            seed: 0,
            format: Format::Text,
            cache_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !crate::exactlin::is_prime(self.p) {
            return Err(Error::Config(format!("p = {} is not prime", self.p)));
        }
        for (name, v) in [
            ("depth", self.depth as u64),
            ("max-cosets", self.max_cosets as u64),
            ("trials", self.trials as u64),
            ("enum-budget", self.enum_budget),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Everything that can change a result; the cache location and output format cannot.
    pub fn echo(&self) -> Value {
        json!({
            "p": self.p,
            "depth": self.depth,
            "max_cosets": self.max_cosets,
            "trials": self.trials,
            "enum_budget": self.enum_budget,
            "seed": self.seed,
        })
    }

    pub fn ks_options(&self) -> crate::modrep::KsOptions {
        crate::modrep::KsOptions {
            trials: self.trials,
            enum_budget: self.enum_budget,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Check {
        Check {
            name: name.into(),
            pass,
        }
    }
}

/// The computed part of a report, which is what the cache stores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    pub result: Value,
    pub checks: Vec<Check>,
    /// uncertainty markers such as `inconclusive` or `probabilistic`
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub payload: Payload,
    pub cached: bool,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.payload.checks.iter().all(|c| c.pass)
    }

    /// Key order is sorted, so equal reports serialize to equal bytes.
    pub fn to_value(&self) -> Value {
        let mut checks = Map::new();
        for c in &self.payload.checks {
            checks.insert(
                c.name.clone(),
                Value::String(if c.pass { "pass" } else { "FAIL" }.into()),
            );
        }
        json!({
            "command": self.command,
            "config": self.config,
            "result": self.payload.result,
            "checks": checks,
            "flags": self.payload.flags,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_value()).expect("json");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                write_text(&self.to_value(), 0, &mut out);
                out
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().map(|x| scalar(x).unwrap()).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        // arrays of flat arrays stay on one line too
        Value::Array(a)
            if a.iter().all(|x| {
                x.as_array()
                    .is_some_and(|y| y.iter().all(|z| !z.is_object() && !z.is_array()))
            }) =>
        {
            let parts: Vec<String> = a.iter().map(|x| scalar(x).unwrap()).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn write_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None if x.as_object().is_some_and(|o| o.is_empty()) => out.push_str(&format!("{pad}{k}: {{}}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_text(x, indent + 1, out);
                    }
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x).unwrap_or_default())),
    }
}

/// 0 for success, 1 for input errors, 2 for budget and configuration errors.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) | Error::Config(_) | Error::IndexInfinite => 2,
        _ => 1,
    }
}

/// Exit status for a failed built-in invariant check.
pub const EXIT_CHECK_FAILED: i32 = 3;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering_is_sorted() {
        let r = Report {
            command: "ends Zp".into(),
            config: RunConfig::default().echo(),
            payload: Payload {
                result: json!({"z": 1, "a": [1, 2], "m": {"k": [[1, 0], [0]]}, "list": [{"b": 1, "a": 2}]}),
                checks: vec![Check::new("monotone", true)],
                flags: vec![],
            },
            cached: false,
        };
        let t = r.render(Format::Text);
        assert!(t.starts_with("checks:\n  monotone: pass\ncommand: ends Zp\nconfig:\n"));
        assert!(t.contains(
            "result:\n  a: [1, 2]\n  list:\n    -\n      a: 2\n      b: 1\n  m:\n    k: [[1, 0], [0]]\n  z: 1\n"
        ));
        let j: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(j["checks"]["monotone"], "pass");
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            p: 4,
            ..RunConfig::default()
        };
        assert_eq!(exit_code(&bad.validate().unwrap_err()), 2);
        let bad = RunConfig {
            trials: 0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
