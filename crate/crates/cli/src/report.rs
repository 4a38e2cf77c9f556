//! Deterministic reports.

use serde::Serialize;
use serde_json::{json, Value};

/// Output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Tsv,
}

/// Run settings echoed into every report.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Config {
    pub trunc: u32,
    pub seed: u64,
    pub seed_source: &'static str,
    pub ring: String,
    pub max_vars: usize,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub config: Config,
    pub result: Value,
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(command: &str, args: Vec<String>, config: Config, result: Value) -> Self {
        Report { command: command.to_string(), args, config, result, violations: Vec::new() }
    }

    pub fn violation(mut self, flag: impl Into<String>) -> Self {
        self.violations.push(flag.into());
        self
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "args": self.args,
            "config": self.config,
            "result": self.result,
            "violations": self.violations,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_value()).expect("values serialize");
                s.push('\n');
                s
            }
            Format::Tsv => {
                let mut rows = Vec::new();
                flatten("", &self.to_value(), &mut rows);
                let mut s = String::from("key\tvalue\n");
                for (k, v) in rows {
                    s.push_str(&k);
                    s.push('\t');
                    s.push_str(&v);
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Dotted-path rows of a JSON value, keys in sorted order.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                out.push((prefix.to_string(), "{}".into()));
            }
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push((prefix.to_string(), "[]".into()));
            }
            for (k, x) in items.iter().enumerate() {
                flatten(&join(&k.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), clean(s))),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let cfg = Config { trunc: 64, seed: 1, seed_source: "default", ring: "cusp".into(), max_vars: 16 };
        Report::new("colength", vec!["x*y, y^2".into()], cfg, json!({"zeta": [1, 2], "colength": 3}))
    }

    #[test]
    fn json_keys_are_sorted() {
        let s = sample().render(Format::Json);
        assert!(s.find("\"args\"").unwrap() < s.find("\"command\"").unwrap());
        assert!(s.find("\"colength\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.ends_with("}\n") && !s.contains('\r'));
    }

    #[test]
    fn tsv_rows() {
        let s = sample().render(Format::Tsv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "key\tvalue");
        assert!(lines.contains(&"result.colength\t3"));
        assert!(lines.contains(&"result.zeta.1\t2"));
        assert!(lines.contains(&"violations\t[]"));
        assert!(lines.iter().all(|l| l.split('\t').count() == 2));
    }

    #[test]
    fn violations_flip_status() {
        assert!(sample().ok());
        assert!(!sample().violation("x").ok());
    }
}
