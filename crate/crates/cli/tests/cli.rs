use std::collections::BTreeMap;
use std::process::Command;

use hilbloc::Error;
use hilbloc_cli::commands::{exit_code, EXIT_RESOURCE, EXIT_USAGE, EXIT_VIOLATION};
use hilbloc_cli::{dispatch, Output};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    let argv: Vec<String> = std::iter::once("hilbloc").chain(args.iter().copied()).map(String::from).collect();
    dispatch(&argv, None)
}

fn result(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    v["result"].clone()
}

#[test]
fn documented_examples() {
    assert_eq!(result(&["colength", "--ring", "cusp", "x*y, y^2"])["colength"], 3);
    assert_eq!(result(&["flag-model", "--m", "4", "--chain", "2,2,1,1", "--relative"])["equation_count"], 2);
    assert_eq!(result(&["tangent", "--ring", "cusp", "x*y, y^3"])["dim"], 5);
}

#[test]
fn node_commands() {
    assert_eq!(result(&["colength", "x^3, y^2"])["colength"], 4);
    let c = result(&["classify", "y^2 + 3*x^3"]);
    assert_eq!(c["class"]["type"], "TypeC");
    assert_eq!(c["class"]["i"], 2);
    assert_eq!(c["class"]["m"], 5);
    assert_eq!(c["class"]["a"], "3");
    assert_eq!(result(&["classify", "x^2, y^3"])["class"]["type"], "TypeQ");
    assert_eq!(result(&["member", "x*y + x^2", "x^2, y^3"])["member"], true);
    assert_eq!(result(&["member", "y^2", "x^2, y^3"])["member"], false);
    let r = result(&["relations", "--m", "3", "--i", "2", "--relative"]);
    assert_eq!(r["matches_closed_form"], true);
    assert_eq!(r["relative"], true);
    let r = result(&["relations", "--ring", "node-rel", "--m", "3", "--i", "1"]);
    assert_eq!(r["relative"], true);
}

#[test]
fn flag_commands() {
    let e = result(&["flag-expected", "--m", "5", "--chain", "3,3,2", "--relative"]);
    assert_eq!(e["matches_derived"], true);
    assert_eq!(e["equation_count"], 1);
    assert_eq!(result(&["flag-expected", "--m", "5", "--chain", "3,3,2"])["equation_count"], 2);
    let v = result(&["flag-validate", "--m", "4", "--chain", "2,2", "--trials", "3"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["forward_trials"], 3);
    assert_eq!(result(&["lci-check", "--m", "5", "--chain", "2,2,1,1", "--relative"])["lci"], true);
    let s = result(&["strata", "--m", "3"]);
    assert_eq!(s["count"], 3);
    assert_eq!(s["agree"], true);
    assert_eq!(s["chains"][2]["indices"], serde_json::json!([2, 2, 1]));
}

#[test]
fn cusp_commands() {
    let a = result(&["assoc-form", "--ring", "cusp", "(1+y)*x + 2*y"]);
    assert_eq!(a["canonical"]["kind"], "Binom");
    assert_eq!(a["canonical"]["a"], "2");
    assert_eq!(result(&["classify", "--ring", "cusp", "x + y, x"])["canonical"], "(x, y)");
    let l = result(&["limit", "--ring", "cusp", "--m", "1", "--k", "2", "--dir", "inf"]);
    assert_eq!(l["certificate"]["certified"], true);
    assert_eq!(l["limit"], "(x*y^2, y^3)");
    assert_eq!(result(&["distinct", "--ring", "cusp", "--m", "1", "--k", "1", "--a", "1", "--b", "-2"])["distinct"], true);
    let d = result(&["distinct", "--ring", "cusp", "x + a*y^2", "--a", "1/2", "--b", "3"]);
    assert_eq!(d["distinct"], true);
    assert_eq!(d["colength_a"], 3);
    let s = result(&["scan-p1", "--ring", "cusp", "--colength", "3"]);
    let dims: Vec<u64> = s["points"].as_array().unwrap().iter().map(|p| p["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![3, 3, 3, 3, 3, 4]);
    assert_eq!(s["jumps"], 1);
}

#[test]
fn json_is_sorted_with_lf_endings() {
    let out = run(&["colength", "--ring", "cusp", "x*y, y^2"]);
    assert!(!out.stdout.contains('\r') && out.stdout.ends_with("}\n"));
    let keys: Vec<usize> =
        ["\"args\"", "\"command\"", "\"config\"", "\"result\"", "\"violations\""].iter().map(|k| out.stdout.find(k).unwrap()).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(a) if !a.is_empty() => a.iter().enumerate().for_each(|(k, x)| flatten(&join(&k.to_string()), x, out)),
        Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        Value::Object(_) => {
            out.insert(prefix.to_string(), "{}".into());
        }
        Value::Array(_) => {
            out.insert(prefix.to_string(), "[]".into());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

#[test]
fn tsv_carries_the_json_payload() {
    for args in [
        vec!["tangent", "--ring", "cusp", "x*y, y^3"],
        vec!["strata", "--m", "4", "--depth", "2"],
        vec!["classify", "--ring", "cusp", "x*y^2 - 3/2*y^4, y^5"],
    ] {
        let json = run(&args);
        let mut with_tsv = args.clone();
        with_tsv.push("--tsv");
        let tsv = run(&with_tsv);
        assert_eq!((json.code, tsv.code), (0, 0));
        let mut from_json = BTreeMap::new();
        let mut v: Value = serde_json::from_str(&json.stdout).unwrap();
        v["args"] = Value::Null;
        flatten("", &v, &mut from_json);
        let mut lines = tsv.stdout.lines();
        assert_eq!(lines.next(), Some("key\tvalue"));
        let from_tsv: BTreeMap<String, String> = lines
            .filter(|l| !l.starts_with("args"))
            .map(|l| {
                let (k, v) = l.split_once('\t').unwrap();
                (k.to_string(), v.to_string())
            })
            .collect();
        from_json.remove("args");
        assert_eq!(from_json, from_tsv);
    }
}

#[test]
fn reports_are_reproducible_and_record_the_seed() {
    let args = ["flag-validate", "--m", "3", "--chain", "2,1", "--trials", "4"];
    assert_eq!(run(&args), run(&args));
    let argv: Vec<String> = std::iter::once("hilbloc").chain(args).map(String::from).collect();
    let from_env: Value = serde_json::from_str(&dispatch(&argv, Some("42")).stdout).unwrap();
    assert_eq!(from_env["config"]["seed"], 42);
    assert_eq!(from_env["config"]["seed_source"], "env");
    let mut explicit = argv.clone();
    explicit.extend(["--seed".to_string(), "7".to_string()]);
    let flagged: Value = serde_json::from_str(&dispatch(&explicit, Some("42")).stdout).unwrap();
    assert_eq!(flagged["config"]["seed"], 7);
    assert_eq!(flagged["config"]["seed_source"], "flag");
    assert_eq!(dispatch(&argv, Some("many")).code, EXIT_USAGE);
}

#[test]
fn usage_errors() {
    let out = run(&["colength", "x^"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("offset 2"), "{}", out.stderr);
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&["colength", "--bogus", "x"]).code, EXIT_USAGE);
    let sym = run(&["colength", "--ring", "cusp", "x + a*y"]);
    assert_eq!(sym.code, EXIT_USAGE);
    assert!(sym.stderr.contains("parameter `a`"));
    assert_eq!(run(&["tangent", "x*y"]).code, EXIT_USAGE);
    assert_eq!(run(&["colength", "--ring", "node-rel", "x"]).code, EXIT_USAGE);
    assert_eq!(run(&["flag-model", "--m", "4", "--chain", "2,3"]).code, EXIT_USAGE);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("scan-p1"));
}

#[test]
fn resource_caps() {
    assert_eq!(run(&["--max-vars", "3", "lci-check", "--m", "4", "--chain", "2,2,1,1"]).code, EXIT_RESOURCE);
    assert_eq!(run(&["--trunc", "40", "colength", "y^3"]).code, EXIT_RESOURCE);
}

#[test]
fn exit_codes_by_error() {
    assert_eq!(exit_code(&Error::TheoremViolation("x".into())), EXIT_VIOLATION);
    assert_eq!(exit_code(&Error::VariableCap { needed: 20, cap: 16 }), EXIT_RESOURCE);
    assert_eq!(exit_code(&Error::InfiniteColength { cap: 8 }), EXIT_RESOURCE);
    assert_eq!(exit_code(&Error::Syntax { offset: 0, message: String::new() }), EXIT_USAGE);
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_hilbloc");
    let ok = Command::new(bin).args(["colength", "--ring", "cusp", "x*y, y^2"]).env_remove("HILBLOC_SEED").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["result"]["colength"], 3);
    let env = Command::new(bin).args(["colength", "x, y"]).env("HILBLOC_SEED", "99").output().unwrap();
    let v: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 99);
    let bad = Command::new(bin).args(["colength", "x^"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let cap = Command::new(bin).args(["--trunc", "40", "colength", "y^3"]).output().unwrap();
    assert_eq!(cap.status.code(), Some(3));
}
