//! Reports from every command conform to `schema/report.schema.json`.
//!
//! Only the keywords the schema uses are interpreted: type, required, properties,
//! items, enum and const.

use fock_core::cli::execute;
use fock_core::cli::Command;
use fock_core::config::RunConfig;
use serde_json::Value;

fn schema() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "integer" => v.is_u64() || v.is_i64(),
        "number" => v.is_number(),
        "null" => v.is_null(),
        other => panic!("schema uses unsupported type {other}"),
    }
}

fn validate(schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    match &schema["type"] {
        Value::String(t) if !type_matches(t, v) => errors.push(format!("{path}: expected {t}")),
        Value::Array(ts) if !ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)) => {
            errors.push(format!("{path}: expected one of {ts:?}"))
        }
        _ => {}
    }
    if let Some(options) = schema["enum"].as_array() {
        if !options.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            errors.push(format!("{path}: expected {c}"));
        }
    }
    if let (Some(req), Some(obj)) = (schema["required"].as_array(), v.as_object()) {
        for key in req {
            if !obj.contains_key(key.as_str().unwrap()) {
                errors.push(format!("{path}: missing {key}"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (schema["properties"].as_object(), v.as_object()) {
        for (key, sub) in props {
            if let Some(child) = obj.get(key) {
                validate(sub, child, &format!("{path}.{key}"), errors);
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            validate(items, child, &format!("{path}[{i}]"), errors);
        }
    }
}

fn report(command: Command, config: &str) -> Value {
    let raw: Value = serde_json::from_str(config).unwrap();
    let r = execute(command, &RunConfig::from_json(config).unwrap(), &raw, None, None).unwrap();
    serde_json::from_str(&r.to_json()).unwrap()
}

fn assert_conforms(v: &Value) {
    let mut errors = vec![];
    validate(&schema(), v, "$", &mut errors);
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn decompose_report_conforms() {
    let v = report(Command::Decompose, r#"{"operator": {"n": 1, "A": [[4, 0], [0, 1]]}}"#);
    assert!(v["context"]["realForm"].is_object());
    assert_conforms(&v);
}

#[test]
fn decompose_without_real_form_conforms() {
    let v = report(Command::Decompose, r#"{"operator": {"n": 1, "A": [[2.5, 1.5], [1.5, 2.5]]}}"#);
    assert!(v["context"].get("realForm").is_none());
    assert_conforms(&v);
}

#[test]
fn eval_report_conforms() {
    assert_conforms(&report(
        Command::Eval,
        r#"{"operator": {"n": 1, "A": [[4, 0], [0, 1]]},
            "eval": {"quantity": "kernel", "points": [{"z": [20, 0], "w": [20, 0]}, {"z": [0, 0], "w": [0, 0]}]}}"#,
    ));
}

#[test]
fn truncate_report_conforms() {
    assert_conforms(&report(Command::Truncate, r#"{"truncation": {"kind": "constant", "r": 4, "t": 1, "maxN": 8}}"#));
}

#[test]
fn verify_report_conforms() {
    assert_conforms(&report(Command::Verify, "{}"));
}

#[test]
fn validator_rejects_missing_keys() {
    let mut v = report(Command::Decompose, r#"{"operator": {"n": 1, "A": [[4, 0], [0, 1]]}}"#);
    v.as_object_mut().unwrap().remove("seed");
    v["checks"][0]["pass"] = Value::from(1);
    let mut errors = vec![];
    validate(&schema(), &v, "$", &mut errors);
    assert_eq!(errors.len(), 2, "{errors:#?}");
}
