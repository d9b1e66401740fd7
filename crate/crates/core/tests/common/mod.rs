#![allow(dead_code)]

pub mod oracle;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use monotangle::{StateVector, C64};
use serde_json::Value;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn ghz(n: usize) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0); 1 << n];
    amps[0] = c(h);
    amps[(1 << n) - 1] = c(h);
    StateVector::new(n, amps).unwrap()
}

pub fn w(n: usize) -> StateVector {
    let s = 1.0 / (n as f64).sqrt();
    let mut amps = vec![c(0.0); 1 << n];
    for k in 0..n {
        amps[1 << k] = c(s);
    }
    StateVector::new(n, amps).unwrap()
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_monotangle")
}

/// Runs the CLI in `dir` without inheriting the qubit-cap variable.
pub fn run_cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("MONOTANGLE_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Validator for the subset of JSON Schema used by the shipped schemas:
/// `$ref`, `type`, `properties`, `required`, `additionalProperties`,
/// `items`, `minItems`, `maxItems`, `enum`, `oneOf` and numeric bounds.
pub struct Schemas {
    docs: HashMap<String, Value>,
}

impl Schemas {
    pub fn load() -> Self {
        let mut docs = HashMap::new();
        for entry in std::fs::read_dir(schema_dir()).unwrap() {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
            docs.insert(name, doc);
        }
        Self { docs }
    }

    pub fn names(&self) -> Vec<&str> {
        self.docs.keys().map(String::as_str).collect()
    }

    /// Errors found validating `value` against the named schema file.
    pub fn validate(&self, name: &str, value: &Value) -> Vec<String> {
        let mut errors = Vec::new();
        let root = self.docs.get(name).unwrap_or_else(|| panic!("no schema {name}"));
        self.check(name, root, value, "$", &mut errors);
        errors
    }

    fn resolve(&self, doc: &str, reference: &str) -> (String, &Value) {
        let (file, pointer) = reference.split_once('#').unwrap_or((reference, ""));
        let file = if file.is_empty() { doc.to_string() } else { file.to_string() };
        let root = self.docs.get(&file).unwrap_or_else(|| panic!("unresolved $ref {reference}"));
        let target = root.pointer(pointer).unwrap_or_else(|| panic!("bad pointer {reference}"));
        (file, target)
    }

    fn check(&self, doc: &str, schema: &Value, value: &Value, at: &str, errors: &mut Vec<String>) {
        if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
            let (file, target) = self.resolve(doc, r);
            self.check(&file, target, value, at, errors);
        }
        if let Some(t) = schema.get("type") {
            let allowed: Vec<&str> = match t {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                _ => vec![],
            };
            if !allowed.iter().any(|ty| has_type(value, ty)) {
                errors.push(format!("{at}: expected {allowed:?}, got {value}"));
                return;
            }
        }
        if let Some(options) = schema.get("enum").and_then(Value::as_array) {
            if !options.contains(value) {
                errors.push(format!("{at}: {value} not in {options:?}"));
            }
        }
        if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
            let matching = options
                .iter()
                .filter(|s| {
                    let mut e = Vec::new();
                    self.check(doc, s, value, at, &mut e);
                    e.is_empty()
                })
                .count();
            if matching != 1 {
                errors.push(format!("{at}: matches {matching} oneOf branches"));
            }
        }
        if let Some(x) = value.as_f64() {
            let bound = |k: &str| schema.get(k).and_then(Value::as_f64);
            if bound("minimum").is_some_and(|m| x < m)
                || bound("maximum").is_some_and(|m| x > m)
                || bound("exclusiveMinimum").is_some_and(|m| x <= m)
            {
                errors.push(format!("{at}: {x} out of bounds"));
            }
        }
        if let Value::Array(items) = value {
            let len = items.len() as u64;
            if schema.get("minItems").and_then(Value::as_u64).is_some_and(|m| len < m)
                || schema.get("maxItems").and_then(Value::as_u64).is_some_and(|m| len > m)
            {
                errors.push(format!("{at}: {len} items out of bounds"));
            }
            if let Some(item_schema) = schema.get("items") {
                for (i, item) in items.iter().enumerate() {
                    self.check(doc, item_schema, item, &format!("{at}[{i}]"), errors);
                }
            }
        }
        if let Value::Object(map) = value {
            let props = schema.get("properties").and_then(Value::as_object);
            for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
                let key = key.as_str().unwrap();
                if !map.contains_key(key) {
                    errors.push(format!("{at}: missing {key}"));
                }
            }
            for (key, v) in map {
                match props.and_then(|p| p.get(key)) {
                    Some(s) => self.check(doc, s, v, &format!("{at}.{key}"), errors),
                    None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                        errors.push(format!("{at}: unexpected {key}"))
                    }
                    None => {}
                }
            }
        }
    }
}

fn has_type(v: &Value, ty: &str) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}
