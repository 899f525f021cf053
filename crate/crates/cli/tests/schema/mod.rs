//! The subset of JSON Schema used by the files in `docs/schema`:
//! `type`, `enum`, `required`, `properties`, `additionalProperties: false`,
//! `patternProperties` (digit keys only), `items`, `prefixItems`, `oneOf`,
//! `minimum` and local `$ref`.

use serde_json::Value;

pub fn load() -> Value {
    load_file("output.schema.json")
}

pub fn load_file(name: &str) -> Value {
    let path = format!("{}/../../docs/schema/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file")).expect("schema is JSON")
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let name = reference.strip_prefix("#/$defs/").expect("local ref");
    &root["$defs"][name]
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "integer" => v.is_i64() || v.is_u64(),
        other => panic!("unsupported type {other}"),
    }
}

/// Errors, as `path: message`.
pub fn validate(root: &Value, schema: &Value, v: &Value, path: &str) -> Vec<String> {
    let mut errors = Vec::new();
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        return validate(root, resolve(root, r), v, path);
    }
    if let Some(options) = schema.get("oneOf").and_then(Value::as_array) {
        let matching = options.iter().filter(|s| validate(root, s, v, path).is_empty()).count();
        if matching != 1 {
            errors.push(format!("{path}: matches {matching} oneOf branches"));
        }
    }
    if let Some(t) = schema.get("type").and_then(Value::as_str) {
        if !type_matches(t, v) {
            errors.push(format!("{path}: expected {t}"));
            return errors;
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_i64), v.as_i64()) {
        if x < min {
            errors.push(format!("{path}: {x} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            let key = key.as_str().expect("string keys");
            if !obj.contains_key(key) {
                errors.push(format!("{path}: missing {key}"));
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        let digits = schema.get("patternProperties").and_then(|p| p.get("^[0-9]+$"));
        for (key, value) in obj {
            let sub = format!("{path}.{key}");
            if let Some(s) = props.and_then(|p| p.get(key)) {
                errors.extend(validate(root, s, value, &sub));
            } else if let (Some(s), true) = (digits, key.chars().all(|c| c.is_ascii_digit())) {
                errors.extend(validate(root, s, value, &sub));
            } else if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                errors.push(format!("{sub}: not allowed"));
            }
        }
    }
    if let Some(arr) = v.as_array() {
        let prefix = schema.get("prefixItems").and_then(Value::as_array);
        for (i, item) in arr.iter().enumerate() {
            let sub = format!("{path}[{i}]");
            match (prefix.and_then(|p| p.get(i)), schema.get("items")) {
                (Some(s), _) => errors.extend(validate(root, s, item, &sub)),
                (None, Some(Value::Bool(false))) => errors.push(format!("{sub}: extra item")),
                (None, Some(s)) => errors.extend(validate(root, s, item, &sub)),
                (None, None) => {}
            }
        }
    }
    errors
}

/// Validates `v` against `$defs/<def>` and against the top-level `oneOf`.
pub fn check(def: &str, v: &Value) {
    let root = load();
    let errors = validate(&root, &root["$defs"][def], v, "$");
    assert!(errors.is_empty(), "{def}: {errors:#?}");
    let errors = validate(&root, &root, v, "$");
    assert!(errors.is_empty(), "top level: {errors:#?}");
}

/// Validates a model file document.
pub fn check_model(v: &Value) {
    let root = load_file("model.schema.json");
    let errors = validate(&root, &root, v, "$");
    assert!(errors.is_empty(), "model: {errors:#?}");
}
