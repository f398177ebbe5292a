//! Minimal structural validator for the published output schemas
//! (`docs/schemas/*.json`): types, required keys, nested properties, array
//! items, and string enums.

use serde_json::Value;

/// Validate `value` against `schema`; the error string names the offending
/// path.
pub fn validate(value: &Value, schema: &Value) -> Result<(), String> {
    walk(value, schema, "$")
}

fn walk(value: &Value, schema: &Value, path: &str) -> Result<(), String> {
    if let Some(types) = schema.get("type") {
        let allowed: Vec<String> = match types {
            Value::String(s) => vec![s.clone()],
            Value::Array(a) => a
                .iter()
                .filter_map(|v| v.as_str().map(str::to_string))
                .collect(),
            _ => return Err(format!("{path}: malformed schema type")),
        };
        let actual = type_name(value);
        let ok = allowed.iter().any(|t| {
            t == actual || (t == "number" && actual == "integer")
        });
        if !ok {
            return Err(format!("{path}: expected {allowed:?}, found {actual}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            return Err(format!("{path}: value not in enum"));
        }
    }
    if let Some(req) = schema.get("required").and_then(Value::as_array) {
        let obj = value
            .as_object()
            .ok_or_else(|| format!("{path}: required on a non-object"))?;
        for key in req.iter().filter_map(Value::as_str) {
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing required key {key:?}"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(Value::as_object) {
        if let Some(obj) = value.as_object() {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    walk(v, sub, &format!("{path}.{key}"))?;
                }
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = value.as_array() {
            for (k, v) in arr.iter().enumerate() {
                walk(v, items, &format!("{path}[{k}]"))?;
            }
        }
    }
    Ok(())
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                "integer"
            } else {
                "number"
            }
        }
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
