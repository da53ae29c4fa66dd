//! Layered run configuration: defaults or a preset, then a config file, then
//! explicit flags. Files are JSON objects or flat `key = value` lines; dotted
//! keys such as `solver.max_iter` address nested tables.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::exit::CliError;

pub fn parse_file(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let value = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?
    } else {
        parse_key_values(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?
    };
    // A manifest written by an earlier run carries its resolved config.
    match value {
        Value::Object(mut obj) if obj.contains_key("subcommand") && obj.contains_key("config") => {
            Ok(obj.remove("config").unwrap_or(Value::Null))
        }
        Value::Object(_) => Ok(value),
        _ => Err(CliError::usage(format!("config {} must be an object", path.display()))),
    }
}

/// `key = value` per line; `#` starts a comment. Values are read as JSON
/// when possible, comma-separated lists become arrays, anything else is a
/// string.
pub fn parse_key_values(text: &str) -> Result<Value, String> {
    let mut out = Map::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", no + 1));
        }
        out.insert(key.to_string(), scalar(value.trim()));
    }
    Ok(expand_dotted(Value::Object(out)))
}

fn scalar(text: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return v;
    }
    if text.contains(',') {
        let parts: Vec<Value> = text.split(',').map(|p| scalar(p.trim())).collect();
        return Value::Array(parts);
    }
    Value::String(text.to_string())
}

/// Turns `{"a.b": 1}` into `{"a": {"b": 1}}` at the top level.
pub fn expand_dotted(value: Value) -> Value {
    let Value::Object(obj) = value else { return value };
    let mut out = Value::Object(Map::new());
    for (key, v) in obj {
        let mut nested = v;
        for part in key.rsplit('.').collect::<Vec<_>>().iter().take(key.matches('.').count()) {
            let mut m = Map::new();
            m.insert((*part).to_string(), nested);
            nested = Value::Object(m);
        }
        let head = key.split('.').next().unwrap_or(&key).to_string();
        let mut m = Map::new();
        m.insert(head, nested);
        merge(&mut out, Value::Object(m));
    }
    out
}

/// Deep merge of objects; every other value in `over` replaces `base`.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                if v.is_null() {
                    continue;
                }
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, over) => *slot = over,
    }
}

/// Resolves the effective configuration and returns it with its JSON form.
pub fn resolve<T: DeserializeOwned + Serialize>(
    base: Value,
    config: Option<&Path>,
    flags: &impl Serialize,
) -> Result<(T, Value), CliError> {
    let mut value = base;
    if let Some(path) = config {
        merge(&mut value, parse_file(path)?);
    }
    let flags = serde_json::to_value(flags).map_err(|e| CliError::usage(e.to_string()))?;
    merge(&mut value, expand_dotted(flags));
    let typed: T = serde_json::from_value(value).map_err(|e| CliError::usage(format!("configuration: {e}")))?;
    let resolved = serde_json::to_value(&typed).map_err(|e| CliError::usage(e.to_string()))?;
    Ok((typed, resolved))
}
