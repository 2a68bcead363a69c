//! Reading inputs given as a path, `-`, or inline text.

use std::io::Read;
use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use skt_core::lie::{AlgebraJson, Params};

/// Bad input that is not a core error; exits 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Contents of `src`: stdin for `-`, the file if it exists, otherwise `src` itself.
pub fn read(src: &str) -> anyhow::Result<String> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    let p = Path::new(src);
    if p.is_file() {
        return std::fs::read_to_string(p).with_context(|| format!("reading {src}"));
    }
    Ok(src.to_string())
}

pub fn looks_like_json(text: &str) -> bool {
    matches!(text.trim_start().chars().next(), Some('{' | '['))
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> anyhow::Result<T> {
    serde_json::from_str(text).map_err(|e| usage(format!("malformed {what} JSON: {e}")))
}

/// An algebra JSON document, either bare or wrapped in an output envelope under `"algebra"`.
pub fn algebra_json(text: &str) -> anyhow::Result<AlgebraJson> {
    let v: Value = parse_json(text, "algebra")?;
    let inner = match v.get("algebra") {
        Some(a) if v.get("dim").is_none() => a.clone(),
        _ => v,
    };
    serde_json::from_value(inner).map_err(|e| usage(format!("malformed algebra JSON: {e}")))
}

fn split_kv(kv: &str) -> anyhow::Result<(&str, &str)> {
    kv.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| usage(format!("expected key=value, got {kv:?}")))
}

/// Numeric bindings for Salamon tuples and catalog names.
pub fn numeric_params(kvs: &[String]) -> anyhow::Result<Params> {
    let mut p = Params::new();
    for kv in kvs {
        let (k, v) = split_kv(kv)?;
        let x: f64 = v
            .parse()
            .map_err(|_| usage(format!("parameter {k} is not a number: {v:?}")))?;
        p.insert(k.to_string(), x);
    }
    Ok(p)
}

/// `key=value` pairs as a JSON object; values are JSON when they parse, strings otherwise.
pub fn json_params(kvs: &[String]) -> anyhow::Result<Map<String, Value>> {
    let mut m = Map::new();
    for kv in kvs {
        let (k, v) = split_kv(kv)?;
        let val = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        m.insert(k.to_string(), val);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse_json_values_and_fall_back_to_strings() {
        let m = json_params(&["a=1.5".into(), "w=[[1,0]]".into(), "variant=ii".into()]).unwrap();
        assert_eq!(m["a"], serde_json::json!(1.5));
        assert_eq!(m["w"], serde_json::json!([[1, 0]]));
        assert_eq!(m["variant"], serde_json::json!("ii"));
        assert!(json_params(&["=3".into()]).is_err());
        assert!(numeric_params(&["lambda=x".into()]).is_err());
    }

    #[test]
    fn envelope_is_unwrapped() {
        let bare = r#"{"dim":3,"structure":[{"i":1,"j":2,"k":3,"c":-1.0}]}"#;
        let wrapped = format!(r#"{{"schema_version":1,"algebra":{bare}}}"#);
        assert_eq!(algebra_json(bare).unwrap(), algebra_json(&wrapped).unwrap());
    }
}
