//! JSON config files mirroring the command-line flags.
//!
//! Keys are the long flag names (`per-ring`, `R`, ...). A flag given on the
//! command line wins over the file; a boolean switch can only be turned on
//! from the command line.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

pub fn load(path: &Path) -> Result<Map<String, Value>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))? {
        Value::Object(map) => Ok(map),
        _ => bail!("config {} must hold a JSON object", path.display()),
    }
}

fn given(v: &Value) -> bool {
    !matches!(v, Value::Null | Value::Bool(false))
}

/// Overlays the flags that were actually given on top of the config file and
/// deserializes the result. Keys unknown to `T` are left for other consumers.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: &Map<String, Value>) -> Result<T> {
    let Value::Object(fields) = serde_json::to_value(flags)? else {
        bail!("flag set does not serialize to an object");
    };
    let mut merged = Map::new();
    for (key, flag) in fields {
        let value = match file.get(&key) {
            Some(v) if !given(&flag) => v.clone(),
            _ => flag,
        };
        merged.insert(key, value);
    }
    serde_json::from_value(Value::Object(merged)).context("invalid value in config")
}

/// Field names of a flag struct, used to reject misspelled config keys.
pub fn keys_of<T: Serialize + Default>() -> Vec<String> {
    match serde_json::to_value(T::default()) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    }
}

pub fn reject_unknown(file: &Map<String, Value>, known: &[String]) -> Result<()> {
    if let Some(k) = file.keys().find(|k| !known.contains(k)) {
        bail!("unknown config key `{k}`");
    }
    Ok(())
}

/// Accepts either a scalar or a list, so a config can say `"p": 2` or
/// `"p": [1.5, 2, 3]`.
pub fn one_or_many<'de, D, T>(de: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Option::<Either<T>>::deserialize(de)?.map(|e| match e {
        Either::One(x) => vec![x],
        Either::Many(v) => v,
    }))
}
