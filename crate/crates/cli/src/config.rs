use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::UsageError;

/// Keys that may appear in any config file regardless of subcommand.
const GLOBAL_KEYS: [&str; 2] = ["threads", "output"];

/// Merges command-line flags over a JSON config over built-in defaults, and
/// records every effective value for the run sidecar.
pub struct Settings {
    file: Map<String, Value>,
    consumed: RefCell<BTreeSet<String>>,
    resolved: RefCell<Map<String, Value>>,
}

fn normalize(key: &str) -> String {
    key.replace('-', "_")
}

impl Settings {
    pub fn empty() -> Self {
        Self { file: Map::new(), consumed: RefCell::default(), resolved: RefCell::default() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(obj) = value else {
            return Err(UsageError(format!("config {} must hold a JSON object", path.display())).into());
        };
        let file = obj.into_iter().map(|(k, v)| (normalize(&k), v)).collect();
        Ok(Self { file, consumed: RefCell::default(), resolved: RefCell::default() })
    }

    pub fn global<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        self.file
            .get(key)
            .map(|v| {
                serde_json::from_value(v.clone()).map_err(|e| UsageError(format!("config key `{key}`: {e}")).into())
            })
            .transpose()
    }

    /// `flag`, else the config entry, else `default`.
    pub fn pick<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: DeserializeOwned + Serialize,
    {
        let key = normalize(key);
        self.consumed.borrow_mut().insert(key.clone());
        let value = match (flag, self.file.get(&key)) {
            (Some(v), _) => v,
            (None, Some(v)) => {
                serde_json::from_value(v.clone()).map_err(|e| UsageError(format!("config key `{key}`: {e}")))?
            }
            (None, None) => default,
        };
        self.resolved.borrow_mut().insert(key, serde_json::to_value(&value)?);
        Ok(value)
    }

    pub fn pick_opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: DeserializeOwned + Serialize,
    {
        self.pick(key, flag.map(Some), None)
    }

    /// Fails on config keys that no step of the subcommand asked for.
    pub fn finish(&self) -> Result<Map<String, Value>> {
        let consumed = self.consumed.borrow();
        let unknown: Vec<&String> =
            self.file.keys().filter(|k| !consumed.contains(*k) && !GLOBAL_KEYS.contains(&k.as_str())).collect();
        if !unknown.is_empty() {
            return Err(UsageError(format!("unknown config keys for this subcommand: {unknown:?}")).into());
        }
        Ok(self.resolved.borrow().clone())
    }
}
