//! JSON run configuration. Keys mirror the long flag names with `-` replaced by `_`;
//! a flag given on the command line always wins over the file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::exit::{invalid, CliResult};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, Value>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(map) = value else {
            return Err(invalid("config must be a JSON object"));
        };
        Ok(Self {
            values: map
                .into_iter()
                .map(|(k, v)| (k.replace('-', "_"), v))
                .collect(),
        })
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> CliResult<Option<T>> {
        self.raw(key)
            .map(|v| {
                serde_json::from_value(v.clone())
                    .map_err(|e| invalid(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// A list-valued key; a scalar is read as a one-element list.
    pub fn get_list<T: DeserializeOwned>(&self, key: &str) -> CliResult<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Array(_)) => self.get(key),
            Some(_) => Ok(self.get::<T>(key)?.map(|x| vec![x])),
        }
    }

    /// `flag`, else the config value under `key`, else `default`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    pub fn pick_opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn pick_list<T: DeserializeOwned>(&self, flag: Vec<T>, key: &str, default: Vec<T>) -> CliResult<Vec<T>> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        Ok(self.get_list(key)?.unwrap_or(default))
    }
}
