//! `key=value` configuration files.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Every key must be consumed by the caller, otherwise [`KeyValues::finish`]
//! reports it as unknown.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{GtError, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GtError::Config(format!("line {}: expected key=value, got {raw:?}", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(GtError::Config(format!("line {}: empty key", n + 1)));
            }
            if entries.insert(key.to_owned(), value.to_owned()).is_some() {
                return Err(GtError::Config(format!("line {}: duplicate key {key:?}", n + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets or replaces a value; used to apply command-line overrides.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_owned(), value.to_string());
    }

    /// Removes and parses `key`, if present.
    pub fn take<V: FromStr>(&mut self, key: &str) -> Result<Option<V>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| GtError::Config(format!("cannot parse {key}={raw:?}"))),
        }
    }

    pub fn take_or<V: FromStr>(&mut self, key: &str, default: V) -> Result<V> {
        Ok(self.take(key)?.unwrap_or(default))
    }

    /// Fails if any key was not consumed.
    pub fn finish(self) -> Result<()> {
        if self.entries.is_empty() {
            Ok(())
        } else {
            let keys: Vec<_> = self.entries.into_keys().collect();
            Err(GtError::Config(format!("unknown keys: {}", keys.join(", "))))
        }
    }
}
