//! `key = value` run files and their merge with command-line flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::failure::Failure;

/// Parsed run file. Keys use the long flag spelling (`two-s`, `tmax-gt`);
/// underscores are accepted in place of dashes.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Failure::Config(msg) => Failure::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Config(format!(
                    "line {}: expected `key = value`",
                    lineno + 1
                )));
            };
            let key = key.trim().replace('_', "-");
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Failure::Config(format!(
                    "line {}: `{key}` is set twice",
                    lineno + 1
                )));
            }
        }
        Ok(Self { entries })
    }
}

/// Resolves each setting from its flag, then the run file, then a default,
/// and remembers the effective value for the sidecar.
#[derive(Debug)]
pub struct Resolver {
    command: &'static str,
    file: ConfigFile,
    used: BTreeSet<String>,
    effective: Vec<(String, String)>,
}

impl Resolver {
    pub fn new(command: &'static str, file: ConfigFile) -> Self {
        Self {
            command,
            file,
            used: BTreeSet::new(),
            effective: vec![("command".into(), command.into())],
        }
    }

    fn from_file<T>(&mut self, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        match self.file.entries.get(key) {
            None => Ok(None),
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|e| Failure::Config(format!("`{key} = {text}` in config: {e}"))),
        }
    }

    fn record(&mut self, key: &str, value: String) {
        self.effective.push((key.to_string(), value));
    }

    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, Failure>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let file = self.from_file(key)?;
        let value = flag.or(file);
        if let Some(v) = &value {
            self.record(key, v.to_string());
        }
        Ok(value)
    }

    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, Failure>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.optional(key, flag)?.ok_or(Failure::Missing {
            command: self.command,
            key: key.to_string(),
        })
    }

    pub fn or<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, Failure>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let file = self.from_file(key)?;
        let value = flag.or(file).unwrap_or(default);
        self.record(key, value.to_string());
        Ok(value)
    }

    /// Comma-separated list; an empty flag list falls back to the file.
    pub fn list<T>(&mut self, key: &str, flag: Vec<T>, default: Vec<T>) -> Result<Vec<T>, Failure>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        let value = if !flag.is_empty() {
            flag
        } else if let Some(text) = self.file.entries.get(key) {
            text.split(',')
                .map(|item| {
                    item.trim()
                        .parse()
                        .map_err(|e| Failure::Config(format!("`{key} = {text}` in config: {e}")))
                })
                .collect::<Result<_, _>>()?
        } else {
            default
        };
        let shown: Vec<String> = value.iter().map(|v| v.to_string()).collect();
        self.record(key, shown.join(","));
        Ok(value)
    }

    /// Fails on run-file keys no setting asked for.
    pub fn finish(self) -> Result<Vec<(String, String)>, Failure> {
        let unknown: Vec<&str> = self
            .file
            .entries
            .keys()
            .filter(|k| !self.used.contains(*k))
            .map(String::as_str)
            .collect();
        if !unknown.is_empty() {
            return Err(Failure::Config(format!(
                "unknown config key(s) for `{}`: {}",
                self.command,
                unknown.join(", ")
            )));
        }
        Ok(self.effective)
    }
}
