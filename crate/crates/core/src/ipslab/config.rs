//! Flat `key = value` experiment files and two-column CSV output.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::str::FromStr;

use super::SimError;

/// Parsed experiment file. Blank lines and `#` comments are ignored; a key
/// may appear only once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SimError::Config { line: idx + 1, message: "expected key = value".into() })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(SimError::Config { line: idx + 1, message: "empty key".into() });
            }
            if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(SimError::Config { line: idx + 1, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, SimError> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| SimError::Argument(format!("bad value `{v}` for `{key}`"))))
            .transpose()
    }

    /// Comma- or space-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, SimError> {
        self.raw(key)
            .map(|v| {
                v.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|_| SimError::Argument(format!("bad item `{s}` for `{key}`"))))
                    .collect()
            })
            .transpose()
    }
}

/// Writes a header row and one `t,value` row per sample.
pub fn write_csv<W: Write>(out: &mut W, columns: (&str, &str), rows: &[(f64, f64)]) -> io::Result<()> {
    writeln!(out, "{},{}", columns.0, columns.1)?;
    for (t, v) in rows {
        writeln!(out, "{t},{v}")?;
    }
    Ok(())
}
