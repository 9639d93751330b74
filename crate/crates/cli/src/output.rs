//! Deterministic file output: numbers rounded to 12 significant digits,
//! UTF-8, LF line endings, sorted JSON keys.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits; non-finite values pass through.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// A number as written to CSV.
pub fn num(x: f64) -> String {
    format!("{}", sig12(x))
}

fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                if let Some(rounded) = serde_json::Number::from_f64(sig12(x)) {
                    *n = rounded;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Serializes `report` with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(report: &T) -> anyhow::Result<String> {
    let mut value = serde_json::to_value(report)?;
    round_numbers(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

/// Collects named outputs, then writes them all into one directory.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, report: &T) -> anyhow::Result<()> {
        self.add(name, to_json(report)?);
        Ok(())
    }

    pub fn add_csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = Vec<String>>,
    ) {
        let mut text = String::from(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.add(name, text);
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, WriteError> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))
            .map_err(WriteError)?;
        self.files
            .iter()
            .map(|(name, contents)| {
                let path = dir.join(name);
                fs::write(&path, contents)
                    .with_context(|| format!("cannot write {}", path.display()))
                    .map_err(WriteError)?;
                Ok(path)
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct WriteError(pub anyhow::Error);
