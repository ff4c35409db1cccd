//! Tabular output as CSV or a single JSON document.

use std::io::Write;

use anyhow::{bail, Result};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Param {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Param {
    fn text(&self) -> String {
        match self {
            Param::Num(x) => number(*x),
            Param::Int(n) => n.to_string(),
            Param::Text(s) => s.clone(),
        }
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: Vec<(&'static str, Param)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl OutputRecord {
    pub fn new(command: String) -> Self {
        Self {
            command,
            ..Self::default()
        }
    }

    pub fn param(&mut self, name: &'static str, value: Param) {
        self.parameters.push((name, value));
    }

    pub fn num(&mut self, name: &'static str, value: f64) {
        self.param(name, Param::Num(value));
    }

    pub fn int(&mut self, name: &'static str, value: u64) {
        self.param(name, Param::Int(value));
    }

    pub fn text(&mut self, name: &'static str, value: impl Into<String>) {
        self.param(name, Param::Text(value.into()));
    }

    /// `name=value` pairs of the parameter block.
    pub fn describe(&self) -> String {
        self.parameters
            .iter()
            .map(|(k, v)| format!("{k}={}", v.text()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn check(&self) -> Result<()> {
        for row in &self.rows {
            if row.len() != self.columns.len() {
                bail!(
                    "row width {} does not match {} columns",
                    row.len(),
                    self.columns.len()
                );
            }
            if let Some((i, x)) = row.iter().enumerate().find(|(_, x)| !x.is_finite()) {
                bail!("non-finite value {x} in column `{}`", self.columns[i]);
            }
        }
        for (k, v) in &self.parameters {
            if let Param::Num(x) = v {
                if !x.is_finite() {
                    bail!("non-finite parameter {k} = {x}");
                }
            }
        }
        Ok(())
    }

    pub fn write(&self, format: Format, out: impl Write) -> Result<()> {
        self.check()?;
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["schema_version", "command"];
        header.extend(self.parameters.iter().map(|(k, _)| *k));
        header.extend(self.columns.iter().copied());
        w.write_record(&header)?;
        let fixed: Vec<String> = [SCHEMA_VERSION.to_string(), self.command.clone()]
            .into_iter()
            .chain(self.parameters.iter().map(|(_, v)| v.text()))
            .collect();
        for row in &self.rows {
            let mut rec = fixed.clone();
            rec.extend(row.iter().map(|x| number(*x)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, mut out: impl Write) -> Result<()> {
        let raw = |x: f64| RawValue::from_string(number(x)).expect("finite numbers are valid JSON");
        let doc = JsonDocument {
            schema_version: SCHEMA_VERSION,
            command: &self.command,
            parameters: Parameters(&self.parameters),
            columns: &self.columns,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| raw(*x)).collect())
                .collect(),
        };
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema_version: &'a str,
    command: &'a str,
    parameters: Parameters<'a>,
    columns: &'a [&'static str],
    rows: Vec<Vec<Box<RawValue>>>,
}

struct Parameters<'a>(&'a [(&'static str, Param)]);

impl Serialize for Parameters<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            match v {
                Param::Num(x) => map.serialize_entry(
                    k,
                    &RawValue::from_string(number(*x)).map_err(serde::ser::Error::custom)?,
                )?,
                Param::Int(n) => map.serialize_entry(k, n)?,
                Param::Text(t) => map.serialize_entry(k, t)?,
            }
        }
        map.end()
    }
}
