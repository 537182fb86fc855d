use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

/// Round-trip float formatting: 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV sink writing either to a file or to stdout.
pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
    columns: usize,
}

impl Table {
    pub fn create(path: Option<&Path>, header: &[&str]) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(io::stdout().lock()),
        };
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        writer.write_record(header)?;
        Ok(Self { writer, columns: header.len() })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let record: Vec<S> = fields.into_iter().collect();
        debug_assert_eq!(record.len(), self.columns);
        self.writer.write_record(record)?;
        Ok(())
    }

    pub fn numbers(&mut self, values: &[f64]) -> Result<()> {
        self.row(values.iter().map(|v| num(*v)))
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("KINKSTAB_GIT_DESCRIBE"), ")");

#[derive(Serialize)]
struct Sidecar<'a, D: Serialize> {
    command: &'a str,
    version: String,
    flags: Map<String, Value>,
    results: D,
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes `<output>.json` next to a CSV written to a file. Nothing is written
/// when the CSV went to stdout.
pub fn write_sidecar<D: Serialize>(
    output: Option<&Path>,
    command: &str,
    flags: Map<String, Value>,
    results: D,
) -> Result<()> {
    let Some(out) = output else { return Ok(()) };
    let path = sidecar_path(out);
    let doc = Sidecar { command, version: VERSION.to_string(), flags, results };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
