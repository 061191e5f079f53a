//! On-disk formats.
//!
//! * `report.json`: the command's report object.
//! * `alice.json` / `bob.json`: one party's table halves, `{"party", "tables"}`
//!   with `{id, x, e}` for Alice and `{id, y, f}` for Bob.
//! * `*.jsonl`: a `#` header line, then one JSON record per line. Protocol
//!   transcripts follow `schema/transcript.schema.json`.
//! * scan CSV: `seed,chi_y,chi_r,chi_yr,sum`.

use std::fs;
use std::io::Write;
use std::path::Path;

use otable_core::protocols::{AliceView, BobView, OneTimeTable, Party};
use otable_core::security::TradeoffPoint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

pub const ALICE_FILE: &str = "alice.json";
pub const BOB_FILE: &str = "bob.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, msg: impl ToString) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| format_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| format_err(path, e))
}

/// Writes `header` as a `#` comment line followed by one record per line.
pub fn write_jsonl<T: Serialize>(path: &Path, header: &str, records: &[T]) -> Result<()> {
    let mut out = format!("# {header}\n");
    for r in records {
        out += &serde_json::to_string(r).map_err(|e| format_err(path, e))?;
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Records of a JSONL file, skipping blank and `#` lines.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format_err(path, format!("line {}: {e}", i + 1))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewFile<T> {
    pub party: Party,
    pub tables: Vec<T>,
}

pub fn write_views(dir: &Path, tables: &[OneTimeTable]) -> Result<()> {
    write_json(
        &dir.join(ALICE_FILE),
        &ViewFile {
            party: Party::Alice,
            tables: tables.iter().map(OneTimeTable::alice_view).collect(),
        },
    )?;
    write_json(
        &dir.join(BOB_FILE),
        &ViewFile {
            party: Party::Bob,
            tables: tables.iter().map(OneTimeTable::bob_view).collect(),
        },
    )
}

/// Joins the two view files of a batch directory back into tables.
pub fn read_batch(dir: &Path) -> Result<Vec<OneTimeTable>> {
    let (ap, bp) = (dir.join(ALICE_FILE), dir.join(BOB_FILE));
    let a: ViewFile<AliceView> = read_json(&ap)?;
    let b: ViewFile<BobView> = read_json(&bp)?;
    if a.party != Party::Alice {
        return Err(format_err(&ap, "not an Alice view file"));
    }
    if b.party != Party::Bob {
        return Err(format_err(&bp, "not a Bob view file"));
    }
    if a.tables.len() != b.tables.len() {
        return Err(format_err(&bp, format!("{} tables vs {} in {ALICE_FILE}", b.tables.len(), a.tables.len())));
    }
    a.tables
        .iter()
        .zip(&b.tables)
        .map(|(x, y)| OneTimeTable::join(x, y).ok_or_else(|| format_err(&bp, format!("id {} has no Alice half", y.id))))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub seed: u64,
    pub chi_y: f64,
    pub chi_r: f64,
    pub chi_yr: f64,
    pub sum: f64,
}

impl From<&TradeoffPoint> for ScanRow {
    fn from(p: &TradeoffPoint) -> Self {
        Self {
            seed: p.seed,
            chi_y: p.chi_y,
            chi_r: p.chi_r,
            chi_yr: p.chi_yr,
            sum: p.sum(),
        }
    }
}

pub fn write_scan_csv(path: &Path, points: &[TradeoffPoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format_err(path, e))?;
    for p in points {
        w.serialize(ScanRow::from(p)).map_err(|e| format_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_scan_csv(path: &Path) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| format_err(path, e))).collect()
}

/// Line-oriented report for humans: `key: value` per top-level field.
pub fn write_summary(path: &Path, report: &serde_json::Value) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    if let Some(obj) = report.as_object() {
        for (k, v) in obj {
            writeln!(f, "{k}: {v}").map_err(io_err(path))?;
        }
    }
    Ok(())
}
