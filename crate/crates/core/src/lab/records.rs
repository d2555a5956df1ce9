//! CSV and JSON persistence of trial records.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use super::format::sig12;
use super::TrialRecord;
use crate::error::{LabError, Result};

pub const CSV_HEADER: [&str; 14] = [
    "trial",
    "n",
    "d",
    "k",
    "sampler",
    "seed",
    "s2",
    "pisier_lb",
    "two_over_sqrt_d",
    "passes",
    "slack",
    "iterations",
    "residual",
    "wall_ms",
];

fn fields(r: &TrialRecord) -> [String; 14] {
    [
        r.trial.to_string(),
        r.n.to_string(),
        r.d.to_string(),
        r.k.to_string(),
        r.sampler.clone(),
        r.seed.to_string(),
        sig12(r.s2),
        sig12(r.pisier_lb),
        sig12(r.two_over_sqrt_d),
        r.passes.to_string(),
        sig12(r.slack),
        r.iterations.to_string(),
        sig12(r.residual),
        r.wall_ms.to_string(),
    ]
}

fn csv_line(row: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(row).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 fields")
}

pub fn csv_header_line() -> String {
    csv_line(&CSV_HEADER.map(String::from))
}

/// One data row, newline-terminated.
pub fn csv_row(r: &TrialRecord) -> String {
    csv_line(&fields(r))
}

pub fn render_csv(records: &[TrialRecord]) -> String {
    let mut out = csv_header_line();
    for r in records {
        out.push_str(&csv_row(r));
    }
    out
}

fn parse_f64(s: &str, location: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|e| LabError::parse(location, e.to_string()))
}

fn parse_int<T: std::str::FromStr>(s: &str, location: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| LabError::parse(location, e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| LabError::parse("line 1", e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(LabError::parse("line 1", "unexpected CSV header"));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let loc = |c: &str| format!("line {} field {c}", i + 2);
        let row = row.map_err(|e| LabError::parse(format!("line {}", i + 2), e.to_string()))?;
        if row.len() != CSV_HEADER.len() {
            return Err(LabError::parse(format!("line {}", i + 2), "wrong field count"));
        }
        out.push(TrialRecord {
            trial: parse_int(&row[0], &loc("trial"))?,
            n: parse_int(&row[1], &loc("n"))?,
            d: parse_int(&row[2], &loc("d"))?,
            k: parse_int(&row[3], &loc("k"))?,
            sampler: row[4].to_string(),
            seed: parse_int(&row[5], &loc("seed"))?,
            s2: parse_f64(&row[6], &loc("s2"))?,
            pisier_lb: parse_f64(&row[7], &loc("pisier_lb"))?,
            two_over_sqrt_d: parse_f64(&row[8], &loc("two_over_sqrt_d"))?,
            passes: parse_int(&row[9], &loc("passes"))?,
            slack: parse_f64(&row[10], &loc("slack"))?,
            iterations: parse_int(&row[11], &loc("iterations"))?,
            residual: parse_f64(&row[12], &loc("residual"))?,
            wall_ms: parse_int(&row[13], &loc("wall_ms"))?,
        });
    }
    Ok(out)
}

fn json_float(x: f64) -> String {
    if x.is_finite() {
        sig12(x)
    } else {
        "null".into()
    }
}

pub fn render_json(records: &[TrialRecord]) -> String {
    if records.is_empty() {
        return "[]\n".into();
    }
    let rows: Vec<String> = records
        .iter()
        .map(|r| {
            format!(
                "  {{\"trial\":{},\"n\":{},\"d\":{},\"k\":{},\"sampler\":{},\"seed\":{},\"s2\":{},\"pisier_lb\":{},\
                 \"two_over_sqrt_d\":{},\"passes\":{},\"slack\":{},\"iterations\":{},\"residual\":{},\"wall_ms\":{}}}",
                r.trial,
                r.n,
                r.d,
                r.k,
                serde_json::to_string(&r.sampler).expect("string"),
                r.seed,
                json_float(r.s2),
                json_float(r.pisier_lb),
                json_float(r.two_over_sqrt_d),
                r.passes,
                json_float(r.slack),
                r.iterations,
                json_float(r.residual),
                r.wall_ms
            )
        })
        .collect();
    format!("[\n{}\n]\n", rows.join(",\n"))
}

pub fn parse_json(text: &str) -> Result<Vec<TrialRecord>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| LabError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let items = value.as_array().ok_or_else(|| LabError::parse("root", "expected an array of records"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let get = |name: &str| item.get(name).ok_or_else(|| LabError::parse(format!("[{i}].{name}"), "missing field"));
            let uint = |name: &str| -> Result<u64> {
                get(name)?.as_u64().ok_or_else(|| LabError::parse(format!("[{i}].{name}"), "expected an unsigned integer"))
            };
            let float = |name: &str| -> Result<f64> {
                let v = get(name)?;
                if v.is_null() {
                    return Ok(f64::NAN);
                }
                v.as_f64().ok_or_else(|| LabError::parse(format!("[{i}].{name}"), "expected a number"))
            };
            Ok(TrialRecord {
                trial: uint("trial")? as usize,
                n: uint("n")? as usize,
                d: uint("d")? as usize,
                k: uint("k")? as usize,
                sampler: get("sampler")?
                    .as_str()
                    .ok_or_else(|| LabError::parse(format!("[{i}].sampler"), "expected a string"))?
                    .to_string(),
                seed: uint("seed")?,
                s2: float("s2")?,
                pisier_lb: float("pisier_lb")?,
                two_over_sqrt_d: float("two_over_sqrt_d")?,
                passes: get("passes")?.as_bool().ok_or_else(|| LabError::parse(format!("[{i}].passes"), "expected a boolean"))?,
                slack: float("slack")?,
                iterations: uint("iterations")? as usize,
                residual: float("residual")?,
                wall_ms: uint("wall_ms")?,
            })
        })
        .collect()
}

pub fn write_csv(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_csv(records)).map_err(|e| LabError::io(path, e))
}

pub fn write_json(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_json(records)).map_err(|e| LabError::io(path, e))
}

/// Reads CSV or JSON by extension (`.json` is JSON, anything else CSV).
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
}

pub(crate) fn append_line(file: &mut fs::File, path: &Path, line: &str) -> Result<()> {
    file.write_all(line.as_bytes()).and_then(|_| file.flush()).map_err(|e| LabError::io(path, e))
}
