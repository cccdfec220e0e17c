//! Price-file parsing and report writing.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use heston_gof_core::market::{Date, PriceSeries};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

const DATE_FORMATS: [&str; 4] = ["%Y-%m-%d", "%Y/%m/%d", "%m/%d/%Y", "%Y%m%d"];

fn parse_date(field: &str) -> Option<Date> {
    DATE_FORMATS.iter().find_map(|f| NaiveDate::parse_from_str(field, f).ok()).map(|d| Date {
        year: d.year(),
        month: d.month() as u8,
        day: d.day() as u8,
    })
}

/// Reads `date,close` rows; a tab delimiter is also accepted and a header
/// row is skipped when its second field is not numeric.
pub fn parse_prices(text: &str, path: &Path) -> CliResult<PriceSeries> {
    let first = text.lines().find(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let delimiter = if first.is_some_and(|l| l.contains('\t')) { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut dates = Vec::new();
    let mut closes = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(line, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parse_err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line: record.position().map_or(line, |p| p.line() as usize),
            message,
        };
        if record.len() < 2 {
            return Err(parse_err(format!("expected `date,close`, found {} field(s)", record.len())));
        }
        let close = match record[1].parse::<f64>() {
            Ok(c) => c,
            Err(_) if dates.is_empty() && parse_date(&record[0]).is_none() => continue,
            Err(_) => return Err(parse_err(format!("close `{}` is not a number", &record[1]))),
        };
        let date = parse_date(&record[0]).ok_or_else(|| parse_err(format!("unrecognised date `{}`", &record[0])))?;
        dates.push(date);
        closes.push(close);
    }
    PriceSeries::new(dates, closes).map_err(|e| CliError::InvalidData {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_prices(path: &Path) -> CliResult<PriceSeries> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_prices(&text, path)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: PathBuf::from(path),
        source,
    })
}
