//! CSV output and input for study curves.
//!
//! The format is a plain comma-separated table with a fixed header; float
//! columns print with enough digits to round-trip `f64` exactly, so a file
//! is a faithful record of a run. Comment lines starting with `#` may
//! precede the header and are ignored on read.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::study::CurvePoint;

pub const CSV_HEADER: &str = "study,n_r,n_t,m,method,snr_db,se_mean,se_std_err,n_trials";

/// Renders the full file contents: optional `#`-prefixed comment lines,
/// the header, then one row per point. LF line endings throughout.
pub fn render_csv(points: &[CurvePoint], comments: &[String]) -> String {
    let mut out = String::new();
    for line in comments {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        // 17 significant digits round-trip any f64 exactly.
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.16e},{:.16e},{}\n",
            p.study, p.n_r, p.n_t, p.m, p.method, p.snr_db, p.se_mean, p.se_std_err, p.n_trials
        ));
    }
    out
}

/// Writes the points (with optional comment lines) to `path`.
pub fn write_csv_with_comments(
    points: &[CurvePoint],
    path: &Path,
    comments: &[String],
) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(render_csv(points, comments).as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Writes the points to `path` with no leading comments.
pub fn write_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    write_csv_with_comments(points, path, &[])
}

/// Reads a curve file back, skipping comment lines and checking the header.
pub fn read_csv(path: &Path) -> Result<Vec<CurvePoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::invalid("csv", "file has no header row"))?;
    if header != CSV_HEADER {
        return Err(Error::invalid(
            "csv",
            format!("unexpected header `{header}`"),
        ));
    }
    lines
        .map(|(idx, line)| parse_row(line).map_err(|reason| Error::config(idx + 1, reason)))
        .collect()
}

fn parse_row(line: &str) -> std::result::Result<CurvePoint, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 9 {
        return Err(format!("expected 9 fields, found {}", fields.len()));
    }
    fn num<T: std::str::FromStr>(s: &str, what: &str) -> std::result::Result<T, String> {
        s.parse().map_err(|_| format!("bad {what}: `{s}`"))
    }
    Ok(CurvePoint {
        study: fields[0].to_string(),
        n_r: num(fields[1], "n_r")?,
        n_t: num(fields[2], "n_t")?,
        m: num(fields[3], "m")?,
        method: fields[4].to_string(),
        snr_db: num(fields[5], "snr_db")?,
        se_mean: num(fields[6], "se_mean")?,
        se_std_err: num(fields[7], "se_std_err")?,
        n_trials: num(fields[8], "n_trials")?,
    })
}
