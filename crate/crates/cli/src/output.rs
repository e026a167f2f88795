//! Report files and atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use tempfile::{Builder, NamedTempFile};

use crate::config::Config;
use crate::runner::Entry;

/// Writes `bytes` to a temporary file beside `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a Config,
    passed: usize,
    failed: usize,
    certificates: Vec<Entry>,
}

/// Entries with their piece tables moved out; the tables go to CSV files.
fn without_tables(entries: &[Entry]) -> Vec<Entry> {
    entries
        .iter()
        .cloned()
        .map(|mut e| {
            if let Some(c) = e.certificate.as_mut() {
                c.table = None;
            }
            e
        })
        .collect()
}

pub fn certificates_json(entries: &[Entry]) -> String {
    serde_json::to_string_pretty(&without_tables(entries)).expect("entries serialize")
}

fn slug(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() || ch == '.' {
            out.push(ch);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

pub fn table_name(k: usize, entry: &Entry) -> String {
    format!("{k:03}-{}.csv", slug(&entry.id))
}

fn fmt_num(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.6e}"),
        None => "undefined".into(),
    }
}

pub fn summary(entries: &[Entry]) -> String {
    let mut out = String::new();
    let passed = entries.iter().filter(|e| e.pass()).count();
    let _ = writeln!(out, "{passed} of {} certificates pass", entries.len());
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<6} {:<12} {:<14} {:<14} {:<14} label", "status", "kind", "lhs", "rhs", "ratio");
    for e in entries {
        let status = if e.pass() { "pass" } else { "FAIL" };
        let kind = match e.alpha {
            Some(a) => format!("{}@{a}", e.kind),
            None => e.kind.to_string(),
        };
        let (lhs, rhs, ratio) = match &e.certificate {
            Some(c) => (Some(c.lhs), Some(c.rhs), c.ratio.value()),
            None => (None, None, None),
        };
        let _ = write!(out, "{status:<6} {kind:<12} {:<14} {:<14} {:<14} {}", fmt_num(lhs), fmt_num(rhs), fmt_num(ratio), e.label);
        if !e.pass() {
            let _ = write!(out, "  [{}]", e.failures().join(", "));
        }
        out.push('\n');
    }

    // ratio spread per (kind, alpha) group
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for e in entries {
        let Some(r) = e.certificate.as_ref().and_then(|c| c.ratio.value()) else { continue };
        let name = match e.alpha {
            Some(a) => format!("{} alpha={a}", e.kind),
            None => e.kind.to_string(),
        };
        match groups.iter_mut().find(|(n, _)| *n == name) {
            Some((_, v)) => v.push(r),
            None => groups.push((name, vec![r])),
        }
    }
    if !groups.is_empty() {
        let _ = writeln!(out);
        for (name, v) in groups {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(0.0, f64::max);
            let spread = if lo > 0.0 { format!("{:.3}", hi / lo) } else { "undefined".into() };
            let _ = writeln!(out, "{name}: {} ratios in [{lo:.6e}, {hi:.6e}], spread {spread}", v.len());
        }
    }
    out
}

/// Writes `certificates.json`, `piece_tables/*.csv` and `summary.txt` under `dir`.
///
/// Everything is staged in a sibling temporary directory first; files are
/// then renamed into place, so a failure never leaves a partial report.
pub fn write_report(dir: &Path, cfg: &Config, entries: &[Entry]) -> io::Result<()> {
    let parent = match dir.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => Path::new(".").to_path_buf(),
    };
    fs::create_dir_all(&parent)?;
    let stage = Builder::new().prefix(".amcert-").tempdir_in(&parent)?;
    let passed = entries.iter().filter(|e| e.pass()).count();
    let report =
        Report { config: cfg, passed, failed: entries.len() - passed, certificates: without_tables(entries) };
    fs::write(stage.path().join("certificates.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    fs::write(stage.path().join("summary.txt"), summary(entries))?;
    let tables = stage.path().join("piece_tables");
    fs::create_dir(&tables)?;
    for (k, e) in entries.iter().enumerate() {
        if let Some(t) = e.certificate.as_ref().and_then(|c| c.table.as_ref()) {
            fs::write(tables.join(table_name(k, e)), t.to_csv())?;
        }
    }

    if !dir.exists() {
        let staged = stage.keep();
        return fs::rename(&staged, dir);
    }
    let old_tables = dir.join("piece_tables");
    if old_tables.exists() {
        fs::remove_dir_all(&old_tables)?;
    }
    fs::rename(&tables, &old_tables)?;
    for name in ["certificates.json", "summary.txt"] {
        fs::rename(stage.path().join(name), dir.join(name))?;
    }
    Ok(())
}
