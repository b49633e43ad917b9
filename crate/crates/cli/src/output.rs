//! CSV serialisation: header row, LF line endings, 17 significant digits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mazer_core::airy::airy_eval;
use mazer_core::analysis::linspace;

use crate::run::{Outcome, PeakRow, Table};

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf)
}

pub fn table_bytes(t: &Table) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(&t.header).map_err(|e| e.to_string())?;
        for row in &t.rows {
            w.write_record(row.iter().map(|v| v.map(number).unwrap_or_default())).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    Ok(buf)
}

pub fn peaks_bytes(peaks: &[PeakRow]) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(["column", "center", "height", "fwhm", "prominence", "edge_truncated", "under_resolved"])
            .map_err(|e| e.to_string())?;
        for p in peaks {
            w.write_record([
                p.column.clone(),
                number(p.center),
                number(p.height),
                number(p.fwhm),
                number(p.prominence),
                p.edge_truncated.to_string(),
                p.under_resolved.to_string(),
            ])
            .map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    Ok(buf)
}

/// Writes through a temporary sibling so a failed run leaves no partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| format!("cannot write {}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        format!("cannot write {}: {e}", path.display())
    })
}

pub fn peaks_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".peaks.csv");
    PathBuf::from(p)
}

pub fn write_outcome(o: &Outcome, out: Option<&PathBuf>) -> Result<(), String> {
    let table = table_bytes(&o.table)?;
    match out {
        None => std::io::stdout().write_all(&table).map_err(|e| e.to_string()),
        Some(path) => {
            let peaks = o.peaks.as_deref().map(peaks_bytes).transpose()?;
            write_atomic(path, &table)?;
            if let Some(p) = peaks {
                write_atomic(&peaks_path(path), &p)?;
            }
            Ok(())
        }
    }
}

pub fn airy_table(from: f64, to: f64, count: usize) -> Result<Outcome, String> {
    if !(to > from) || count < 2 {
        return Err("airy-table needs from < to and count >= 2".into());
    }
    let rows = linspace(from, to, count)
        .into_iter()
        .map(|z| {
            let p = airy_eval(z).map_err(|e| e.to_string())?;
            Ok(vec![Some(z), Some(p.ai), Some(p.aip), Some(p.bi), Some(p.bip)])
        })
        .collect::<Result<_, String>>()?;
    let header = ["z", "Ai", "Ai'", "Bi", "Bi'"].map(String::from).to_vec();
    Ok(Outcome { table: Table { header, rows }, peaks: None, gaps: Vec::new(), notes: Vec::new() })
}
