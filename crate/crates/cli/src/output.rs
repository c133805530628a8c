//! File writers: CSV with a `#` comment header, JSON reports and two-column plot data.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use inexact_gd_core::IterationRecord;
use serde::Serialize;

/// Column names of per-iteration files.
pub const ITERATION_COLUMNS: [&str; 7] = [
    "k",
    "f_gap",
    "exact_grad_norm",
    "tilde_grad_norm",
    "dist_from_x0",
    "L_k",
    "inner_evals",
];

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_header(w: &mut impl Write, header: &[String]) -> io::Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// Shortest round-trip form (`1e-7`, `0.1`, `3.0`), so files are byte-stable across runs.
pub fn num(v: f64) -> String {
    ryu::Buffer::new().format(v).to_string()
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes a table of string cells below a comment header.
pub fn write_csv<S: AsRef<str>>(
    path: &Path,
    header: &[String],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<S>>,
) -> io::Result<()> {
    let mut file = create(path)?;
    write_header(&mut file, header)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.as_ref()))?;
    }
    w.flush()
}

/// Per-iteration file. `f_shift` is subtracted from every `f_gap` cell, which turns raw values
/// into gaps when `f*` is only estimated after the run.
pub fn write_iterations_csv(
    path: &Path,
    header: &[String],
    records: &[IterationRecord],
    f_shift: f64,
) -> io::Result<()> {
    let rows = records.iter().map(|r| {
        vec![
            r.k.to_string(),
            num(r.f_gap - f_shift),
            num(r.exact_grad_norm),
            num(r.tilde_grad_norm),
            num(r.dist_from_x0),
            opt_num(r.l_k),
            r.inner_evals.map(|c| c.to_string()).unwrap_or_default(),
        ]
    });
    write_csv(path, header, &ITERATION_COLUMNS, rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    file.flush()
}

/// Two-column `x y` plot data with a comment header.
pub fn write_dat(path: &Path, header: &[String], points: impl IntoIterator<Item = (f64, f64)>) -> io::Result<()> {
    let mut file = create(path)?;
    write_header(&mut file, header)?;
    for (x, y) in points {
        writeln!(file, "{} {}", num(x), num(y))?;
    }
    file.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_csv_leaves_missing_cells_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/run.csv");
        let rec = IterationRecord {
            k: 0,
            f_gap: 1.5,
            exact_grad_norm: 2.0,
            tilde_grad_norm: 2.25,
            dist_from_x0: 0.0,
            l_k: None,
            inner_evals: None,
        };
        write_iterations_csv(&path, &["seed = 3".into()], &[rec], 0.5).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "# seed = 3\nk,f_gap,exact_grad_norm,tilde_grad_norm,dist_from_x0,L_k,inner_evals\n0,1.0,2.0,2.25,0.0,,\n"
        );
    }
}
