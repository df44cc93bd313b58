//! Text, CSV and JSON formats.
//!
//! Data files hold one number per line; blank lines and lines starting with
//! `#` are skipped, and the decimal separator is always `.`. Curve tables
//! are CSV with a mandatory header; boxplot samples and run manifests are
//! JSON. Floats are written in shortest round-trip form, so a parse of a
//! written file reproduces the values bit for bit.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::simulation::{BoxplotOutput, CurveRow, SimPlan};
use crate::{Error, Result};

/// Parses the one-number-per-line data format.
pub fn parse_sample_text(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("`{}` is not a number", truncate(line, 40)),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse { line: i + 1, message: format!("`{line}` is not finite") });
        }
        values.push(value);
    }
    Ok(values)
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

pub fn read_sample_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    parse_sample_text(&text)
}

pub const CURVE_COLUMNS: [&str; 7] =
    ["tau", "k", "median_classic", "median_reduced", "mse_classic", "mse_reduced", "true_log_q"];

/// Writes curve rows as CSV; an empty table still gets its header.
pub fn write_curves_csv<W: Write>(writer: W, rows: &[CurveRow]) -> Result<()> {
    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    csv.write_record(CURVE_COLUMNS)?;
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_curves_csv<R: Read>(reader: R) -> Result<Vec<CurveRow>> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = csv.headers()?.clone();
    if headers.iter().ne(CURVE_COLUMNS.iter().copied()) {
        return Err(Error::Parse { line: 1, message: format!("unexpected curve header {:?}", headers) });
    }
    csv.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// `(k, amse)` pairs of a selection curve.
pub fn write_amse_csv<W: Write>(writer: W, k_values: &[usize], amse: &[f64]) -> Result<()> {
    let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    csv.write_record(["k", "amse"])?;
    for (k, a) in k_values.iter().zip(amse) {
        csv.write_record([k.to_string(), a.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_amse_csv<R: Read>(reader: R) -> Result<Vec<(usize, f64)>> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = csv.headers()?.clone();
    if headers.iter().ne(["k", "amse"]) {
        return Err(Error::Parse { line: 1, message: format!("unexpected amse header {:?}", headers) });
    }
    csv.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_boxplot_json<W: Write>(writer: W, out: &BoxplotOutput) -> Result<()> {
    let mut w = writer;
    serde_json::to_writer_pretty(&mut w, out)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn parse_boxplot_json(text: &str) -> Result<BoxplotOutput> {
    let out: BoxplotOutput = serde_json::from_str(text)?;
    let n = out.k_hat.len();
    if out.log_at_k_opt.len() != n || out.log_at_k_hat.len() != n {
        return Err(Error::Parse { line: 0, message: "boxplot columns have different lengths".into() });
    }
    Ok(out)
}

/// Everything needed to rerun a simulation bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub plan: SimPlan,
    pub files: Vec<String>,
}

pub fn parse_manifest_json(text: &str) -> Result<Manifest> {
    Ok(serde_json::from_str(text)?)
}

fn tau_label(tau: f64) -> String {
    format!("{tau}")
}

pub fn curves_file_name(plan: &SimPlan, tau: f64) -> String {
    format!("curves_{}_{}.csv", plan.spec.label(), tau_label(tau))
}

pub fn boxplot_file_name(plan: &SimPlan, tau: f64) -> String {
    format!("boxplot_{}_{}.json", plan.spec.label(), tau_label(tau))
}

/// Writes `curves_<dist>_<tau>.csv`, `boxplot_<dist>_<tau>.json` and
/// `manifest.json` into `dir`, returning the paths written.
pub fn write_output_dir(
    dir: impl AsRef<Path>,
    command: &str,
    plan: &SimPlan,
    curves: Option<&crate::simulation::CurveOutput>,
    boxplots: Option<&[BoxplotOutput]>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if let Some(curves) = curves {
        for table in &curves.tables {
            let path = dir.join(curves_file_name(plan, table.tau));
            let file = BufWriter::new(File::create(&path)?);
            write_curves_csv(file, &table.rows)?;
            written.push(path);
        }
    }
    if let Some(boxplots) = boxplots {
        for b in boxplots {
            let path = dir.join(boxplot_file_name(plan, b.tau));
            let mut file = BufWriter::new(File::create(&path)?);
            write_boxplot_json(&mut file, b)?;
            file.flush()?;
            written.push(path);
        }
    }
    let manifest = Manifest {
        tool: "wtail".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        plan: plan.clone(),
        files: written
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
    };
    let path = dir.join("manifest.json");
    let mut file = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut file, &manifest)?;
    file.write_all(b"\n")?;
    file.flush()?;
    written.push(path);
    Ok(written)
}
