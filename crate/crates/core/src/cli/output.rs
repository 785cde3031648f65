//! CSV and JSON emitters. Floats are written with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::experiment::ResultRecord;
use crate::error::{Error, Result};
use crate::moments::ModifiedMoments;
use crate::mz::MzReport;

pub const RESULTS_HEADER: &str = "experiment,n,m,eta,uniform_error,residual,seconds";
pub const MZ_HEADER: &str = "n,eta,lambda_min,lambda_max,exact_to,mesh_norm,degree_bound";
pub const MOMENTS_HEADER: &str = "l,mu,method";

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn results_csv(records: &[ResultRecord]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.experiment,
            r.n,
            r.m,
            fmt_float(r.eta),
            fmt_opt(r.uniform_error, fmt_float),
            fmt_float(r.residual),
            fmt_float(r.seconds)
        );
    }
    out
}

pub fn mz_csv(reports: &[MzReport]) -> String {
    let mut out = format!("{MZ_HEADER}\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            fmt_float(r.eta),
            fmt_float(r.lambda_min),
            fmt_float(r.lambda_max),
            fmt_opt(r.exact_to, |d| d.to_string()),
            fmt_float(r.mesh_norm),
            fmt_float(r.degree_bound)
        );
    }
    out
}

pub fn moments_csv(moments: &ModifiedMoments) -> String {
    let mut out = format!("{MOMENTS_HEADER}\n");
    for (l, (mu, method)) in moments.values().iter().zip(moments.methods()).enumerate() {
        let _ = writeln!(out, "{l},{},{method}", fmt_float(*mu));
    }
    out
}

/// JSON mirror of a run: the configuration echo, the rows and any warnings.
#[derive(Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct JsonMirror<T> {
    pub config: RunConfig,
    pub records: Vec<T>,
    pub warnings: Vec<String>,
}

/// `results.csv` → `results.json`
pub fn json_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `csv` to `path` and the JSON mirror next to it.
pub fn emit<T: Serialize>(path: &Path, csv: &str, mirror: &JsonMirror<T>) -> Result<()> {
    write_file(path, csv)?;
    let json = serde_json::to_string_pretty(mirror)
        .map_err(|e| Error::Numerical(format!("cannot serialize results: {e}")))?;
    write_file(&json_path(path), &(json + "\n"))
}

/// Result rows to CSV plus JSON mirror.
pub fn emit_results(records: &[ResultRecord], config: &RunConfig, warnings: &[String], path: &Path) -> Result<()> {
    let mirror = JsonMirror {
        config: config.clone(),
        records: records.to_vec(),
        warnings: warnings.to_vec(),
    };
    emit(path, &results_csv(records), &mirror)
}
