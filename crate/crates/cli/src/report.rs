use std::fs;
use std::path::{Path, PathBuf};

use efetlab_core::table::Table;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Effective configuration, defaults included.
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    pub summary: Value,
    pub runtime_seconds: f64,
    /// Set when a numeric step failed; the tables then hold partial results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub table: String,
    pub file: String,
    pub columns: Vec<String>,
    pub x: String,
    pub y: String,
    pub scale: String,
}

/// Suggested plot axes for a table.
fn axes(t: &Table) -> (String, String, &'static str) {
    let col = |i: usize| t.header.get(i).cloned().unwrap_or_default();
    match t.name.as_str() {
        "count" => ("R".into(), "n_F".into(), "loglog"),
        "interp" => ("n".into(), "abs_deviation".into(), "logy"),
        "hadamard_profile" => ("r".into(), "g_R".into(), "linear"),
        "v_R_scan" => ("theta".into(), "v_R".into(), "linear"),
        "zeros" => ("re".into(), "im".into(), "linear"),
        "parseval" => ("R".into(), "parseval_lower".into(), "linear"),
        "factorization" => ("abs_z".into(), "residual".into(), "logy"),
        "growth" => ("r".into(), "log_abs_G".into(), "linear"),
        "riesz" => ("x".into(), "density".into(), "loglog"),
        "theta_scan" => ("r".into(), "max_excess".into(), "linear"),
        _ => (col(0), col(1), "linear"),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes one CSV per table, `<experiment>.json` with the report minus tables, and
/// `manifest.json` into the directory `out`. Returns the paths written.
pub fn emit_plotdata(report: &Report, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for t in &report.tables {
        let file = format!("{}.csv", t.name);
        let path = out.join(&file);
        write(&path, &t.to_csv_string())?;
        written.push(path);
        let (x, y, scale) = axes(t);
        entries.push(ManifestEntry {
            table: t.name.clone(),
            file,
            columns: t.header.clone(),
            x,
            y,
            scale: scale.into(),
        });
    }
    let tag = report.config.experiment.tag();
    let summary = json!({
        "config": report.config,
        "summary": report.summary,
        "runtime_seconds": report.runtime_seconds,
        "failure": report.failure,
        "tables": report.tables.iter().map(|t| &t.name).collect::<Vec<_>>(),
    });
    let path = out.join(format!("{tag}.json"));
    write(&path, &(serde_json::to_string_pretty(&summary).expect("report serializes") + "\n"))?;
    written.push(path);
    let manifest = json!({ "experiment": tag, "tables": entries });
    let path = out.join("manifest.json");
    write(&path, &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"))?;
    written.push(path);
    Ok(written)
}
