//! Trajectory files: one CSV per snapshot (`x,u` or `x,y,u`) and a JSON
//! manifest with times, grid, a config echo and the conservation ledger.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SolutionField};
use crate::harness::DecayReport;
use crate::solver::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub time: f64,
    pub mass: f64,
    /// `(mass - initial mass) / max(|initial mass|, 1)`
    pub relative_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub times: Vec<f64>,
    /// Snapshot files, relative to the manifest.
    pub files: Vec<String>,
    pub grid: Grid,
    pub config: serde_json::Value,
    pub ledger: Vec<LedgerEntry>,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    }
}

pub fn conservation_ledger(trajectory: &[SolutionField]) -> Vec<LedgerEntry> {
    let m0 = trajectory.first().map(SolutionField::mass).unwrap_or(0.0);
    trajectory
        .iter()
        .map(|f| {
            let mass = f.mass();
            LedgerEntry {
                time: f.time,
                mass,
                relative_drift: (mass - m0) / m0.abs().max(1.0),
            }
        })
        .collect()
}

fn write_snapshot(path: &Path, field: &SolutionField) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let grid = &field.grid;
    let header: &[&str] = if grid.dimension() == 1 {
        &["x", "u"]
    } else {
        &["x", "y", "u"]
    };
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for (idx, u) in field.values.iter().enumerate() {
        let mut row: Vec<String> = grid.cell_center(idx).iter().map(|c| c.to_string()).collect();
        row.push(u.to_string());
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write `<prefix>_NNNN.csv` per snapshot and `<prefix>_manifest.json`;
/// returns the manifest path.
pub fn write_trajectory(
    prefix: &Path,
    trajectory: &[SolutionField],
    config: serde_json::Value,
) -> Result<PathBuf> {
    let grid = trajectory
        .first()
        .map(|f| f.grid.clone())
        .ok_or_else(|| Error::config("nothing to write: empty trajectory"))?;
    let dir = prefix
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = prefix
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::config(format!("bad output prefix {}", prefix.display())))?;
    let mut files = Vec::new();
    for (k, field) in trajectory.iter().enumerate() {
        let name = format!("{stem}_{k:04}.csv");
        write_snapshot(&dir.join(&name), field)?;
        files.push(name);
    }
    let manifest = Manifest {
        times: trajectory.iter().map(|f| f.time).collect(),
        files,
        grid,
        config,
        ledger: conservation_ledger(trajectory),
    };
    let path = dir.join(format!("{stem}_manifest.json"));
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Load every snapshot listed in a manifest.
pub fn read_trajectory(manifest_path: &Path) -> Result<Trajectory> {
    let manifest = read_manifest(manifest_path)?;
    if manifest.times.len() != manifest.files.len() {
        return Err(Error::Parse("manifest times and files differ in length".into()));
    }
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    manifest
        .files
        .iter()
        .zip(&manifest.times)
        .map(|(name, &t)| {
            let path = dir.join(name);
            let mut r = csv::Reader::from_path(&path).map_err(|e| csv_err(&path, e))?;
            let mut values = Vec::with_capacity(manifest.grid.len());
            for rec in r.records() {
                let rec = rec.map_err(|e| csv_err(&path, e))?;
                let u = rec
                    .get(rec.len().saturating_sub(1))
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("{}: bad row", path.display())))?;
                values.push(u);
            }
            SolutionField::new(manifest.grid.clone(), values, t)
        })
        .collect()
}

/// Columns `t, linf_diff, l1_diff, bound_envelope`.
pub fn write_decay_csv(path: &Path, report: &DecayReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["t", "linf_diff", "l1_diff", "bound_envelope"])
        .map_err(|e| csv_err(path, e))?;
    for i in 0..report.times.len() {
        w.write_record([
            report.times[i].to_string(),
            report.linf_diff[i].to_string(),
            report.l1_diff[i].to_string(),
            report.bound_envelope[i].to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
