use std::fs;
use std::path::{Path, PathBuf};

use dfsim::dynamics::Trajectory;
use dfsim::state::ComplexPair;
use dfsim::CMatrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const TRAJECTORY_HEADER: [&str; 9] = [
    "t",
    "fidelity_phi1",
    "fidelity_phi2",
    "purity",
    "concurrence",
    "pop_phi1",
    "pop_phi2",
    "pop_phi3",
    "pop_phi4",
];

/// Columns that hold probabilities and must lie in `[0, 1]`.
pub const PROBABILITY_COLUMNS: [&str; 12] = [
    "fidelity_phi1",
    "fidelity_phi2",
    "purity",
    "concurrence",
    "pop_phi1",
    "pop_phi2",
    "pop_phi3",
    "pop_phi4",
    "rho22_0",
    "p1",
    "p2",
    "dfs_fidelity",
];

pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn prepare_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::other(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory<f64>) -> CliResult<()> {
    let columns: Vec<&[f64]> = TRAJECTORY_HEADER[1..]
        .iter()
        .map(|name| {
            traj.observable(name)
                .ok_or_else(|| CliError::other(format!("trajectory lacks the '{name}' series")))
        })
        .collect::<CliResult<_>>()?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRAJECTORY_HEADER)?;
    for (k, t) in traj.times.iter().enumerate() {
        let mut row = vec![fmt_num(*t)];
        row.extend(columns.iter().map(|c| fmt_num(c[k])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

pub fn matrix_rows(m: &CMatrix<f64>) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

pub fn output_path(dir: &Path, stem: &str, ext: &str) -> PathBuf {
    dir.join(format!("{stem}.{ext}"))
}

/// Re-reads an emitted CSV: a `t` column must be strictly increasing and
/// probability columns must lie in `[0, 1]` up to [`PROBABILITY_SLACK`].
pub fn validate_csv(path: &Path) -> CliResult<()> {
    let fail = |msg: String| CliError::numerics(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let t_col = header.iter().position(|h| h == "t");
    let prob_cols: Vec<(usize, String)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| PROBABILITY_COLUMNS.contains(h))
        .map(|(i, h)| (i, h.to_string()))
        .collect();
    let mut last_t = f64::NEG_INFINITY;
    let mut rows = 0usize;
    for (line, record) in r.records().enumerate() {
        let record = record?;
        rows += 1;
        let value = |i: usize| -> CliResult<f64> {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| fail(format!("row {}: column {i} is not a number", line + 1)))
        };
        if let Some(i) = t_col {
            let t = value(i)?;
            if !(t > last_t) {
                return Err(fail(format!(
                    "row {}: time column not increasing",
                    line + 1
                )));
            }
            last_t = t;
        }
        for (i, name) in &prob_cols {
            let v = value(*i)?;
            if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&v) {
                return Err(fail(format!(
                    "row {}: {name} = {v} outside [0, 1]",
                    line + 1
                )));
            }
        }
    }
    if rows == 0 {
        return Err(fail("no data rows".into()));
    }
    Ok(())
}
