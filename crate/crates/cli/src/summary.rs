//! Per-cell aggregates of the results rows, and the files they go to.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qjoin::fit::Fit;
use qjoin::ledger::LEDGER_CSV_HEADER;
use qjoin::CommLedger;
use serde::Serialize;

use crate::trials::{mode_name, Row, CSV_HEADER};

/// Everything in a cell summary can be recomputed from its CSV rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub mode: &'static str,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_classical_bits: f64,
    pub mean_qubits: f64,
    pub mean_total: f64,
    pub mean_rounds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    /// `"n"` or `"ell"`.
    pub axis: &'static str,
    /// Value of the other parameter along this fit.
    pub fixed: usize,
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    pub ci_level: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl FitSummary {
    pub fn new(axis: &'static str, fixed: usize, points: usize, level: f64, fit: &Fit) -> Self {
        let (ci_low, ci_high) = fit.ci.unwrap_or((fit.slope, fit.slope));
        Self {
            axis,
            fixed,
            points,
            slope: fit.slope,
            intercept: fit.intercept,
            ci_level: level,
            ci_low,
            ci_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub name: String,
    pub required: String,
    pub observed: String,
    pub met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub command: &'static str,
    pub seed: u64,
    pub cells: Vec<CellSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<FitSummary>,
    pub thresholds: Vec<Threshold>,
    pub all_thresholds_met: bool,
}

/// Groups consecutive rows of the same cell, which is how the grid runner
/// orders them.
pub fn summarize_cells(rows: &[Row]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    for chunk in rows.chunk_by(|a, b| a.cell == b.cell) {
        let count = chunk.len() as f64;
        let mean = |f: &dyn Fn(&Row) -> u64| chunk.iter().map(f).sum::<u64>() as f64 / count;
        let successes = chunk.iter().filter(|r| r.success).count();
        let cell = chunk[0].cell;
        out.push(CellSummary {
            n: cell.n,
            m: cell.m,
            ell: cell.ell,
            mode: mode_name(chunk[0].mode),
            trials: chunk.len(),
            successes,
            success_rate: successes as f64 / count,
            mean_classical_bits: mean(&|r| r.classical_bits),
            mean_qubits: mean(&|r| r.qubits),
            mean_total: mean(&|r| r.classical_bits + r.qubits),
            mean_rounds: mean(&|r| r.rounds),
        });
    }
    out
}

/// One threshold line per cell whose success rate is checked.
pub fn success_thresholds(cells: &[CellSummary], min_success: Option<f64>) -> Vec<Threshold> {
    let Some(min) = min_success else {
        return Vec::new();
    };
    cells
        .iter()
        .map(|c| Threshold {
            name: format!("success n={} m={} ell={}", c.n, c.m, c.ell),
            required: format!(">= {min}"),
            observed: format!("{}", c.success_rate),
            met: c.success_rate >= min,
        })
        .collect()
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_rows(path: &Path, rows: &[Row]) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv())?;
    }
    w.flush()
}

/// Message-level ledger CSV; `trial_id` is the row index in the results CSV.
pub fn write_ledgers<'a>(path: &Path, ledgers: impl Iterator<Item = &'a CommLedger>) -> io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{LEDGER_CSV_HEADER}")?;
    for (id, ledger) in ledgers.enumerate() {
        ledger.write_csv(id as u64, &mut w)?;
    }
    w.flush()
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    println!("{text}");
    if let Some(path) = path {
        let mut w = create(path)?;
        writeln!(w, "{text}")?;
        w.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trials::Cell;
    use qjoin::qsim::Mode;

    fn row(n: usize, success: bool, bits: u64) -> Row {
        Row {
            cell: Cell { n, m: n, ell: 4 },
            mode: Mode::Exact,
            seed: 0,
            success,
            classical_bits: bits,
            qubits: 1,
            rounds: 2,
            wall_time_ms: 0.0,
        }
    }

    #[test]
    fn cells_group_consecutive_rows() {
        let rows = [row(8, true, 10), row(8, false, 20), row(16, true, 5)];
        let cells = summarize_cells(&rows);
        assert_eq!(cells.len(), 2);
        assert_eq!((cells[0].trials, cells[0].successes), (2, 1));
        assert_eq!(cells[0].mean_classical_bits, 15.0);
        assert_eq!(cells[0].mean_total, 16.0);
        assert_eq!(cells[1].success_rate, 1.0);

        let th = success_thresholds(&cells, Some(0.9));
        assert_eq!(th.iter().map(|t| t.met).collect::<Vec<_>>(), vec![false, true]);
        assert!(success_thresholds(&cells, None).is_empty());
    }
}
