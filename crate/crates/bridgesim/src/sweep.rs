use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::experiment::{simulate, ExperimentConfig};

pub const SWEEP_HEADER: [&str; 8] = [
    "beta",
    "eta",
    "replica",
    "seed",
    "nb_fraction",
    "mb_fraction",
    "mean_bridge_count",
    "mean_H",
];

/// Grid of `(beta, eta)` cells run `replicas` times each on top of `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub beta_values: Vec<f64>,
    pub eta_values: Vec<f64>,
    pub replicas: u32,
    pub base: ExperimentConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub eta: f64,
    pub replica: u32,
    pub seed: u64,
    pub nb_fraction: f64,
    pub mb_fraction: f64,
    pub mean_bridge_count: f64,
    #[serde(rename = "mean_H")]
    pub mean_h: f64,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.beta_values.is_empty() || self.eta_values.is_empty() {
            return Err(CliError::Config("sweep grids must be nonempty".into()));
        }
        if self.replicas == 0 {
            return Err(CliError::Config("need at least one replica".into()));
        }
        self.base.validate()
    }

    /// Cell index of `(i_beta, i_eta)`, which selects the random stream.
    pub fn cell(&self, i_beta: usize, i_eta: usize) -> u32 {
        (i_beta * self.eta_values.len() + i_eta) as u32
    }

    fn tasks(&self) -> Vec<(u32, u32, f64, f64)> {
        let mut out = Vec::new();
        for (ib, &beta) in self.beta_values.iter().enumerate() {
            for (ie, &eta) in self.eta_values.iter().enumerate() {
                for r in 0..self.replicas {
                    out.push((self.cell(ib, ie), r, beta, eta));
                }
            }
        }
        out
    }

    /// Runs one replica of one cell.
    pub fn run_task(&self, cell: u32, replica: u32, beta: f64, eta: f64) -> Result<SweepRow> {
        let mut cfg = self.base.clone();
        cfg.beta = beta;
        cfg.eta = eta;
        cfg.oracle_compare = false;
        let s = simulate(&cfg, cell, replica, |_| Ok(()))?.summary;
        Ok(SweepRow {
            beta,
            eta,
            replica,
            seed: cfg.seed,
            nb_fraction: s.nb_fraction,
            mb_fraction: s.mb_fraction,
            mean_bridge_count: s.mean_bridge_count,
            mean_h: s.mean_h,
        })
    }
}

fn key(beta: f64, eta: f64, replica: u32) -> (u64, u64, u32) {
    (beta.to_bits(), eta.to_bits(), replica)
}

fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in reader.deserialize() {
        match rec {
            Ok(row) => rows.push(row),
            // a torn final line from an interrupted run
            Err(e)
                if matches!(
                    e.kind(),
                    csv::ErrorKind::UnequalLengths { .. } | csv::ErrorKind::Deserialize { .. }
                ) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rows)
}

fn row_record(r: &SweepRow) -> [String; 8] {
    [
        r.beta.to_string(),
        r.eta.to_string(),
        r.replica.to_string(),
        r.seed.to_string(),
        r.nb_fraction.to_string(),
        r.mb_fraction.to_string(),
        r.mean_bridge_count.to_string(),
        r.mean_h.to_string(),
    ]
}

/// Runs every missing `(beta, eta, replica)` row of `grid` in parallel,
/// appending each finished row to `path`, then rewrites the file sorted by
/// grid order. Rows already present are kept, so an interrupted sweep
/// resumes where it stopped.
pub fn run_sweep(grid: &SweepGrid, path: &Path) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let existing = read_rows(path)?;
    let done: BTreeSet<_> = existing.iter().map(|r| key(r.beta, r.eta, r.replica)).collect();
    // drop any torn line before appending
    write_rows(path, &existing)?;
    let file = OpenOptions::new().append(true).open(path).map_err(CliError::io(path))?;
    let sink = Mutex::new(file);
    let todo: Vec<_> = grid
        .tasks()
        .into_iter()
        .filter(|&(_, r, b, e)| !done.contains(&key(b, e, r)))
        .collect();
    let fresh: Vec<SweepRow> = todo
        .par_iter()
        .map(|&(cell, r, beta, eta)| {
            let row = grid.run_task(cell, r, beta, eta)?;
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(row_record(&row))?;
            let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
            let mut f = sink.lock().expect("sweep writer poisoned");
            f.write_all(&bytes)
                .and_then(|_| f.flush())
                .map_err(CliError::io(path))?;
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let order: Vec<_> = grid.tasks().iter().map(|&(_, r, b, e)| key(b, e, r)).collect();
    let mut rows: Vec<SweepRow> = existing.into_iter().chain(fresh).collect();
    rows.sort_by_key(|r| {
        order
            .iter()
            .position(|k| *k == key(r.beta, r.eta, r.replica))
            .unwrap_or(usize::MAX)
    });
    rows.dedup_by_key(|r| key(r.beta, r.eta, r.replica));

    write_rows(path, &rows)?;
    Ok(rows)
}

/// Atomically replaces `path` with a header and `rows`.
fn write_rows(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let f = File::create(&tmp).map_err(CliError::io(&tmp))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(f));
        w.write_record(SWEEP_HEADER)?;
        for r in rows {
            w.write_record(row_record(r))?;
        }
        w.flush().map_err(CliError::io(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(CliError::io(path))
}
