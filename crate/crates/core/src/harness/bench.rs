//! Synthetic benchmark grid: half-width and wall-clock per (d, Q, strategy) cell.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::Summary;
use crate::driver::{ecertify, DriverConfig};
use crate::error::{Error, Result};
use crate::metric::QualityMetric;
use crate::special::synthetic::make_synthetic;
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub dims: Vec<usize>,
    pub budgets: Vec<u64>,
    pub strategies: Vec<StrategyKind>,
    pub seeds: Vec<u64>,
    /// Explanation slope of the synthetic benchmark.
    pub slope: f64,
    /// Template for everything except strategy kind, budget and seed.
    pub driver: DriverConfig,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub dim: usize,
    pub budget: u64,
    pub strategy: StrategyKind,
    pub seeds: usize,
    pub w_mean: f64,
    pub w_stderr: f64,
    pub time_mean: f64,
    pub time_stderr: f64,
    pub time_median: f64,
    pub optimal_w: f64,
}

fn run_cell(grid: &BenchGrid, dim: usize, budget: u64, strategy: StrategyKind) -> Result<BenchCell> {
    let mut ws = Vec::with_capacity(grid.seeds.len());
    let mut times = Vec::with_capacity(grid.seeds.len());
    for &seed in &grid.seeds {
        let syn = make_synthetic(dim, grid.slope)?;
        let mut cfg = grid.driver.clone();
        cfg.strategy.kind = strategy;
        cfg.strategy.budget = budget;
        cfg.strategy.seed = seed;
        let start = Instant::now();
        let report = ecertify(&syn.x0, &syn.blackbox, &syn.explanation, &QualityMetric::AbsFidelity, &cfg)?;
        times.push(start.elapsed().as_secs_f64());
        ws.push(report.w);
    }
    let w = Summary::of(&ws).ok_or_else(|| Error::InvalidArgument("no seeds".into()))?;
    let t = Summary::of(&times).expect("same length as ws");
    Ok(BenchCell {
        dim,
        budget,
        strategy,
        seeds: ws.len(),
        w_mean: w.mean,
        w_stderr: w.mean_stderr,
        time_mean: t.mean,
        time_stderr: t.mean_stderr,
        time_median: t.median,
        optimal_w: 1.0 / dim as f64,
    })
}

/// Runs every cell of the grid; cell order is d, then Q, then strategy.
pub fn bench_tables(grid: &BenchGrid) -> Result<Vec<BenchCell>> {
    if grid.seeds.is_empty() || grid.dims.is_empty() || grid.budgets.is_empty() || grid.strategies.is_empty() {
        return Err(Error::InvalidArgument("empty benchmark grid".into()));
    }
    let mut cells = Vec::new();
    for &d in &grid.dims {
        for &q in &grid.budgets {
            for &s in &grid.strategies {
                cells.push((d, q, s));
            }
        }
    }
    if grid.parallel {
        cells.par_iter().map(|&(d, q, s)| run_cell(grid, d, q, s)).collect()
    } else {
        cells.iter().map(|&(d, q, s)| run_cell(grid, d, q, s)).collect()
    }
}

pub fn write_csv<W: Write>(cells: &[BenchCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in cells {
        w.serialize(c).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}
