//! Resolving black boxes and explanations, and running repeated certifications.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::document::{ResultDocument, RunEntry};
use super::subprocess::SubprocessModel;
use crate::blackbox::{BlackBox, Model};
use crate::driver::{ecertify_with, DriverConfig};
use crate::error::{Error, Result};
use crate::explanation::Explanation;
use crate::metric::{Fidelity, QualityMetric};
use crate::point::Point;
use crate::special::synthetic::{hyperplane_explanation, SyntheticPwl};
use crate::strategies::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BlackBoxSource {
    /// Built-in model by name. Only `"pwl"` is defined.
    Builtin { name: String, dim: usize },
    /// External process speaking the JSON-lines protocol.
    Command { argv: Vec<String>, dim: usize },
}

impl BlackBoxSource {
    pub fn dim(&self) -> usize {
        match self {
            Self::Builtin { dim, .. } | Self::Command { dim, .. } => *dim,
        }
    }

    pub fn resolve(&self) -> Result<Arc<dyn Model>> {
        match self {
            Self::Builtin { name, dim } => match name.as_str() {
                "pwl" => Ok(Arc::new(SyntheticPwl::new(*dim))),
                other => Err(Error::InvalidArgument(format!("unknown builtin black box {other:?}"))),
            },
            Self::Command { argv, dim } => Ok(Arc::new(SubprocessModel::spawn_default(argv.clone(), Some(*dim))?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearExplanationFile {
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ExplanationSource {
    Linear { alpha: Vec<f64>, intercept: f64 },
    /// JSON file `{"alpha": [...], "intercept": c}`.
    File(PathBuf),
    /// `slope · Σ x_i`.
    Hyperplane { slope: f64 },
}

impl ExplanationSource {
    pub fn resolve(&self, dim: usize) -> Result<Explanation> {
        let e = match self {
            Self::Linear { alpha, intercept } => Explanation::linear(alpha.clone(), *intercept),
            Self::File(path) => {
                let f: LinearExplanationFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                Explanation::linear(f.alpha, f.intercept)
            }
            Self::Hyperplane { slope } => hyperplane_explanation(dim, *slope),
        };
        if let Some(d) = e.dim() {
            crate::error::check_dim(dim, d)?;
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub blackbox: BlackBoxSource,
    pub explanation: ExplanationSource,
    /// Defaults to the origin.
    pub x0: Option<Vec<f64>>,
    pub driver: DriverConfig,
    /// One certification per seed.
    pub seeds: Vec<u64>,
    pub record_timing: bool,
    pub parallel: bool,
}

impl RunSpec {
    /// Seeds `base, base + 1, ..., base + repeat - 1`.
    pub fn seed_list(base: u64, repeat: usize) -> Vec<u64> {
        (0..repeat as u64).map(|i| base.wrapping_add(i)).collect()
    }
}

/// Runs one certification per seed and collects a result document.
pub fn run_certify(spec: &RunSpec) -> Result<ResultDocument> {
    if spec.seeds.is_empty() {
        return Err(Error::InvalidArgument("need at least one seed".into()));
    }
    let dim = spec.blackbox.dim();
    let x0 = match &spec.x0 {
        Some(v) => Point::new(v.clone())?,
        None => Point::zeros(dim),
    };
    crate::error::check_dim(dim, x0.dim())?;
    let model = spec.blackbox.resolve()?;
    let explanation = spec.explanation.resolve(dim)?;
    let exec = if spec.parallel { Execution::Parallel } else { Execution::Sequential };

    let mut runs = Vec::with_capacity(spec.seeds.len());
    for &seed in &spec.seeds {
        let mut cfg = spec.driver.clone();
        cfg.strategy.seed = seed;
        let blackbox = BlackBox::from_arc(model.clone());
        let fidelity = Fidelity::new(QualityMetric::AbsFidelity, explanation.clone(), blackbox.clone())?;
        let start = Instant::now();
        let report = ecertify_with(&x0, &fidelity, &cfg, exec)?;
        let elapsed = start.elapsed().as_secs_f64();
        if blackbox.query_count() != report.total_queries {
            return Err(Error::Internal(format!(
                "query accounting mismatch: model saw {}, report says {}",
                blackbox.query_count(),
                report.total_queries
            )));
        }
        log::info!("seed {seed}: w = {} ({} queries, {elapsed:.3} s)", report.w, report.total_queries);
        runs.push(RunEntry::from_report(&report, spec.record_timing.then_some(elapsed)));
    }
    Ok(ResultDocument::new(runs))
}
