//! Versioned JSON result documents.
//!
//! Fidelity samples are stored per region as runs of consecutive samples that
//! share a provenance, with points flattened row-major. This keeps files small
//! and preserves sample order exactly, so documents round-trip.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::Summary;
use crate::bounds::BoundResult;
use crate::driver::DriverConfig;
use crate::error::{Error, Result};
use crate::point::Point;
use crate::record::{CertificationReport, CertifyOutcome, FidelitySample, IterationTrace, Provenance, RegionRecord};
use crate::shell::ShellRegion;
use crate::strategies::StrategyKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGroup {
    pub provenance: Provenance,
    /// `len(fidelities) * d` coordinates, row-major.
    pub points: Vec<f64>,
    pub fidelities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEntry {
    pub lb: f64,
    pub ub: f64,
    pub strategy: StrategyKind,
    pub certified: bool,
    pub violator: Option<Vec<f64>>,
    pub min_fidelity: f64,
    pub queries_used: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<IterationTrace>,
    pub samples: Vec<SampleGroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub seed: u64,
    pub w: f64,
    pub x0: Vec<f64>,
    pub x0_fidelity: f64,
    pub total_queries: u64,
    pub f_hat_star_w: Option<f64>,
    pub f_hat_second: Option<f64>,
    #[serde(default)]
    pub globally_certified: bool,
    pub config: DriverConfig,
    pub regions: Vec<RegionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub runs: usize,
    pub w: Summary,
    pub total_queries: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_secs: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub runs: Vec<RunEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<RunSummary>,
}

fn group_samples(samples: &[FidelitySample]) -> Vec<SampleGroup> {
    let mut groups: Vec<SampleGroup> = Vec::new();
    for s in samples {
        match groups.last_mut() {
            Some(g) if g.provenance == s.provenance => {
                g.points.extend_from_slice(&s.point);
                g.fidelities.push(s.fidelity);
            }
            _ => groups.push(SampleGroup {
                provenance: s.provenance,
                points: s.point.to_vec(),
                fidelities: vec![s.fidelity],
            }),
        }
    }
    groups
}

impl RunEntry {
    pub fn from_report(report: &CertificationReport, wall_clock_secs: Option<f64>) -> Self {
        let regions = report
            .regions
            .iter()
            .map(|r| RegionEntry {
                lb: r.shell.lb(),
                ub: r.shell.ub(),
                strategy: r.strategy,
                certified: r.outcome.certified,
                violator: r.outcome.violator.as_ref().map(|v| v.to_vec()),
                min_fidelity: r.outcome.min_fidelity,
                queries_used: r.outcome.queries_used,
                trace: r.outcome.trace.clone(),
                samples: group_samples(&r.outcome.samples),
            })
            .collect();
        Self {
            seed: report.config.strategy.seed,
            w: report.w,
            x0: report.x0.to_vec(),
            x0_fidelity: report.x0_fidelity,
            total_queries: report.total_queries,
            f_hat_star_w: report.f_hat_star_w,
            f_hat_second: report.f_hat_second,
            globally_certified: report.globally_certified,
            config: report.config.clone(),
            regions,
            wall_clock_secs,
        }
    }

    pub fn to_report(&self) -> Result<CertificationReport> {
        let x0 = Point::new(self.x0.clone())?;
        let d = x0.dim();
        let regions = self
            .regions
            .iter()
            .enumerate()
            .map(|(index, r)| {
                let mut samples = Vec::new();
                for g in &r.samples {
                    if g.points.len() != g.fidelities.len() * d {
                        return Err(Error::InvalidArgument(format!(
                            "region {index}: {} coordinates for {} samples in dimension {d}",
                            g.points.len(),
                            g.fidelities.len()
                        )));
                    }
                    for (chunk, &fidelity) in g.points.chunks(d).zip(&g.fidelities) {
                        samples.push(FidelitySample {
                            point: Point::new(chunk.to_vec())?,
                            fidelity,
                            region_index: index,
                            provenance: g.provenance,
                        });
                    }
                }
                Ok(RegionRecord {
                    shell: ShellRegion::new(x0.clone(), r.lb, r.ub)?,
                    strategy: r.strategy,
                    outcome: CertifyOutcome {
                        certified: r.certified,
                        violator: r.violator.clone().map(Point::new).transpose()?,
                        min_fidelity: r.min_fidelity,
                        samples,
                        queries_used: r.queries_used,
                        trace: r.trace.clone(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CertificationReport {
            w: self.w,
            x0,
            x0_fidelity: self.x0_fidelity,
            regions,
            total_queries: self.total_queries,
            config: self.config.clone(),
            f_hat_star_w: self.f_hat_star_w,
            f_hat_second: self.f_hat_second,
            globally_certified: self.globally_certified,
        })
    }
}

impl ResultDocument {
    pub fn new(runs: Vec<RunEntry>) -> Self {
        let summary = (runs.len() > 1).then(|| summarize(&runs)).flatten();
        Self { schema_version: SCHEMA_VERSION, runs, summary }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(s)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn reports(&self) -> Result<Vec<CertificationReport>> {
        self.runs.iter().map(RunEntry::to_report).collect()
    }
}

fn summarize(runs: &[RunEntry]) -> Option<RunSummary> {
    let ws: Vec<f64> = runs.iter().map(|r| r.w).collect();
    let qs: Vec<f64> = runs.iter().map(|r| r.total_queries as f64).collect();
    let times: Option<Vec<f64>> = runs.iter().map(|r| r.wall_clock_secs).collect();
    Some(RunSummary {
        runs: runs.len(),
        w: Summary::of(&ws)?,
        total_queries: Summary::of(&qs)?,
        wall_clock_secs: times.and_then(|t| Summary::of(&t)),
    })
}

/// Output of the `bounds` command: one bound per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundDocument {
    pub schema_version: u32,
    pub bounds: Vec<BoundEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub seed: u64,
    pub result: Option<BoundResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub compute_secs: f64,
}
