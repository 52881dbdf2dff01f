//! Per-region and per-run certification records.

use serde::{Deserialize, Serialize};

use crate::driver::DriverConfig;
use crate::point::Point;
use crate::shell::ShellRegion;
use crate::strategies::StrategyKind;

/// Where a fidelity sample came from inside a Certify call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Uniform,
    /// Gaussian sample around prototype `prototype` (0-based) drawn in outer
    /// iteration `iteration` (1-based).
    Prototype { iteration: u32, prototype: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySample {
    pub point: Point,
    pub fidelity: f64,
    pub region_index: usize,
    pub provenance: Provenance,
}

/// What one outer iteration of an incremental strategy did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: u32,
    /// Number of prototypes drawn (`n`).
    pub prototypes: u32,
    /// adaptI only: the prototype left after the halving rounds.
    pub survivor: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutcome {
    pub certified: bool,
    pub violator: Option<Point>,
    pub min_fidelity: f64,
    pub samples: Vec<FidelitySample>,
    pub queries_used: u64,
    pub trace: Vec<IterationTrace>,
}

impl CertifyOutcome {
    /// Smallest and second-smallest sampled fidelity.
    pub fn two_smallest(&self) -> (Option<f64>, Option<f64>) {
        two_smallest(self.samples.iter().map(|s| s.fidelity))
    }
}

pub(crate) fn two_smallest(values: impl Iterator<Item = f64>) -> (Option<f64>, Option<f64>) {
    let mut first: Option<f64> = None;
    let mut second: Option<f64> = None;
    for v in values {
        match first {
            None => first = Some(v),
            Some(f) if v < f => {
                second = first;
                first = Some(v);
            }
            _ => {
                if second.is_none_or(|s| v < s) {
                    second = Some(v);
                }
            }
        }
    }
    (first, second)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub shell: ShellRegion,
    pub outcome: CertifyOutcome,
    pub strategy: StrategyKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    /// Largest certified half-width; `-1` when `x0` itself fails.
    pub w: f64,
    pub x0: Point,
    pub x0_fidelity: f64,
    pub regions: Vec<RegionRecord>,
    /// Every query spent, including the initial check at `x0`.
    pub total_queries: u64,
    pub config: DriverConfig,
    /// Minimum sampled fidelity over certified regions.
    pub f_hat_star_w: Option<f64>,
    /// Second-smallest sampled fidelity over certified regions.
    pub f_hat_second: Option<f64>,
    /// Set when the piecewise-linear early stop certified the whole input space.
    pub globally_certified: bool,
}

impl CertificationReport {
    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    pub fn certified_regions(&self) -> impl Iterator<Item = &RegionRecord> {
        self.regions.iter().filter(|r| r.outcome.certified)
    }
}
