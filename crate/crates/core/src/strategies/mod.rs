//! Region certification strategies.
//!
//! Each strategy receives a shell `(lb, ub]` around `x0`, a fidelity oracle, a
//! threshold and a per-call budget `Q`, and either certifies the shell or
//! returns the worst point it found. None of them issues more than `Q` oracle
//! calls. With `q = ⌊Q / log₂Q⌋`:
//!
//! - `unif` queries `Q` uniform points of the shell.
//! - `unifI` runs `⌊log₂Q⌋` iterations; iteration `i` draws `n = min(2^i, q)`
//!   uniform prototypes and `⌊q/n⌋` shell-conditioned Gaussian samples around each.
//! - `adaptI` draws `n` prototypes per iteration and spends the iteration's `q`
//!   queries over `⌈log₂n⌉` halving rounds, keeping the prototypes whose
//!   neighbourhoods produced the lowest fidelities.
//! - `unifI-iid` draws the same prototypes as `unifI` and then `Q` i.i.d.
//!   samples from the uniform-weight mixture of all their Gaussians.

mod adaptive;
mod incremental;
pub mod sampling;
mod schedule;
mod unif;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FidelityOracle;
use crate::point::Point;
use crate::record::{CertifyOutcome, FidelitySample, Provenance};
use crate::shell::ShellRegion;

pub use adaptive::certify_adapt_i;
pub use incremental::{certify_unif_i, certify_unif_i_iid, draw_mixture};
pub use sampling::{sample_gaussian_shell, sample_uniform_shell};
pub use schedule::{AdaptIteration, AdaptSchedule, Budget};
pub use unif::certify_unif;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "unif")]
    Unif,
    #[serde(rename = "unifi")]
    UnifI,
    #[serde(rename = "adapti")]
    AdaptI,
    #[serde(rename = "unifi-iid")]
    UnifIiid,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [Self::Unif, Self::UnifI, Self::AdaptI, Self::UnifIiid];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Unif => "unif",
            Self::UnifI => "unifi",
            Self::AdaptI => "adapti",
            Self::UnifIiid => "unifi-iid",
        }
    }

    /// Strategies whose samples are i.i.d. within a region.
    pub fn is_iid(self) -> bool {
        matches!(self, Self::Unif | Self::UnifIiid)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unif" => Ok(Self::Unif),
            "unifi" => Ok(Self::UnifI),
            "adapti" => Ok(Self::AdaptI),
            "unifi-iid" | "unifiiid" => Ok(Self::UnifIiid),
            other => Err(Error::InvalidArgument(format!("unknown strategy {other:?}"))),
        }
    }
}

/// How strategies spread work across threads. Results do not depend on it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Per-call query budget `Q`.
    pub budget: u64,
    /// Standard deviation of the prototype Gaussians. The driver overwrites it
    /// for every region.
    pub sigma: f64,
    pub seed: u64,
    /// Gaussian rejection attempts allowed per requested sample before the
    /// remaining slots fall back to uniform shell sampling.
    pub max_rejection_factor: u32,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            kind: StrategyKind::AdaptI,
            budget: 1000,
            sigma: 1.0,
            seed: 0,
            max_rejection_factor: 100,
        }
    }
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, budget: u64, seed: u64) -> Self {
        Self { kind, budget, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidArgument("query budget must be positive".into()));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.max_rejection_factor == 0 {
            return Err(Error::InvalidArgument("max_rejection_factor must be positive".into()));
        }
        Ok(())
    }

    /// The strategy that actually runs: budgets below 4 leave the incremental
    /// loops empty, so they fall back to `unif`.
    pub fn effective_kind(&self) -> StrategyKind {
        if self.budget < 4 {
            StrategyKind::Unif
        } else {
            self.kind
        }
    }
}

/// Certifies `shell` with the configured strategy.
///
/// `region_index` tags the recorded samples and selects this region's random
/// streams.
pub fn certify(
    shell: &ShellRegion,
    oracle: &dyn FidelityOracle,
    theta: f64,
    cfg: &StrategyConfig,
    region_index: usize,
    exec: Execution,
) -> Result<CertifyOutcome> {
    cfg.validate()?;
    let ctx = Ctx { shell, oracle, theta, cfg, region_index, exec };
    match cfg.effective_kind() {
        StrategyKind::Unif => unif::run(&ctx),
        StrategyKind::UnifI => incremental::run(&ctx),
        StrategyKind::AdaptI => adaptive::run(&ctx),
        StrategyKind::UnifIiid => incremental::run_iid(&ctx),
    }
}

pub(crate) struct Ctx<'a> {
    shell: &'a ShellRegion,
    oracle: &'a dyn FidelityOracle,
    theta: f64,
    cfg: &'a StrategyConfig,
    region_index: usize,
    exec: Execution,
}

// Stream keys under the region key.
const KEY_PROTOTYPES: u64 = u64::MAX;
const KEY_MIXTURE: u64 = u64::MAX - 1;

impl Ctx<'_> {
    fn rng(&self, key: &[u64]) -> crate::rng::StreamRng {
        let mut full = Vec::with_capacity(key.len() + 1);
        full.push(self.region_index as u64);
        full.extend_from_slice(key);
        crate::rng::stream(self.cfg.seed, &full)
    }

    fn evaluate(&self, xs: &[Point]) -> Result<Vec<f64>> {
        let ys = match self.exec {
            Execution::Sequential => self.oracle.fidelities(xs)?,
            Execution::Parallel => {
                const CHUNK: usize = 256;
                let parts = xs
                    .par_chunks(CHUNK)
                    .map(|c| self.oracle.fidelities(c))
                    .collect::<Result<Vec<_>>>()?;
                parts.into_iter().flatten().collect()
            }
        };
        if ys.len() != xs.len() {
            return Err(Error::Internal(format!(
                "oracle returned {} values for {} points",
                ys.len(),
                xs.len()
            )));
        }
        Ok(ys)
    }

    fn sample(&self, point: Point, fidelity: f64, provenance: Provenance) -> FidelitySample {
        FidelitySample { point, fidelity, region_index: self.region_index, provenance }
    }
}

/// Index of the smallest value; ties resolve to the earliest index.
pub(crate) fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v < values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Closes out an outcome from the collected samples.
pub(crate) fn finish(
    samples: Vec<FidelitySample>,
    theta: f64,
    trace: Vec<crate::record::IterationTrace>,
) -> Result<CertifyOutcome> {
    let fids: Vec<f64> = samples.iter().map(|s| s.fidelity).collect();
    let worst = argmin(&fids).ok_or_else(|| Error::Internal("certify drew no samples".into()))?;
    let min_fidelity = fids[worst];
    let certified = min_fidelity >= theta;
    Ok(CertifyOutcome {
        certified,
        violator: (!certified).then(|| samples[worst].point.clone()),
        min_fidelity,
        queries_used: samples.len() as u64,
        samples,
        trace,
    })
}
