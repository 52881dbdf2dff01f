//! Finite-sample lower bounds on `P[f̂* - f* ≤ ε]`, one per strategy, and their
//! combination over certified regions.
//!
//! Every per-region bound has the form `1 - exp(-E)` with an exponent `E`
//! built from estimated fidelity CDFs at the evaluation point `v = proxy + ε`:
//!
//! | strategy | exponent |
//! |---|---|
//! | unif (and i.i.d. unifI) | `Q F̂(v)` |
//! | unifI | `max_{j,k} ⌊q/n_j⌋ F̂_{j,k}(v)` |
//! | adaptI | `max_j ⌊(n_j - 1) q / (n_j log₂ n_j)⌋ F̂_{j,survivor}(v)` |
//!
//! Over regions the bound is `1 - min_i exp(-E_i)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::kde::CdfEstimate;
use crate::error::{Error, Result};
use crate::record::{CertificationReport, Provenance, RegionRecord};
use crate::strategies::{Budget, StrategyKind};

fn from_exponent(exponent: f64) -> f64 {
    (1.0 - (-exponent).exp()).clamp(0.0, 1.0)
}

/// Fidelities drawn around one prototype, with the prototype count of its iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeGroup {
    pub prototypes: u64,
    pub fidelities: Vec<f64>,
}

pub fn unif_exponent(fidelities: &[f64], budget: u64, eval_point: f64) -> Result<f64> {
    let cdf = CdfEstimate::fit(fidelities)?;
    Ok(budget as f64 * cdf.cdf(eval_point))
}

/// `1 - exp(-Q F̂(v))`.
pub fn bound_unif(fidelities: &[f64], budget: u64, eval_point: f64) -> Result<f64> {
    unif_exponent(fidelities, budget, eval_point).map(from_exponent)
}

pub fn unif_i_exponent(groups: &[PrototypeGroup], q: u64, eval_point: f64) -> Result<f64> {
    max_exponent(groups, eval_point, |n| (q / n.max(1)) as f64)
}

/// `1 - exp(-max ⌊q/n⌋ F̂_{j,k}(v))`.
pub fn bound_unif_i(groups: &[PrototypeGroup], q: u64, eval_point: f64) -> Result<f64> {
    unif_i_exponent(groups, q, eval_point).map(from_exponent)
}

/// `⌊(n - 1) q / (n log₂ n)⌋`, or `q` when a single prototype took the whole iteration.
pub fn adapt_i_coefficient(n: u64, q: u64) -> f64 {
    if n <= 1 {
        q as f64
    } else {
        let n = n as f64;
        ((n - 1.0) * q as f64 / (n * n.log2())).floor()
    }
}

pub fn adapt_i_exponent(survivors: &[PrototypeGroup], q: u64, eval_point: f64) -> Result<f64> {
    max_exponent(survivors, eval_point, |n| adapt_i_coefficient(n, q))
}

/// `1 - exp(-max_j ⌊(n_j - 1) q / (n_j log₂ n_j)⌋ F̂_{j,survivor}(v))`.
pub fn bound_adapt_i(survivors: &[PrototypeGroup], q: u64, eval_point: f64) -> Result<f64> {
    adapt_i_exponent(survivors, q, eval_point).map(from_exponent)
}

fn max_exponent(groups: &[PrototypeGroup], eval_point: f64, coefficient: impl Fn(u64) -> f64) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::NotEnoughSamples { needed: 1, have: 0 });
    }
    let mut best = 0.0f64;
    for g in groups {
        if g.fidelities.is_empty() {
            continue;
        }
        let cdf = CdfEstimate::fit(&g.fidelities)?;
        best = best.max(coefficient(g.prototypes) * cdf.cdf(eval_point));
    }
    Ok(best)
}

/// One certified region's contribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionTerm {
    pub region_index: usize,
    pub lb: f64,
    pub ub: f64,
    pub strategy: StrategyKind,
    pub exponent: f64,
    pub bound: f64,
}

/// Groups unifI samples by (iteration, prototype).
pub(crate) fn unif_i_groups(region: &RegionRecord) -> Vec<PrototypeGroup> {
    let counts: BTreeMap<u32, u64> = region
        .outcome
        .trace
        .iter()
        .map(|t| (t.iteration, t.prototypes as u64))
        .collect();
    let mut groups: BTreeMap<(u32, u32), Vec<f64>> = BTreeMap::new();
    for s in &region.outcome.samples {
        if let Provenance::Prototype { iteration, prototype } = s.provenance {
            groups.entry((iteration, prototype)).or_default().push(s.fidelity);
        }
    }
    groups
        .into_iter()
        .map(|((iteration, _), fidelities)| PrototypeGroup {
            prototypes: counts.get(&iteration).copied().unwrap_or(1),
            fidelities,
        })
        .collect()
}

/// Accumulated samples of each iteration's final adaptI survivor.
pub(crate) fn adapt_i_survivor_groups(region: &RegionRecord) -> Vec<PrototypeGroup> {
    region
        .outcome
        .trace
        .iter()
        .filter_map(|t| {
            let survivor = t.survivor?;
            let fidelities: Vec<f64> = region
                .outcome
                .samples
                .iter()
                .filter(|s| {
                    s.provenance == Provenance::Prototype { iteration: t.iteration, prototype: survivor }
                })
                .map(|s| s.fidelity)
                .collect();
            Some(PrototypeGroup { prototypes: t.prototypes as u64, fidelities })
        })
        .collect()
}

pub fn region_exponent(region: &RegionRecord, budget: u64, eval_point: f64) -> Result<f64> {
    match region.strategy {
        StrategyKind::Unif | StrategyKind::UnifIiid => {
            let fids: Vec<f64> = region.outcome.samples.iter().map(|s| s.fidelity).collect();
            unif_exponent(&fids, fids.len() as u64, eval_point)
        }
        StrategyKind::UnifI => unif_i_exponent(&unif_i_groups(region), Budget::new(budget).q, eval_point),
        StrategyKind::AdaptI => {
            adapt_i_exponent(&adapt_i_survivor_groups(region), Budget::new(budget).q, eval_point)
        }
    }
}

/// Per-region terms and the combined bound `1 - min_i exp(-E_i)` at `eval_point`.
pub fn combine_regions(report: &CertificationReport, eval_point: f64) -> Result<(f64, Vec<RegionTerm>)> {
    let budget = report.config.strategy.budget;
    let terms = report
        .regions
        .iter()
        .enumerate()
        .filter(|(_, r)| r.outcome.certified)
        .map(|(i, r)| {
            let exponent = region_exponent(r, budget, eval_point)?;
            Ok(RegionTerm {
                region_index: i,
                lb: r.shell.lb(),
                ub: r.shell.ub(),
                strategy: r.strategy,
                exponent,
                bound: from_exponent(exponent),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if terms.is_empty() {
        return Err(Error::NothingToCertify);
    }
    let min_exp = terms.iter().map(|t| (-t.exponent).exp()).fold(f64::INFINITY, f64::min);
    Ok(((1.0 - min_exp).clamp(0.0, 1.0), terms))
}
