//! Asymptotic, CDF-free confidence for the minimum of i.i.d. fidelity samples.
//!
//! With `f̂*` and `f̿*` the smallest and second-smallest observations and tail
//! exponent `κ`, `P[f̂* - f* ≤ ε] → (1 + (f̿* - f̂*)/ε)^(-κ)` as `Q → ∞`.
//! Inverting at confidence `1 - p` gives the width
//! `ε = (f̿* - f̂*) / ((1 - p)^(-1/κ) - 1)`, which is bounded above by the
//! tangent-line form `κ (f̿* - f̂*) / ln(1/(1 - p))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::CertificationReport;

pub fn evt_probability(gap: f64, epsilon: f64, kappa: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if !(gap >= 0.0) {
        return Err(Error::InvalidArgument(format!("gap must be non-negative, got {gap}")));
    }
    Ok((1.0 + gap / epsilon).powf(-kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonWidth {
    pub exact: f64,
    pub simplified: f64,
}

pub fn evt_epsilon_width(gap: f64, p: f64, kappa: f64) -> Result<EpsilonWidth> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p must lie strictly between 0 and 1, got {p}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if !(gap >= 0.0) {
        return Err(Error::InvalidArgument(format!("gap must be non-negative, got {gap}")));
    }
    let denom = (1.0 - p).powf(-1.0 / kappa) - 1.0;
    Ok(EpsilonWidth {
        exact: gap / denom,
        simplified: kappa * gap / (1.0 / (1.0 - p)).ln(),
    })
}

/// The region with the smallest observed minimum and its two smallest values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvtRegion {
    pub region_index: usize,
    pub f_hat: f64,
    pub f_second: f64,
}

impl EvtRegion {
    pub fn gap(&self) -> f64 {
        self.f_second - self.f_hat
    }
}

/// Picks `î = argmin_i f̂*_i` over certified regions (ties to the earliest).
///
/// Only i.i.d. strategies qualify.
pub fn evt_region(report: &CertificationReport) -> Result<EvtRegion> {
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in report.regions.iter().enumerate().filter(|(_, r)| r.outcome.certified) {
        if !r.strategy.is_iid() {
            return Err(Error::InvalidArgument(format!(
                "extreme-value bound needs i.i.d. samples; region {i} used {}",
                r.strategy
            )));
        }
        if best.is_none_or(|(_, m)| r.outcome.min_fidelity < m) {
            best = Some((i, r.outcome.min_fidelity));
        }
    }
    let (region_index, _) = best.ok_or(Error::NothingToCertify)?;
    let outcome = &report.regions[region_index].outcome;
    match outcome.two_smallest() {
        (Some(f_hat), Some(f_second)) => Ok(EvtRegion { region_index, f_hat, f_second }),
        _ => Err(Error::NotEnoughSamples { needed: 2, have: outcome.samples.len() }),
    }
}

pub fn evt_bound(report: &CertificationReport, epsilon: f64, kappa: f64) -> Result<(EvtRegion, f64)> {
    let region = evt_region(report)?;
    let prob = evt_probability(region.gap(), epsilon, kappa)?;
    Ok((region, prob))
}

pub fn evt_epsilon_width_for_report(report: &CertificationReport, p: f64, kappa: f64) -> Result<EpsilonWidth> {
    evt_epsilon_width(evt_region(report)?.gap(), p, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gap_is_certain() {
        assert_eq!(evt_probability(0.0, 0.01, 5.0).unwrap(), 1.0);
        let w = evt_epsilon_width(0.0, 0.5, 3.0).unwrap();
        assert_eq!((w.exact, w.simplified), (0.0, 0.0));
    }

    #[test]
    fn closed_form_value() {
        let v = evt_probability(0.01, 0.01, 5.0).unwrap();
        assert!((v - 0.03125).abs() < 1e-12);
    }

    #[test]
    fn width_example() {
        let w = evt_epsilon_width(0.02, 0.5, 1.0).unwrap();
        assert!((w.exact - 0.02).abs() < 1e-15);
        assert!((w.simplified - 0.02 / 2f64.ln()).abs() < 1e-15);
        assert!((w.simplified - 0.028_853_900_817_779_27).abs() < 1e-12);
    }

    #[test]
    fn simplified_width_dominates() {
        for kappa in [1.0, 5.0, 50.0] {
            for p in [0.1, 0.5, 0.9] {
                let w = evt_epsilon_width(0.01, p, kappa).unwrap();
                assert!(w.simplified >= w.exact, "kappa={kappa} p={p}");
            }
        }
    }

    #[test]
    fn monotone_in_arguments() {
        let base = evt_probability(0.01, 0.01, 2.0).unwrap();
        assert!(evt_probability(0.01, 0.01, 3.0).unwrap() <= base);
        assert!(evt_probability(0.02, 0.01, 2.0).unwrap() <= base);
        assert!(evt_probability(0.01, 0.02, 2.0).unwrap() >= base);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(evt_epsilon_width(0.01, 0.0, 1.0).is_err());
        assert!(evt_epsilon_width(0.01, 1.0, 1.0).is_err());
        assert!(evt_probability(0.01, 0.0, 1.0).is_err());
        assert!(evt_probability(0.01, 0.01, 0.0).is_err());
    }
}
