//! Outer search over half-widths.
//!
//! Starting from the shell `(lb, ub]`, each step certifies one shell. On
//! success the certified width becomes the new `lb` and `ub` grows to
//! `min((B + ub) / 2, 2 ub)`; on failure `B` shrinks to an aggregate of the
//! violator's coordinate gaps beyond `lb` and `ub` moves to `(B + lb) / 2`.
//! The search stops after `Z` shells or once `ub - lb < exit_gap_factor / d`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::blackbox::BlackBox;
use crate::error::{check_dim, Error, Result};
use crate::explanation::Explanation;
use crate::metric::{Fidelity, FidelityOracle, QualityMetric};
use crate::point::Point;
use crate::record::{two_smallest, CertificationReport, RegionRecord};
use crate::shell::ShellRegion;
use crate::special::early_stop::{PiecewiseEarlyStop, StopSignal};
use crate::strategies::{self, Execution, StrategyConfig};

/// How the violator's qualifying coordinate gaps are folded into `B`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BPolicy {
    #[default]
    Min,
    Max,
    Mean,
}

impl FromStr for BPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Self::Min),
            "max" => Ok(Self::Max),
            "mean" => Ok(Self::Mean),
            other => Err(Error::InvalidArgument(format!("unknown b-policy {other:?}"))),
        }
    }
}

impl fmt::Display for BPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Min => "min",
            Self::Max => "max",
            Self::Mean => "mean",
        })
    }
}

/// Stop as soon as `pieces` distinct fidelities (merged within `tol`) have been
/// seen and all of them reach `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopConfig {
    pub pieces: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverConfig {
    /// Number of shells to check (`Z`).
    pub regions: u32,
    pub initial_lb: f64,
    pub initial_ub: f64,
    pub theta: f64,
    pub strategy: StrategyConfig,
    pub b_policy: BPolicy,
    pub exit_gap_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early_stop: Option<EarlyStopConfig>,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            regions: 10,
            initial_lb: 0.0,
            initial_ub: 1.0,
            theta: 0.75,
            strategy: StrategyConfig::default(),
            b_policy: BPolicy::Min,
            exit_gap_factor: 0.1,
            early_stop: None,
        }
    }
}

impl DriverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.regions == 0 {
            return Err(Error::InvalidArgument("need at least one region check".into()));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidArgument("theta must be finite".into()));
        }
        if !(self.initial_lb >= 0.0 && self.initial_ub > self.initial_lb && self.initial_ub.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= lb < ub, got ({}, {})",
                self.initial_lb, self.initial_ub
            )));
        }
        if !(self.exit_gap_factor >= 0.0 && self.exit_gap_factor.is_finite()) {
            return Err(Error::InvalidArgument("exit_gap_factor must be a finite non-negative number".into()));
        }
        self.strategy.validate()
    }
}

/// New `(B, ub)` after a violation at `b`.
///
/// Only coordinates with `|b_i - x0_i| > lb` qualify. `B` never increases.
pub fn update_on_violation(b: &Point, x0: &Point, lb: f64, b_prev: f64, policy: BPolicy) -> Result<(f64, f64)> {
    check_dim(x0.dim(), b.dim())?;
    let gaps: Vec<f64> = b
        .iter()
        .zip(x0.iter())
        .map(|(bi, xi)| (bi - xi).abs())
        .filter(|&g| g > lb)
        .collect();
    if gaps.is_empty() {
        return Err(Error::Internal(format!("violator has no coordinate gap beyond lb = {lb}")));
    }
    let candidate = match policy {
        BPolicy::Min => gaps.iter().copied().fold(f64::INFINITY, f64::min),
        BPolicy::Max => gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        BPolicy::Mean => gaps.iter().sum::<f64>() / gaps.len() as f64,
    };
    let bound = candidate.min(b_prev);
    Ok((bound, (bound + lb) / 2.0))
}

pub fn should_exit(lb: f64, ub: f64, dim: usize, exit_gap_factor: f64) -> bool {
    ub - lb < exit_gap_factor / dim as f64
}

/// Certifies `explanation` around `x0` against `blackbox` with `metric`.
pub fn ecertify(
    x0: &Point,
    blackbox: &BlackBox,
    explanation: &Explanation,
    metric: &QualityMetric,
    cfg: &DriverConfig,
) -> Result<CertificationReport> {
    let fidelity = Fidelity::new(metric.clone(), explanation.clone(), blackbox.clone())?;
    if let Some(d) = explanation.dim() {
        check_dim(d, x0.dim())?;
    }
    ecertify_with(x0, &fidelity, cfg, Execution::Sequential)
}

/// Runs the search against any fidelity oracle.
pub fn ecertify_with(
    x0: &Point,
    oracle: &dyn FidelityOracle,
    cfg: &DriverConfig,
    exec: Execution,
) -> Result<CertificationReport> {
    cfg.validate()?;
    let d = x0.dim();
    let theta = cfg.theta;
    let x0_fidelity = oracle.fidelities(std::slice::from_ref(x0))?[0];
    let mut report = CertificationReport {
        w: -1.0,
        x0: x0.clone(),
        x0_fidelity,
        regions: Vec::new(),
        total_queries: 1,
        config: cfg.clone(),
        f_hat_star_w: None,
        f_hat_second: None,
        globally_certified: false,
    };
    if x0_fidelity < theta {
        log::info!("x0 fails certification (fidelity {x0_fidelity} < {theta})");
        return Ok(report);
    }

    let mut stopper = cfg
        .early_stop
        .map(|es| PiecewiseEarlyStop::new(es.pieces, theta, es.tol));
    let mut lb = cfg.initial_lb;
    let mut ub = cfg.initial_ub;
    let mut w = lb;
    let mut bound = f64::INFINITY;

    for z in 0..cfg.regions as usize {
        let strategy = StrategyConfig { sigma: (ub - lb) / d as f64, ..cfg.strategy.clone() };
        let shell = ShellRegion::new(x0.clone(), lb, ub)?;
        let outcome = strategies::certify(&shell, oracle, theta, &strategy, z, exec)?;
        report.total_queries += outcome.queries_used;
        log::debug!(
            "region {z}: ({lb}, {ub}] certified={} min_fidelity={}",
            outcome.certified,
            outcome.min_fidelity
        );

        let mut stop = false;
        if let Some(s) = stopper.as_mut() {
            match s.observe_all(outcome.samples.iter().map(|x| x.fidelity)) {
                Ok(StopSignal::CertifyAll) => stop = outcome.certified,
                Ok(StopSignal::Continue) => {}
                Err(e) => {
                    log::warn!("disabling piecewise early stop: {e}");
                    stopper = None;
                }
            }
        }

        if outcome.certified {
            w = ub;
            lb = ub;
            ub = ((bound + ub) / 2.0).min(2.0 * ub);
        } else {
            let violator = outcome
                .violator
                .as_ref()
                .ok_or_else(|| Error::Internal("failed region without violator".into()))?;
            (bound, ub) = update_on_violation(violator, x0, lb, bound, cfg.b_policy)?;
        }
        report.regions.push(RegionRecord { shell, outcome, strategy: strategy.effective_kind() });

        if stop {
            report.globally_certified = true;
            break;
        }
        if should_exit(lb, ub, d, cfg.exit_gap_factor) || ub <= lb {
            break;
        }
    }

    report.w = w;
    report.f_hat_star_w = report
        .certified_regions()
        .map(|r| r.outcome.min_fidelity)
        .reduce(f64::min);
    report.f_hat_second = two_smallest(
        report
            .certified_regions()
            .flat_map(|r| r.outcome.samples.iter().map(|s| s.fidelity)),
    )
    .1;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn violation_update_policies() {
        let x0 = Point::zeros(3);
        let b = pt(&[0.5, 0.1, 0.9]);
        let cases = [(BPolicy::Min, 0.5, 0.35), (BPolicy::Max, 0.9, 0.55), (BPolicy::Mean, 0.7, 0.45)];
        for (policy, eb, eub) in cases {
            let (bb, ub) = update_on_violation(&b, &x0, 0.2, f64::INFINITY, policy).unwrap();
            assert!((bb - eb).abs() < 1e-12 && (ub - eub).abs() < 1e-12, "{policy}");
        }
    }

    #[test]
    fn violation_bound_is_monotone() {
        let x0 = Point::zeros(2);
        let (bb, ub) = update_on_violation(&pt(&[0.9, 0.0]), &x0, 0.1, 0.4, BPolicy::Min).unwrap();
        assert_eq!(bb, 0.4);
        assert!((ub - 0.25).abs() < 1e-12);
    }

    #[test]
    fn violation_inside_lb_is_an_internal_error() {
        let r = update_on_violation(&pt(&[0.1, 0.1]), &Point::zeros(2), 0.2, f64::INFINITY, BPolicy::Min);
        assert!(matches!(r, Err(Error::Internal(_))));
    }

    #[test]
    fn exit_rule_is_strict() {
        assert!(should_exit(0.10, 0.105, 10, 0.1));
        assert!(!should_exit(0.5, 0.7, 1, 0.1));
        assert!(!should_exit(0.0, 1e-3, 100, 0.1));
        assert!(should_exit(0.0, 0.9e-3, 100, 0.1));
    }

    #[test]
    fn x0_failure_returns_sentinel() {
        let g = BlackBox::from_fn(2, |_| 10.0);
        let e = Explanation::linear(vec![0.0, 0.0], 0.0);
        let r = ecertify(&Point::zeros(2), &g, &e, &QualityMetric::AbsFidelity, &DriverConfig::default()).unwrap();
        assert_eq!(r.w, -1.0);
        assert_eq!(r.total_queries, 1);
        assert_eq!(g.query_count(), 1);
        assert!(r.regions.is_empty());
    }

    #[test]
    fn perfect_explanation_doubles_every_step() {
        let g = BlackBox::from_fn(1, |x| 0.3 * x[0]);
        let e = Explanation::linear(vec![0.3], 0.0);
        let cfg = DriverConfig {
            regions: 5,
            strategy: StrategyConfig::new(crate::StrategyKind::Unif, 20, 1),
            ..DriverConfig::default()
        };
        let r = ecertify(&Point::zeros(1), &g, &e, &QualityMetric::AbsFidelity, &cfg).unwrap();
        assert_eq!(r.w, 16.0);
        assert_eq!(r.total_queries, 101);
        assert_eq!(g.query_count(), 101);
        assert_eq!(r.f_hat_star_w, Some(1.0));
    }

    #[test]
    fn config_validation() {
        let mut cfg = DriverConfig::default();
        cfg.initial_lb = 1.0;
        assert!(cfg.validate().is_err());
        let cfg = DriverConfig { regions: 0, ..DriverConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = DriverConfig { theta: f64::NAN, ..DriverConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
