//! Probability-of-correctness certificates for a finished certification run.

pub mod evt;
pub mod finite;
pub mod kde;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::CertificationReport;

pub use evt::{evt_bound, evt_epsilon_width, evt_epsilon_width_for_report, evt_probability, EpsilonWidth, EvtRegion};
pub use finite::{bound_adapt_i, bound_unif, bound_unif_i, PrototypeGroup, RegionTerm};
pub use kde::{empirical_cdf, CdfEstimate, KdeModel};

/// Stand-in for the unknown true minimum `f*_w` when evaluating CDFs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Proxy {
    /// The minimum observed fidelity over certified regions (optimistic).
    FHatStar,
    /// The threshold (conservative).
    Theta,
    /// A known true minimum, e.g. from a grid oracle.
    True(f64),
}

impl FromStr for Proxy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theta" => Ok(Self::Theta),
            "fhat" | "fhat_star" => Ok(Self::FHatStar),
            other => other
                .parse::<f64>()
                .map(Self::True)
                .map_err(|_| Error::InvalidArgument(format!("unknown proxy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    #[default]
    Theorem1,
    Evt,
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Theorem1 => "theorem1",
            Self::Evt => "evt",
        })
    }
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theorem1" | "finite" | "kde" => Ok(Self::Theorem1),
            "evt" => Ok(Self::Evt),
            other => Err(Error::InvalidArgument(format!("unknown bound method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRequest {
    pub epsilon: f64,
    pub proxy: Proxy,
    pub method: BoundMethod,
    /// EVT tail exponent; `d / 2` when absent.
    pub kappa: Option<f64>,
    /// Confidence `1 - p` at which to report EVT widths.
    pub confidence: Option<f64>,
}

impl Default for BoundRequest {
    fn default() -> Self {
        Self { epsilon: 0.01, proxy: Proxy::Theta, method: BoundMethod::Theorem1, kappa: None, confidence: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub probability_lower_bound: f64,
    pub per_region_terms: Vec<RegionTerm>,
    /// `proxy + ε` for the finite-sample bound; `ε` itself for EVT.
    pub evaluation_point: f64,
    pub method: BoundMethod,
    pub epsilon: f64,
    pub proxy: Proxy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evt_region: Option<EvtRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evt_width: Option<EpsilonWidth>,
}

fn proxy_value(report: &CertificationReport, proxy: Proxy) -> Result<f64> {
    match proxy {
        Proxy::Theta => Ok(report.config.theta),
        Proxy::FHatStar => report.f_hat_star_w.ok_or(Error::NothingToCertify),
        Proxy::True(v) => Ok(v),
    }
}

/// Finite-sample bound: `1 - min_i exp(-E_i)` over certified regions,
/// evaluated at `proxy + ε`.
pub fn bound_theorem1(report: &CertificationReport, request: &BoundRequest) -> Result<BoundResult> {
    if !(request.epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", request.epsilon)));
    }
    let eval = proxy_value(report, request.proxy)? + request.epsilon;
    let (prob, terms) = finite::combine_regions(report, eval)?;
    Ok(BoundResult {
        probability_lower_bound: prob,
        per_region_terms: terms,
        evaluation_point: eval,
        method: BoundMethod::Theorem1,
        epsilon: request.epsilon,
        proxy: request.proxy,
        evt_region: None,
        evt_width: None,
    })
}

pub fn compute(report: &CertificationReport, request: &BoundRequest) -> Result<BoundResult> {
    match request.method {
        BoundMethod::Theorem1 => bound_theorem1(report, request),
        BoundMethod::Evt => {
            let kappa = request.kappa.unwrap_or(report.dim() as f64 / 2.0);
            let (region, prob) = evt::evt_bound(report, request.epsilon, kappa)?;
            let evt_width = request
                .confidence
                .map(|c| evt::evt_epsilon_width(region.gap(), 1.0 - c, kappa))
                .transpose()?;
            let r = &report.regions[region.region_index];
            Ok(BoundResult {
                probability_lower_bound: prob,
                per_region_terms: vec![RegionTerm {
                    region_index: region.region_index,
                    lb: r.shell.lb(),
                    ub: r.shell.ub(),
                    strategy: r.strategy,
                    exponent: -prob.max(f64::MIN_POSITIVE).ln(),
                    bound: prob,
                }],
                evaluation_point: request.epsilon,
                method: BoundMethod::Evt,
                epsilon: request.epsilon,
                proxy: request.proxy,
                evt_region: Some(region),
                evt_width,
            })
        }
    }
}
